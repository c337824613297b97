#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "qsyn/hinf.hpp"
#include "qsyn/realizability.hpp"
#include "qsyn/riccati.hpp"
#include "qsyn/synthesis.hpp"

namespace qsyn::cli {

/// Nine significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double v);

/// Row-major, space separated.
std::string format_matrix(const Matrix& m);

/// Writes `<key>.shape = RxC` followed by `<key> = entries`.
void put_matrix(KeyValueFile& f, const std::string& key, const Matrix& m);
Matrix get_matrix(const KeyValueFile& f, const std::string& key);

KeyValueFile controller_to_file(const ControllerParams& c);
ControllerParams controller_from_file(const KeyValueFile& f);

void write_controller(const std::filesystem::path& path, const ControllerParams& c);
ControllerParams read_controller(const std::filesystem::path& path);

KeyValueFile realized_to_file(const ControllerParams& c, const RealizedController& r);
RealizedController realized_from_file(const KeyValueFile& f);

void write_realized(const std::filesystem::path& path, const ControllerParams& c,
                    const RealizedController& r);
RealizedController read_realized(const std::filesystem::path& path);

std::string feasibility_csv(const std::vector<FeasibilityRow>& rows);
std::string sweep_csv(const std::vector<SweepRecord>& records);

/// gnuplot script plotting each CSV's norm against dphi with a gamma reference line.
std::string plot_script(const std::vector<std::filesystem::path>& csvs,
                        const std::vector<std::string>& titles, double gamma,
                        double phi_lo, double phi_hi);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qsyn::cli
