#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qsyn/errors.hpp"
#include "qsyn/model.hpp"

namespace qsyn::cli {

/// Malformed configuration or command line; maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Run configuration, read from a sectioned `key = value` file:
///
///   [plant]      kappa1, kappa2, chi, phase_lo, phase_hi, beta_bound
///   [synthesis]  gamma, epsilon, decomposition (passive | active | nominal)
///   [sweep]      phi_points, seed, beta_mode (zero | random)
///   [output]     directory, emit_plots (true | false)
struct Config {
  OpoParams plant;
  double gamma = 0.05;
  double epsilon = 1.0;
  Decomposition decomposition = Decomposition::kPassive;
  std::size_t phi_points = 629;
  std::uint64_t seed = 0;
  bool beta_random = false;
  std::filesystem::path out_dir = ".";
  bool emit_plots = false;
};

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Strict decimal parse of the whole string.
double parse_decimal(std::string_view text, std::string_view what);

/// Flat `key = value` file with `#` comments, keys kept in file order.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value);
  std::string render() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

std::string trim(std::string_view s);
std::string read_file(const std::filesystem::path& path);

}  // namespace qsyn::cli
