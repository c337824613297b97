#include "cli/files.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qsyn::cli {
namespace {

std::pair<std::size_t, std::size_t> parse_shape(const std::string& s, const std::string& key) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError(key + ".shape: expected RxC, got '" + s + "'");
  const double r = parse_decimal(s.substr(0, x), key + ".shape");
  const double c = parse_decimal(s.substr(x + 1), key + ".shape");
  if (r < 0 || c < 0 || r != std::floor(r) || c != std::floor(c)) {
    throw UsageError(key + ".shape: expected nonnegative integers");
  }
  return {static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
}

double get_number(const KeyValueFile& f, const std::string& key) {
  return parse_decimal(f.get(key), key);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!out.empty()) out += ' ';
      out += format_number(m(i, j));
    }
  return out;
}

void put_matrix(KeyValueFile& f, const std::string& key, const Matrix& m) {
  f.set(key + ".shape", m.shape_string());
  f.set(key, format_matrix(m));
}

Matrix get_matrix(const KeyValueFile& f, const std::string& key) {
  const auto [rows, cols] = parse_shape(f.get(key + ".shape"), key);
  std::vector<double> data;
  std::istringstream in(f.has(key) ? f.get(key) : std::string());
  std::string tok;
  while (in >> tok) data.push_back(parse_decimal(tok, key));
  if (data.size() != rows * cols) {
    throw UsageError(key + ": expected " + std::to_string(rows * cols) + " entries, got " +
                     std::to_string(data.size()));
  }
  return Matrix(rows, cols, std::move(data));
}

KeyValueFile controller_to_file(const ControllerParams& c) {
  KeyValueFile f;
  f.set("kind", std::string(to_string(c.kind)));
  f.set("gamma", format_number(c.gamma));
  f.set("epsilon", format_number(c.epsilon));
  f.set("rho", format_number(c.rho));
  f.set("zeta_xy", format_number(c.coupling));
  put_matrix(f, "Ac", c.Ac);
  put_matrix(f, "Bc", c.Bc);
  put_matrix(f, "Cc", c.Cc);
  put_matrix(f, "X", c.X.X);
  put_matrix(f, "Y", c.Y.X);
  return f;
}

ControllerParams controller_from_file(const KeyValueFile& f) {
  ControllerParams c;
  try {
    c.kind = parse_controller_kind(f.get("kind"));
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  c.gamma = get_number(f, "gamma");
  c.epsilon = get_number(f, "epsilon");
  c.rho = get_number(f, "rho");
  c.coupling = get_number(f, "zeta_xy");
  c.Ac = get_matrix(f, "Ac");
  c.Bc = get_matrix(f, "Bc");
  c.Cc = get_matrix(f, "Cc");
  c.X.X = get_matrix(f, "X");
  c.Y.X = get_matrix(f, "Y");
  const std::size_t n = c.Ac.rows();
  if (!c.Ac.is_square() || c.Bc.rows() != n || c.Cc.cols() != n) {
    throw UsageError("controller matrices have inconsistent shapes");
  }
  if (!(c.gamma > 0.0)) throw UsageError("controller gamma must be positive");
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
  if (!out) throw UsageError("write failed for " + path.string());
}

void write_controller(const std::filesystem::path& path, const ControllerParams& c) {
  write_text(path, controller_to_file(c).render());
}

ControllerParams read_controller(const std::filesystem::path& path) {
  return controller_from_file(KeyValueFile::load(path));
}

KeyValueFile realized_to_file(const ControllerParams& c, const RealizedController& r) {
  KeyValueFile f = controller_to_file(c);
  static const char* kBlockNames[] = {"Bc", "Bv1", "Bv2"};
  for (std::size_t i = 0; i < r.blocks.size() && i < 3; ++i) {
    put_matrix(f, kBlockNames[i], r.blocks[i]);
  }
  put_matrix(f, "Theta", r.Theta);
  f.set("pr_residual", format_number(r.pr_residual));
  f.set("pairing_residual", format_number(r.pairing_residual));
  if (r.cavity) {
    for (std::size_t i = 0; i < r.cavity->size(); ++i) {
      f.set("cavity.kappa" + std::to_string(i + 1), format_number((*r.cavity)[i]));
    }
  }
  return f;
}

RealizedController realized_from_file(const KeyValueFile& f) {
  RealizedController r;
  r.Ac = get_matrix(f, "Ac");
  r.Cc = get_matrix(f, "Cc");
  r.Theta = get_matrix(f, "Theta");
  for (const char* name : {"Bc", "Bv1", "Bv2"}) {
    if (!f.has(std::string(name) + ".shape")) break;
    r.blocks.push_back(get_matrix(f, name));
  }
  const std::size_t n = r.Ac.rows();
  if (!r.Ac.is_square() || r.Theta.rows() != n || !r.Theta.is_square() || r.Cc.cols() != n) {
    throw UsageError("realized controller matrices have inconsistent shapes");
  }
  for (const auto& b : r.blocks) {
    if (b.rows() != n || b.cols() % 2 != 0) {
      throw UsageError("input block of shape " + b.shape_string() + " does not fit the controller");
    }
  }
  if (f.has("pr_residual")) r.pr_residual = get_number(f, "pr_residual");
  if (f.has("pairing_residual")) r.pairing_residual = get_number(f, "pairing_residual");
  std::vector<double> cavity;
  for (int i = 1; f.has("cavity.kappa" + std::to_string(i)); ++i) {
    cavity.push_back(get_number(f, "cavity.kappa" + std::to_string(i)));
  }
  if (!cavity.empty()) r.cavity = std::move(cavity);
  return r;
}

void write_realized(const std::filesystem::path& path, const ControllerParams& c,
                    const RealizedController& r) {
  write_text(path, realized_to_file(c, r).render());
}

RealizedController read_realized(const std::filesystem::path& path) {
  return realized_from_file(KeyValueFile::load(path));
}

std::string feasibility_csv(const std::vector<FeasibilityRow>& rows) {
  std::string out = "gamma,rho,eps_lower,eps_upper,feasible\n";
  for (const auto& r : rows) {
    out += format_number(r.gamma) + "," + format_number(r.rho) + "," +
           format_number(r.eps_lower) + "," + format_number(r.eps_upper) + "," +
           (r.feasible ? "true" : "false") + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = "dphi,dbeta_ratio,stable,hinf_norm\n";
  for (const auto& r : records) {
    out += format_number(r.dphi) + "," + format_number(r.dbeta_ratio) + "," +
           (r.stable ? "true" : "false") + "," + (r.norm ? format_number(*r.norm) : "inf") +
           "\n";
  }
  return out;
}

std::string plot_script(const std::vector<std::filesystem::path>& csvs,
                        const std::vector<std::string>& titles, double gamma,
                        double phi_lo, double phi_hi) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set xlabel 'Delta phi (rad)'\n";
  s += "set ylabel 'H-infinity norm'\n";
  s += "set xrange [" + format_number(phi_lo) + ":" + format_number(phi_hi) + "]\n";
  s += "set key top left\n";
  s += "set grid\n";
  s += "gamma = " + format_number(gamma) + "\n";
  s += "plot \\\n";
  for (std::size_t i = 0; i < csvs.size(); ++i) {
    s += "  '" + csvs[i].filename().string() + "' every ::1 using 1:4 with lines title '" +
         titles[i] + "', \\\n";
  }
  s += "  gamma with lines dashtype 2 lc rgb 'black' title 'gamma'\n";
  return s;
}

}  // namespace qsyn::cli
