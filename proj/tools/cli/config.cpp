#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qsyn::cli {
namespace {

bool parse_bool(std::string_view v, std::string_view what) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError(std::string(what) + ": expected true or false, got '" + std::string(v) + "'");
}

std::uint64_t parse_unsigned(std::string_view v, std::string_view what) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(std::string(what) + ": expected a nonnegative integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

}  // namespace

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_decimal(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double out = 0.0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, out);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw UsageError(std::string(what) + ": expected a finite decimal, got '" + t + "'");
  }
  return out;
}

Config parse_config(std::string_view text) {
  static const std::map<std::string, std::set<std::string>> kKnown = {
      {"plant", {"kappa1", "kappa2", "chi", "phase_lo", "phase_hi", "beta_bound"}},
      {"synthesis", {"gamma", "epsilon", "decomposition"}},
      {"sweep", {"phi_points", "seed", "beta_mode"}},
      {"output", {"directory", "emit_plots"}},
  };
  Config cfg;
  std::set<std::string> seen;
  std::string section;
  std::istringstream lines{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kKnown.count(section)) throw UsageError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    if (section.empty()) throw UsageError(where + ": key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!kKnown.at(section).count(key)) {
      throw UsageError(where + ": unknown key '" + key + "' in [" + section + "]");
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw UsageError(where + ": duplicate key " + full);

    if (full == "plant.kappa1") cfg.plant.kappa1 = parse_decimal(value, full);
    else if (full == "plant.kappa2") cfg.plant.kappa2 = parse_decimal(value, full);
    else if (full == "plant.chi") cfg.plant.chi = parse_decimal(value, full);
    else if (full == "plant.phase_lo") cfg.plant.phase_range.lo = parse_decimal(value, full);
    else if (full == "plant.phase_hi") cfg.plant.phase_range.hi = parse_decimal(value, full);
    else if (full == "plant.beta_bound") cfg.plant.beta_bound = parse_decimal(value, full);
    else if (full == "synthesis.gamma") cfg.gamma = parse_decimal(value, full);
    else if (full == "synthesis.epsilon") cfg.epsilon = parse_decimal(value, full);
    else if (full == "synthesis.decomposition") {
      try {
        cfg.decomposition = parse_decomposition(value);
      } catch (const ValidationError& e) {
        throw UsageError(where + ": " + e.what());
      }
    } else if (full == "sweep.phi_points") cfg.phi_points = parse_unsigned(value, full);
    else if (full == "sweep.seed") cfg.seed = parse_unsigned(value, full);
    else if (full == "sweep.beta_mode") {
      if (value == "zero") cfg.beta_random = false;
      else if (value == "random") cfg.beta_random = true;
      else throw UsageError(where + ": beta_mode must be zero or random");
    } else if (full == "output.directory") cfg.out_dir = value;
    else if (full == "output.emit_plots") cfg.emit_plots = parse_bool(value, full);
  }
  for (const char* required : {"plant.kappa1", "plant.kappa2", "plant.chi"}) {
    if (!seen.count(required)) throw UsageError(std::string("config is missing ") + required);
  }
  if (cfg.phi_points < 2) throw UsageError("sweep.phi_points must be at least 2");
  if (!(cfg.gamma > 0.0)) throw UsageError("synthesis.gamma must be positive");
  if (!(cfg.epsilon > 0.0)) throw UsageError("synthesis.epsilon must be positive");
  try {
    validate(cfg.plant);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("invalid [plant]: ") + e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile f;
  std::istringstream lines{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw UsageError("line " + std::to_string(lineno) + ": empty key");
    if (f.has(key)) throw UsageError("duplicate key " + key);
    f.set(key, trim(std::string_view(line).substr(eq + 1)));
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("missing key " + key);
  return it->second;
}

void KeyValueFile::set(const std::string& key, std::string value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = std::move(value);
}

std::string KeyValueFile::render() const {
  std::string out;
  for (const auto& k : order_) out += k + " = " + values_.at(k) + "\n";
  return out;
}

}  // namespace qsyn::cli
