#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include "cli/config.hpp"
#include "cli/files.hpp"
#include "qsyn/hinf.hpp"
#include "qsyn/realizability.hpp"
#include "qsyn/riccati.hpp"
#include "qsyn/synthesis.hpp"

namespace qsyn::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<double> tol;
  unsigned threads = 1;
};

Config load_with_overrides(const GlobalOptions& g) {
  if (g.config_path.empty()) throw UsageError("--config is required");
  Config cfg = load_config(g.config_path);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (const char* seed = std::getenv("QSYN_SEED"); seed != nullptr && *seed != '\0') {
    const double v = parse_decimal(seed, "QSYN_SEED");
    if (v < 0 || v != std::floor(v) || v > 1.8e19) {
      throw UsageError("QSYN_SEED must be a nonnegative integer");
    }
    cfg.seed = std::stoull(seed);
  }
  return cfg;
}

fs::path prepare_out_dir(const Config& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw UsageError("cannot create " + cfg.out_dir.string() + ": " + ec.message());
  return cfg.out_dir;
}

Decomposition plant_for(ControllerKind k) {
  switch (k) {
    case ControllerKind::kRobustPassive: return Decomposition::kPassive;
    case ControllerKind::kRobustActive: return Decomposition::kActive;
    case ControllerKind::kNominal: return Decomposition::kNominal;
  }
  return Decomposition::kPassive;
}

int cmd_synthesize(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const Config cfg = load_with_overrides(g);
  const UncertainPlant plant = build_plant(cfg.plant, cfg.decomposition);
  ControllerParams ctrl;
  try {
    ctrl = cfg.decomposition == Decomposition::kNominal
               ? synthesize_nominal(plant, cfg.gamma)
               : synthesize(plant, cfg.gamma, cfg.epsilon);
  } catch (const NoStabilizingSolution& e) {
    err << "infeasible: " << e.what() << "\n"
        << existence_check(cfg.plant, cfg.decomposition, cfg.gamma, cfg.epsilon).describe();
    return kExitInfeasible;
  } catch (const CouplingFailure& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }
  const fs::path dir = prepare_out_dir(cfg);
  write_controller(dir / "controller.txt", ctrl);
  out << "wrote " << (dir / "controller.txt").string() << "\n";

  const RealizedController realized = augment_noise(ctrl, plant.Theta);
  write_realized(dir / "realized.txt", ctrl, realized);
  out << "wrote " << (dir / "realized.txt").string() << "\n";
  out << "pr_residual = " << format_number(realized.pr_residual) << "\n";
  if (realized.cavity) {
    out << "cavity decay rates:";
    for (double k : *realized.cavity) out << " " << format_number(k);
    out << "\n";
  }
  return kExitOk;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::string item;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const std::string t = trim(item);
      if (!t.empty()) values.push_back(parse_decimal(t, what));
      item.clear();
    } else {
      item += text[i];
    }
  }
  return values;
}

int cmd_feasibility(const GlobalOptions& g, double gamma_lo, double gamma_hi, std::size_t n,
                    const std::string& rho_text, std::ostream& out) {
  const Config cfg = load_with_overrides(g);
  if (!(gamma_lo > 0.0) || !(gamma_lo < gamma_hi)) {
    throw UsageError("need 0 < --gamma-lo < --gamma-hi");
  }
  if (n < 1) throw UsageError("--n must be at least 1");
  const std::vector<double> rhos = parse_list(rho_text, "--rho");
  if (rhos.empty()) throw UsageError("--rho needs at least one value");
  for (double r : rhos) {
    if (!(r >= 0.0)) throw UsageError("--rho values must be nonnegative");
  }
  const std::vector<double> gammas =
      n == 1 ? std::vector<double>{gamma_lo} : linspace(gamma_lo, gamma_hi, n);
  const auto rows = epsilon_feasibility(cfg.plant, cfg.decomposition, gammas, rhos, g.threads);
  const fs::path path = prepare_out_dir(cfg) / "feasibility.csv";
  write_text(path, feasibility_csv(rows));
  out << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g, const std::vector<std::string>& files, std::ostream& out) {
  const Config cfg = load_with_overrides(g);
  if (files.empty()) throw UsageError("sweep needs at least one controller file");
  std::vector<ControllerParams> ctrls;
  for (const auto& f : files) {
    if (!fs::exists(f)) throw UsageError("no such controller file: " + f);
    ctrls.push_back(read_controller(f));
  }
  const fs::path dir = prepare_out_dir(cfg);
  const auto grid = linspace(cfg.plant.phase_range.lo, cfg.plant.phase_range.hi, cfg.phi_points);
  const BetaMode beta =
      cfg.beta_random ? BetaMode::uniform(cfg.seed, cfg.plant.beta_bound) : BetaMode::zero();

  std::vector<fs::path> csvs;
  std::vector<std::string> titles;
  std::set<std::string> used;
  for (std::size_t i = 0; i < ctrls.size(); ++i) {
    const UncertainPlant plant = build_plant(cfg.plant, plant_for(ctrls[i].kind));
    const auto records = sweep(plant, ctrls[i], grid, beta, g.tol.value_or(kDefaultHinfTolerance),
                                 g.threads);
    std::string stem = fs::path(files[i]).stem().string();
    for (int k = 2; !used.insert(stem).second; ++k) {
      stem = fs::path(files[i]).stem().string() + "_" + std::to_string(k);
    }
    const fs::path path = dir / (stem + "_sweep.csv");
    write_text(path, sweep_csv(records));

    double worst = 0.0;
    std::size_t unstable = 0;
    for (const auto& r : records) {
      if (r.norm) worst = std::max(worst, *r.norm);
      else ++unstable;
    }
    out << "wrote " << path.string() << ": max norm " << format_number(worst) << ", "
        << unstable << " unstable of " << records.size() << "\n";
    csvs.push_back(path);
    titles.push_back(std::string(to_string(ctrls[i].kind)));
  }
  if (cfg.emit_plots) {
    const fs::path path = dir / "sweep.gp";
    write_text(path, plot_script(csvs, titles, cfg.gamma, grid.front(), grid.back()));
    out << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_check(const GlobalOptions& g, const std::string& file, std::ostream& out) {
  if (!fs::exists(file)) throw UsageError("no such realized controller file: " + file);
  const RealizedController r = read_realized(file);
  const double tol = g.tol.value_or(kRealizabilityTolerance);
  const PrCheck check = pr_check(r.Ac, r.blocks, r.Cc, r.Theta, tol);
  out << "commutation_residual = " << format_number(check.commutation_residual) << "\n"
      << "pairing_residual = " << format_number(check.pairing_residual) << "\n"
      << "tolerance = " << format_number(tol) << "\n"
      << (check.pass ? "PASS" : "FAIL") << "\n";
  return check.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust coherent H-infinity controller synthesis for a pumped OPO", "qsyn"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Configuration file");
  app.add_option("--out", g.out_dir, "Output directory (overrides [output] directory)");
  app.add_option("--tol", g.tol, "Tolerance (H-infinity bisection, or realizability for check)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* syn = app.add_subcommand("synthesize", "Synthesize and realize the controller");

  double gamma_lo = 0.0, gamma_hi = 0.0;
  std::size_t n = 50;
  std::string rho_text;
  auto* feas = app.add_subcommand("feasibility", "Tabulate the feasible epsilon interval");
  feas->add_option("--gamma-lo", gamma_lo)->required();
  feas->add_option("--gamma-hi", gamma_hi)->required();
  feas->add_option("--n", n, "Number of gamma grid points");
  feas->add_option("--rho", rho_text, "Comma separated rho values")->required();

  std::vector<std::string> controller_files;
  auto* sw = app.add_subcommand("sweep", "Frozen-uncertainty H-infinity sweep");
  sw->add_option("controllers", controller_files, "Controller files")->required();

  std::string realized_file;
  auto* chk = app.add_subcommand("check", "Physical-realizability check");
  chk->add_option("realized", realized_file, "Realized controller file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qsyn: " << e.what() << "\n";
    return kExitUsage;
  }
  if (g.tol && !(*g.tol > 0.0)) {
    err << "qsyn: --tol must be positive\n";
    return kExitUsage;
  }

  try {
    if (syn->parsed()) return cmd_synthesize(g, out, err);
    if (feas->parsed()) return cmd_feasibility(g, gamma_lo, gamma_hi, n, rho_text, out);
    if (sw->parsed()) return cmd_sweep(g, controller_files, out);
    if (chk->parsed()) return cmd_check(g, realized_file, out);
  } catch (const UsageError& e) {
    err << "qsyn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "qsyn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "qsyn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NoStabilizingSolution& e) {
    err << "qsyn: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const CouplingFailure& e) {
    err << "qsyn: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NotRealizable& e) {
    err << "qsyn: not realizable: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "qsyn: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace qsyn::cli
