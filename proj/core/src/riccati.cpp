#include "qsyn/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel.hpp"

namespace qsyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficients of the OPO existence inequalities, reduced per axis. Every
// plant this library builds is diagonal, so each Riccati equation splits into
// scalar equations 2 a x - b x^2 + c = 0 whose Hamiltonian eigenvalues are
// +-sqrt(a^2 + b c).
struct AxisModel {
  std::vector<double> primal_a;  // diagonal of A - B1 G^-1 D1' C1
  std::vector<double> dual_a;    // diagonal of A - B2 D2' Gamma^-1 C2
  double h2 = 0.0;               // H1 H1' per axis (chi^2 or 0)
  double e2 = 0.0;               // E1' E1 per axis (1 or 0)
};

AxisModel axis_model(const OpoParams& p, Decomposition decomposition) {
  AxisModel m;
  const double base = -p.kappa() / 2.0;
  std::vector<double> a;
  if (decomposition == Decomposition::kPassive) {
    a = {base, base};
  } else {
    a = {base + p.chi, base - p.chi};
  }
  for (double v : a) {
    m.primal_a.push_back(v + p.kappa2);
    m.dual_a.push_back(v + p.kappa1);
  }
  if (decomposition != Decomposition::kNominal) {
    m.h2 = p.chi * p.chi;
    m.e2 = 1.0;
  }
  // Equal axes produce identical inequalities; report one.
  if (m.primal_a[0] == m.primal_a[1]) {
    m.primal_a.pop_back();
    m.dual_a.pop_back();
  }
  return m;
}

// One inequality alpha + beta * eps (> or >=) 0, after clearing any 1/eps.
struct AffineInEps {
  std::string name;
  double alpha = 0.0;
  double beta = 0.0;
  bool strict = false;
  // Evaluated slack as reported; sign agrees with alpha + beta * eps.
  double reported(double eps) const { return scale_back ? (alpha + beta * eps) / eps : alpha + beta * eps; }
  bool scale_back = false;
};

struct BranchModel {
  ExistenceBranch branch;
  double branch_value;
  std::vector<AffineInEps> inequalities;
};

std::string axis_label(const char* base, std::size_t axes, std::size_t i) {
  if (axes == 1) return base;
  return std::string(base) + " [axis " + std::to_string(i + 1) + "]";
}

BranchModel branch_model(const OpoParams& p, Decomposition decomposition, double gamma,
                         double rho) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (!(rho >= 0.0)) throw ValidationError("rho must be nonnegative");
  const AxisModel axes = axis_model(p, decomposition);
  const double g2 = gamma * gamma;
  const double b0 = p.kappa2 - p.kappa1 / g2;
  const double hr2 = axes.h2 * rho * rho;
  const bool strict_dual = decomposition != Decomposition::kPassive;

  BranchModel model{b0 > 0.0 ? ExistenceBranch::kPrimal : ExistenceBranch::kDual, b0, {}};
  if (model.branch == ExistenceBranch::kPrimal) {
    // Bhat = b0 - eps h^2 rho^2 > 0 (positive definite and controllable).
    model.inequalities.push_back(
        {"kappa2 - kappa1/gamma^2 - chi^2 eps rho^2 > 0",
         b0, -hr2, true});
    // 4 eps gamma^2 (a^2 + Bhat Chat) >= 0 with Chat = e^2 / eps.
    for (std::size_t i = 0; i < axes.primal_a.size(); ++i) {
      const double a = axes.primal_a[i];
      model.inequalities.push_back(
          {axis_label("primal Hamiltonian has no imaginary eigenvalue", axes.primal_a.size(), i),
           4.0 * g2 * axes.e2 * b0, 4.0 * g2 * (a * a - axes.e2 * hr2), false});
    }
  } else {
    // gamma^2 kappa1 - kappa2 - e^2 / eps >= 0, multiplied through by eps.
    const double d0 = g2 * p.kappa1 - p.kappa2;
    AffineInEps psd{strict_dual ? "kappa1 gamma^2 - kappa2 - 1/eps > 0"
                                  : "kappa1 gamma^2 - kappa2 - 1/eps >= 0",
                    -axes.e2, d0, strict_dual};
    psd.scale_back = true;
    model.inequalities.push_back(psd);
    // 4 (a^2 + Bhat Chat) >= 0 with Bhat = d0 - e^2/eps, Chat = eps h^2 rho^2.
    for (std::size_t i = 0; i < axes.dual_a.size(); ++i) {
      const double a = axes.dual_a[i];
      model.inequalities.push_back(
          {axis_label("dual Hamiltonian has no imaginary eigenvalue", axes.dual_a.size(), i),
           4.0 * (a * a - hr2 * axes.e2), 4.0 * hr2 * d0, false});
    }
  }
  return model;
}

bool holds(double value, bool strict) { return strict ? value > 0.0 : value >= 0.0; }

}  // namespace

RiccatiProblem::RiccatiProblem(Matrix ahat, Matrix bhat, Matrix chat, RiccatiSide side)
    : ahat_(std::move(ahat)), bhat_(std::move(bhat)), chat_(std::move(chat)), side_(side) {
  ahat_.require_square("Riccati Ahat");
  const std::size_t n = ahat_.rows();
  if (bhat_.rows() != n || bhat_.cols() != n || chat_.rows() != n || chat_.cols() != n) {
    throw DimensionError("Riccati coefficients must all be " + ahat_.shape_string());
  }
  bhat_ = symmetrize(bhat_);
  chat_ = symmetrize(chat_);
}

Matrix RiccatiProblem::hamiltonian() const {
  return block2x2(ahat_, -bhat_, -chat_, -ahat_.transpose());
}

Matrix RiccatiProblem::residual(const Matrix& x) const {
  return ahat_.transpose() * x + x * ahat_ - x * bhat_ * x + chat_;
}

double RiccatiProblem::coefficient_scale() const {
  return std::max({ahat_.max_abs(), bhat_.max_abs(), chat_.max_abs()});
}

// X = U2 U1^-1 from the stable invariant subspace of the Hamiltonian.
Matrix stable_solution(const RiccatiProblem& problem, double axis_tol) {
  const std::size_t n = problem.ahat().rows();
  Matrix basis;
  try {
    basis = stable_subspace(problem.hamiltonian(), axis_tol);
  } catch (const ImaginaryAxisEigenvalue& e) {
    throw NoStabilizingSolution(std::string("Hamiltonian has an imaginary-axis eigenvalue: ") +
                                e.what());
  }
  if (basis.cols() != n) {
    throw NoStabilizingSolution("Hamiltonian stable subspace has dimension " +
                                std::to_string(basis.cols()) + ", expected " +
                                std::to_string(n));
  }
  const Matrix u1 = basis.block(0, 0, n, n);
  const Matrix u2 = basis.block(n, 0, n, n);
  Matrix x;
  try {
    // X U1 = U2  <=>  U1' X' = U2'
    x = solve_linear(u1.transpose(), u2.transpose()).transpose();
  } catch (const SingularMatrixError&) {
    throw NoStabilizingSolution(
        "stable subspace basis has a singular leading block (no stabilizing solution)");
  }
  return x;
}

RiccatiSolution solve_care(const RiccatiProblem& problem, double axis_tol) {
  const std::size_t n = problem.ahat().rows();
  Matrix x;
  if (n > 1 && is_diagonal(problem.ahat()) && is_diagonal(problem.bhat()) &&
      is_diagonal(problem.chat())) {
    // Decoupled axes: solve each scalar equation so the result stays exactly diagonal.
    x = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const RiccatiProblem axis(Matrix{{problem.ahat()(i, i)}}, Matrix{{problem.bhat()(i, i)}},
                                Matrix{{problem.chat()(i, i)}}, problem.side());
      x(i, i) = stable_solution(axis, axis_tol)(0, 0);
    }
  } else {
    x = stable_solution(problem, axis_tol);
  }
  RiccatiSolution sol;
  sol.X = symmetrize(x);
  sol.residual_norm = problem.residual(sol.X).max_abs();
  sol.closed_loop_eigs = eigenvalues(problem.ahat() - problem.bhat() * sol.X);
  for (const auto& ev : sol.closed_loop_eigs) {
    if (!(ev.real() < 0.0)) {
      throw NoStabilizingSolution("solution is not stabilizing: closed-loop eigenvalue " +
                                  std::to_string(ev.real()));
    }
  }
  const double xn = sol.X.max_abs();
  const double bound = 1e-8 * (1.0 + xn) * (1.0 + xn) * problem.coefficient_scale();
  if (!(sol.residual_norm <= bound)) {
    throw NumericalFailure("CARE residual " + std::to_string(sol.residual_norm) +
                           " exceeds bound " + std::to_string(bound));
  }
  return sol;
}

std::pair<RiccatiProblem, RiccatiProblem> assemble_pair(const UncertainPlant& plant,
                                                        double gamma, double epsilon) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be positive");
  }
  validate(plant);
  const Matrix& A = plant.A;
  const Matrix& B1 = plant.B1;
  const Matrix& B2 = plant.B2;
  const Matrix& C1 = plant.C1;
  const Matrix& C2 = plant.C2;
  const Matrix& D1 = plant.D1;
  const Matrix& D2 = plant.D2;
  const double g2inv = 1.0 / (gamma * gamma);
  const double rho2 = plant.rho * plant.rho;

  Matrix g_inv, gamma0_inv;
  try {
    g_inv = inverse(D1.transpose() * D1);
    gamma0_inv = inverse(D2 * D2.transpose());
  } catch (const SingularMatrixError&) {
    throw ValidationError("D1'D1 and D2 D2' must be invertible");
  }
  const Matrix hh = plant.H1 * plant.H1.transpose();
  const Matrix ee = plant.E1.transpose() * plant.E1;

  RiccatiProblem primal(
      A - B1 * g_inv * D1.transpose() * C1,
      B1 * g_inv * B1.transpose() - (epsilon * rho2) * hh - g2inv * (B2 * B2.transpose()),
      C1.transpose() * (Matrix::identity(D1.rows()) - D1 * g_inv * D1.transpose()) * C1 +
          (1.0 / epsilon) * ee,
      RiccatiSide::kPrimal);

  RiccatiProblem dual(
      (A - B2 * D2.transpose() * gamma0_inv * C2).transpose(),
      (gamma * gamma) * (C2.transpose() * gamma0_inv * C2) - (1.0 / epsilon) * ee -
          C1.transpose() * C1,
      g2inv * (B2 * (Matrix::identity(D2.cols()) - D2.transpose() * gamma0_inv * D2) *
               B2.transpose()) +
          (epsilon * rho2) * hh,
      RiccatiSide::kDual);

  return {std::move(primal), std::move(dual)};
}

bool ExistenceReport::satisfied() const {
  return std::all_of(inequalities.begin(), inequalities.end(),
                     [](const Inequality& q) { return q.satisfied; });
}

std::string ExistenceReport::describe() const {
  std::ostringstream os;
  os << "branch: kappa2 - kappa1/gamma^2 = " << branch_value
     << (branch == ExistenceBranch::kPrimal ? " > 0 (criteria for the X equation)"
                                            : " <= 0 (criteria for the Y equation)")
     << "\nrho = " << rho << '\n';
  for (const auto& q : inequalities) {
    os << "  " << (q.satisfied ? "ok  " : "FAIL") << "  " << q.name << "  slack = " << q.value
       << '\n';
  }
  return os.str();
}

ExistenceReport existence_check(const OpoParams& p, Decomposition decomposition,
                                double gamma, double epsilon) {
  return existence_check(p, decomposition, gamma, epsilon, rho_bound(decomposition, p));
}

ExistenceReport existence_check(const OpoParams& p, Decomposition decomposition,
                                double gamma, double epsilon, double rho) {
  validate(p);
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const BranchModel model = branch_model(p, decomposition, gamma, rho);
  ExistenceReport report;
  report.branch = model.branch;
  report.branch_value = model.branch_value;
  report.rho = rho;
  for (const auto& q : model.inequalities) {
    const double value = q.reported(epsilon);
    report.inequalities.push_back({q.name, value, q.strict, holds(value, q.strict)});
  }
  return report;
}

FeasibilityRow epsilon_interval(const OpoParams& p, Decomposition decomposition,
                                double gamma, double rho) {
  validate(p);
  const BranchModel model = branch_model(p, decomposition, gamma, rho);
  FeasibilityRow row{gamma, rho, 0.0, kInf, false};
  bool lower_closed = false;
  bool upper_closed = false;
  for (const auto& q : model.inequalities) {
    if (q.beta > 0.0) {
      const double bound = -q.alpha / q.beta;
      if (bound > row.eps_lower || (bound == row.eps_lower && q.strict)) {
        lower_closed = !q.strict;
        row.eps_lower = std::max(row.eps_lower, bound);
      }
    } else if (q.beta < 0.0) {
      const double bound = q.alpha / -q.beta;
      if (bound < row.eps_upper || (bound == row.eps_upper && q.strict)) {
        upper_closed = !q.strict;
        row.eps_upper = std::min(row.eps_upper, bound);
      }
    } else if (!holds(q.alpha, q.strict)) {
      return row;  // infeasible for every epsilon
    }
  }
  if (row.eps_lower == 0.0) lower_closed = false;  // epsilon > 0 always
  row.feasible = row.eps_lower < row.eps_upper ||
                 (row.eps_lower == row.eps_upper && lower_closed && upper_closed);
  return row;
}

std::vector<FeasibilityRow> epsilon_feasibility(const OpoParams& p,
                                                Decomposition decomposition,
                                                const std::vector<double>& gamma_grid,
                                                const std::vector<double>& rho_values,
                                                unsigned threads) {
  if (gamma_grid.empty() || rho_values.empty()) {
    throw ValidationError("gamma grid and rho list must be nonempty");
  }
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw ValidationError("gamma values must be positive");
  std::vector<FeasibilityRow> rows(gamma_grid.size() * rho_values.size());
  detail::parallel_for(rows.size(), threads, [&](std::size_t k) {
    rows[k] = epsilon_interval(p, decomposition, gamma_grid[k / rho_values.size()],
                               rho_values[k % rho_values.size()]);
  });
  return rows;
}

double eps_upper_by_bisection(const OpoParams& p, Decomposition decomposition, double gamma,
                              double rho) {
  auto feasible = [&](double eps) {
    return existence_check(p, decomposition, gamma, eps, rho).satisfied();
  };
  double lo = 1e-12;
  double hi = 1e6;
  if (!feasible(lo)) return 0.0;
  if (feasible(hi)) return hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qsyn
