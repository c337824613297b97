#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qsyn/linalg.hpp"
#include "qsyn/matrix.hpp"
#include "qsyn/model.hpp"

namespace qsyn {

enum class RiccatiSide { kPrimal, kDual, kGeneric };

/// Continuous-time algebraic Riccati equation in the canonical form
///   Ahat' X + X Ahat - X Bhat X + Chat = 0.
/// Bhat and Chat are symmetrized on construction. Dual equations are stored
/// with the transposed state matrix so that the same solver applies.
class RiccatiProblem {
 public:
  RiccatiProblem(Matrix ahat, Matrix bhat, Matrix chat,
                 RiccatiSide side = RiccatiSide::kGeneric);

  const Matrix& ahat() const { return ahat_; }
  const Matrix& bhat() const { return bhat_; }
  const Matrix& chat() const { return chat_; }
  RiccatiSide side() const { return side_; }

  /// [[Ahat, -Bhat], [-Chat, -Ahat']].
  Matrix hamiltonian() const;

  Matrix residual(const Matrix& x) const;

  /// max(||Ahat||, ||Bhat||, ||Chat||) in the max-abs norm.
  double coefficient_scale() const;

 private:
  Matrix ahat_, bhat_, chat_;
  RiccatiSide side_;
};

struct RiccatiSolution {
  Matrix X;
  double residual_norm = 0.0;
  std::vector<Complex> closed_loop_eigs;  // spectrum of Ahat - Bhat X
};

/// Stabilizing solution from the stable invariant subspace of the
/// Hamiltonian. Throws NoStabilizingSolution when the Hamiltonian has
/// imaginary-axis eigenvalues or the leading basis block is singular.
RiccatiSolution solve_care(const RiccatiProblem& problem,
                           double axis_tol = kImaginaryAxisTolerance);

/// The primal (X) and dual (Y) equations of the robust central controller for
/// attenuation gamma and scaling epsilon.
std::pair<RiccatiProblem, RiccatiProblem> assemble_pair(const UncertainPlant& plant,
                                                        double gamma, double epsilon);

/// One closed-form existence inequality; value is the slack (left side minus
/// right side), so satisfied means value > 0 (strict) or value >= 0.
struct Inequality {
  std::string name;
  double value = 0.0;
  bool strict = false;
  bool satisfied = false;
};

/// Which Riccati equation the closed-form criteria speak about.
enum class ExistenceBranch {
  kPrimal,  // kappa2 - kappa1 / gamma^2 > 0: criteria for the X equation
  kDual,    // otherwise: criteria for the Y equation
};

struct ExistenceReport {
  ExistenceBranch branch = ExistenceBranch::kPrimal;
  double branch_value = 0.0;  // kappa2 - kappa1 / gamma^2
  double rho = 0.0;
  std::vector<Inequality> inequalities;

  bool satisfied() const;
  std::string describe() const;
};

/// Closed-form existence criteria for the OPO plant. Passive and nominal
/// plants have scalar per-axis state matrices; the active plant splits into
/// two axes with state matrix -kappa/2 +- chi.
ExistenceReport existence_check(const OpoParams& p, Decomposition decomposition,
                                double gamma, double epsilon);
ExistenceReport existence_check(const OpoParams& p, Decomposition decomposition,
                                double gamma, double epsilon, double rho);

struct FeasibilityRow {
  double gamma = 0.0;
  double rho = 0.0;
  double eps_lower = 0.0;  // exclusive unless lower_closed
  double eps_upper = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

/// Interval of epsilon > 0 on which every inequality of existence_check holds.
FeasibilityRow epsilon_interval(const OpoParams& p, Decomposition decomposition,
                                double gamma, double rho);

/// One row per (gamma, rho) in gamma-major order. Rows are independent and
/// computed concurrently when threads > 1.
std::vector<FeasibilityRow> epsilon_feasibility(const OpoParams& p,
                                                Decomposition decomposition,
                                                const std::vector<double>& gamma_grid,
                                                const std::vector<double>& rho_values,
                                                unsigned threads = 1);

/// Supremum of feasible epsilon by bisection on existence_check over
/// [1e-12, 1e6] (60 halvings). Returns 0 when the lower end is infeasible.
double eps_upper_by_bisection(const OpoParams& p, Decomposition decomposition,
                              double gamma, double rho);

}  // namespace qsyn
