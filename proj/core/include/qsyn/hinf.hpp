#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsyn/model.hpp"
#include "qsyn/synthesis.hpp"

namespace qsyn {

/// Default absolute bisection tolerance on the H-infinity norm.
inline constexpr double kDefaultHinfTolerance = 1e-6;

/// Interconnection of the plant (at a frozen uncertainty) and a controller,
/// from the disturbance w to the controlled output z. The direct feedthrough
/// is identically zero.
struct ClosedLoop {
  Matrix Acl, Bcl, Ccl;
  std::size_t plant_state_dim = 0;
  std::size_t controller_state_dim = 0;
};

/// Closed loop with an explicit state perturbation dA and controller matrices.
ClosedLoop close_loop(const UncertainPlant& plant, const Matrix& dA, const Matrix& Ac,
                      const Matrix& Bc, const Matrix& Cc);

/// Closed loop at frozen (dphi, dbeta_ratio).
ClosedLoop close_loop(const UncertainPlant& plant, const ControllerParams& ctrl, double dphi,
                      double dbeta_ratio);

/// sigma_max(Ccl (i w I - Acl)^-1 Bcl).
double frequency_gain(const ClosedLoop& cl, double omega);

/// H-infinity norm by bisection on the imaginary-axis eigenvalues of the
/// Hamiltonian [[Acl, g^-2 Bcl Bcl'], [-Ccl' Ccl, -Acl']]. The result is within
/// tol * max(1, g) of the true norm. Throws UnstableLoop for a non-Hurwitz Acl.
double hinf_norm(const ClosedLoop& cl, double tol = kDefaultHinfTolerance);

struct SweepRecord {
  double dphi = 0.0;
  double dbeta_ratio = 0.0;
  bool stable = false;
  std::optional<double> norm;  // present iff stable
};

/// How Delta-beta/beta is chosen per sweep point.
struct BetaMode {
  bool random = false;
  std::uint64_t seed = 0;
  double bound = 0.0;

  static BetaMode zero() { return {}; }
  static BetaMode uniform(std::uint64_t seed, double bound) { return {true, seed, bound}; }

  /// Deterministic draw for grid index i: uniform on [0, bound].
  double draw(std::size_t index) const;
};

/// Frozen-uncertainty evaluation at every grid point; records follow grid order.
std::vector<SweepRecord> sweep(const UncertainPlant& plant, const ControllerParams& ctrl,
                               const std::vector<double>& phi_grid, const BetaMode& beta_mode,
                               double tol = kDefaultHinfTolerance, unsigned threads = 1);

/// n points evenly spaced on [lo, hi] inclusive (a single point at 0 when n == 1).
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct CertificateReport {
  bool found = false;        // a positive definite candidate P exists
  double worst_eig = 0.0;    // max over the grid of lambda_max of the quadratic form
  std::size_t points = 0;    // grid evaluations
  Matrix P;

  bool pass() const { return found && worst_eig < 0.0; }
};

/// Margin added to the candidate Lyapunov equation.
inline constexpr double kCertificateMargin = 1e-8;

/// Sampled quadratic-stability certificate. A candidate P comes from the
/// scaled closed-loop Riccati equation at the nominal point; the quadratic
/// form (Acl + dAcl)' P + P (Acl + dAcl) + g^-2 P Bcl Bcl' P + Ccl' Ccl is then
/// checked at n_grid phases (and both ends of the amplitude range).
/// Throws CertificateUnavailable when no candidate P can be constructed.
CertificateReport quadratic_stability_certificate(const UncertainPlant& plant,
                                                  const ControllerParams& ctrl, double gamma,
                                                  double epsilon, std::size_t n_grid);

}  // namespace qsyn
