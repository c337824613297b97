#pragma once

#include <string_view>

#include "qsyn/matrix.hpp"

namespace qsyn {

/// Where the nominal pump term lives in the uncertainty factorization.
///  - kPassive: A = -(kappa/2) I and the whole pump term is uncertain.
///  - kActive:  A includes the Delta-phi = 0 pump term; only the deviation is
///              uncertain.
///  - kNominal: the Delta-phi = 0 plant with no uncertainty (rho = 0).
enum class Decomposition { kPassive, kActive, kNominal };

std::string_view to_string(Decomposition d);
Decomposition parse_decomposition(std::string_view name);

struct PhaseRange {
  double lo = -3.141592653589793;
  double hi = 3.141592653589793;
};

/// Optical parametric oscillator with a fluctuating pump.
struct OpoParams {
  double kappa1 = 0.0;  // decay rate of the measured-output mirror
  double kappa2 = 0.0;  // decay rate of the control mirror
  double chi = 0.0;     // pump coefficient chi^(2) * beta
  PhaseRange phase_range;
  double beta_bound = 0.0;  // upper bound on Delta-beta / beta

  double kappa() const { return kappa1 + kappa2; }
};

/// Throws ValidationError when an invariant of p fails.
void validate(const OpoParams& p);

/// Quadrature state-space plant
///   dx = (A + dA) x dt + B1 du + B2 dw,  z = C1 x + D1 u,  y = C2 x + D2 w
/// with dA = H1 F E1 and F'F <= rho^2 I.
struct UncertainPlant {
  Matrix A, B1, B2, C1, D1, C2, D2;
  Matrix H1, E1;
  double rho = 0.0;
  Matrix Theta;
  Decomposition decomposition = Decomposition::kPassive;
  OpoParams params;

  std::size_t state_dim() const { return A.rows(); }
};

/// Dimension, invertibility and tag-consistency checks.
void validate(const UncertainPlant& plant);

UncertainPlant build_plant(const OpoParams& p, Decomposition decomposition);

/// Frozen uncertainty matrix dA at phase deviation dphi and amplitude ratio
/// dbeta_ratio. Arguments outside the admissible ranges raise ValidationError.
Matrix delta_a(const OpoParams& p, Decomposition decomposition, double dphi,
               double dbeta_ratio);

/// Norm bound rho used in synthesis for this decomposition.
double rho_bound(Decomposition decomposition, const OpoParams& p);

/// The true plant state matrix -(kappa/2) I + chi (1 + r) [[cos, sin], [sin, -cos]].
/// Independent of the decomposition; used to cross-check A + delta_a.
Matrix true_state_matrix(const OpoParams& p, double dphi, double dbeta_ratio);

}  // namespace qsyn
