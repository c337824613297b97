#pragma once

#include <optional>
#include <vector>

#include "qsyn/matrix.hpp"
#include "qsyn/synthesis.hpp"

namespace qsyn {

/// Absolute pass tolerance for the realizability residuals.
inline constexpr double kRealizabilityTolerance = 1e-3;

struct PrCheck {
  double commutation_residual = 0.0;  // ||Ac Th + Th Ac' + sum Bi diag(J) Bi'||_max
  double pairing_residual = 0.0;      // ||Bv1 - Th Cc' diag(J)||_max, up to pair swap
  bool pass = false;
};

/// Checks both physical-realizability conditions. blocks are the controller
/// input blocks in order [Bc, Bv1, Bv2, ...]; the output-pairing condition
/// applies to blocks[1] (or requires Th Cc' diag(J) = 0 when absent).
PrCheck pr_check(const Matrix& Ac, const std::vector<Matrix>& blocks, const Matrix& Cc,
                 const Matrix& Theta, double tol = kRealizabilityTolerance);

struct RealizedController {
  Matrix Ac;
  std::vector<Matrix> blocks;  // [Bc, Bv1, Bv2]; Bv2 may have zero columns
  Matrix Cc;
  Matrix Theta;
  double pr_residual = 0.0;
  double pairing_residual = 0.0;
  std::optional<std::vector<double>> cavity;  // mirror decay rates
};

/// Adds the quantum-noise channels that make the controller physically
/// realizable: Bv1 from the output-pairing condition and Bv2 from a canonical
/// skew factorization of the remaining commutation defect. Throws
/// NotRealizable when the defect needs a channel of negative orientation.
/// Fills the cavity rates when the result has passive-cavity structure.
RealizedController augment_noise(const ControllerParams& c, const Matrix& Theta);

/// Mirror decay rates kappa_i = b_i^2 of an empty cavity realizing the
/// controller. Throws StructureError unless Ac and every block are scalar
/// multiples of the identity with -2 a = sum kappa_i (within 1e-3). Absent
/// (zero) channels contribute no mirror.
std::vector<double> extract_cavity(const RealizedController& r);

}  // namespace qsyn
