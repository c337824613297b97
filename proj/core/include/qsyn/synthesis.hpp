#pragma once

#include "qsyn/model.hpp"
#include "qsyn/riccati.hpp"

namespace qsyn {

enum class ControllerKind { kRobustPassive, kRobustActive, kNominal };

std::string_view to_string(ControllerKind k);
ControllerKind parse_controller_kind(std::string_view name);

/// Central controller dxc = Ac xc dt + Bc dy, u = Cc xc, together with the
/// Riccati solutions and design constants it was built from.
struct ControllerParams {
  Matrix Ac, Bc, Cc;
  RiccatiSolution X, Y;
  double gamma = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  double coupling = 0.0;  // spectral radius of X Y
  ControllerKind kind = ControllerKind::kRobustPassive;
};

/// Spectral radius of X Y.
double coupling_radius(const RiccatiSolution& x, const RiccatiSolution& y);

/// Robust central controller for attenuation gamma and scaling epsilon.
/// Throws NoStabilizingSolution from either Riccati equation and
/// CouplingFailure when rho(XY) >= 1.
ControllerParams synthesize(const UncertainPlant& plant, double gamma, double epsilon);

/// Standard central H-infinity controller for a plant with no uncertainty
/// model (rho = 0, H1 = E1 = 0). Epsilon does not enter.
ControllerParams synthesize_nominal(const UncertainPlant& plant, double gamma);

}  // namespace qsyn
