#include "qsyn/synthesis.hpp"

#include <string>

#include "qsyn/linalg.hpp"

namespace qsyn {

std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kRobustPassive:
      return "passive";
    case ControllerKind::kRobustActive:
      return "active";
    case ControllerKind::kNominal:
      return "nominal";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(std::string_view name) {
  switch (parse_decomposition(name)) {
    case Decomposition::kPassive:
      return ControllerKind::kRobustPassive;
    case Decomposition::kActive:
      return ControllerKind::kRobustActive;
    case Decomposition::kNominal:
      return ControllerKind::kNominal;
  }
  throw ValidationError("unknown controller kind");
}

double coupling_radius(const RiccatiSolution& x, const RiccatiSolution& y) {
  if (x.X.rows() != y.X.rows() || x.X.cols() != y.X.cols()) {
    throw DimensionError("coupling_radius: X and Y dimensions differ");
  }
  return spectral_radius(x.X * y.X);
}

ControllerParams synthesize(const UncertainPlant& plant, double gamma, double epsilon) {
  auto [primal, dual] = assemble_pair(plant, gamma, epsilon);
  ControllerParams c;
  c.X = solve_care(primal);
  c.Y = solve_care(dual);
  c.gamma = gamma;
  c.epsilon = epsilon;
  c.rho = plant.rho;
  switch (plant.decomposition) {
    case Decomposition::kPassive:
      c.kind = ControllerKind::kRobustPassive;
      break;
    case Decomposition::kActive:
      c.kind = ControllerKind::kRobustActive;
      break;
    case Decomposition::kNominal:
      c.kind = ControllerKind::kNominal;
      break;
  }
  c.coupling = coupling_radius(c.X, c.Y);
  if (!(c.coupling < 1.0)) {
    throw CouplingFailure("coupling condition fails: spectral radius of XY = " +
                              std::to_string(c.coupling),
                          c.coupling);
  }

  const Matrix& X = c.X.X;
  const Matrix& Y = c.Y.X;
  const std::size_t n = plant.state_dim();
  const double g2inv = 1.0 / (gamma * gamma);
  const Matrix g_inv = inverse(plant.D1.transpose() * plant.D1);
  // Measurement-noise weighting of the scaled problem: gamma^-2 D2 D2'.
  const Matrix noise_weight_inv = inverse(g2inv * (plant.D2 * plant.D2.transpose()));

  c.Cc = -(g_inv * (plant.B1.transpose() * X + plant.D1.transpose() * plant.C1));
  try {
    c.Bc = solve_linear(Matrix::identity(n) - Y * X,
                        Y * plant.C2.transpose() + g2inv * (plant.B2 * plant.D2.transpose())) *
           noise_weight_inv;
  } catch (const SingularMatrixError&) {
    throw CouplingFailure("I - YX is singular", c.coupling);
  }
  const Matrix feedthrough =
      (epsilon * plant.rho * plant.rho) * (plant.H1 * plant.H1.transpose()) +
      g2inv * ((plant.B2 - c.Bc * plant.D2) * plant.B2.transpose());
  c.Ac = plant.A + plant.B1 * c.Cc - c.Bc * plant.C2 + feedthrough * X;
  return c;
}

ControllerParams synthesize_nominal(const UncertainPlant& plant, double gamma) {
  if (plant.decomposition != Decomposition::kNominal || plant.rho != 0.0 ||
      plant.H1.max_abs() != 0.0 || plant.E1.max_abs() != 0.0) {
    throw ValidationError("synthesize_nominal requires a plant without uncertainty");
  }
  // With H1 = E1 = 0 and rho = 0 the epsilon terms vanish identically.
  return synthesize(plant, gamma, 1.0);
}

}  // namespace qsyn
