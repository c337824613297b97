#include "qsyn/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsyn/linalg.hpp"

namespace qsyn {
namespace {

// Slack on range checks so decimal renderings of +-pi stay admissible.
constexpr double kRangeSlack = 1e-12;

Matrix reflection_block(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return Matrix{{c, s}, {s, -c}};
}

Matrix pump_nominal_block() { return Matrix{{1.0, 0.0}, {0.0, -1.0}}; }

}  // namespace

std::string_view to_string(Decomposition d) {
  switch (d) {
    case Decomposition::kPassive:
      return "passive";
    case Decomposition::kActive:
      return "active";
    case Decomposition::kNominal:
      return "nominal";
  }
  return "unknown";
}

Decomposition parse_decomposition(std::string_view name) {
  if (name == "passive") return Decomposition::kPassive;
  if (name == "active") return Decomposition::kActive;
  if (name == "nominal") return Decomposition::kNominal;
  throw ValidationError("unknown decomposition '" + std::string(name) + "'");
}

void validate(const OpoParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.kappa1) || !finite(p.kappa2) || !finite(p.chi) ||
      !finite(p.phase_range.lo) || !finite(p.phase_range.hi) || !finite(p.beta_bound)) {
    throw ValidationError("OPO parameters must be finite");
  }
  if (p.kappa1 <= 0.0 || p.kappa2 <= 0.0) {
    throw ValidationError("decay rates kappa1 and kappa2 must be positive");
  }
  if (p.chi < 0.0) throw ValidationError("pump coefficient chi must be nonnegative");
  const double pi = std::numbers::pi;
  if (p.phase_range.lo > 0.0 || p.phase_range.hi < 0.0 ||
      p.phase_range.lo < -pi - kRangeSlack || p.phase_range.hi > pi + kRangeSlack) {
    throw ValidationError("phase range must satisfy -pi <= lo <= 0 <= hi <= pi");
  }
  if (p.beta_bound < 0.0 || p.beta_bound >= 1.0) {
    throw ValidationError("beta_bound must lie in [0, 1)");
  }
}

UncertainPlant build_plant(const OpoParams& p, Decomposition decomposition) {
  validate(p);
  const Matrix eye = Matrix::identity(2);
  UncertainPlant plant;
  plant.params = p;
  plant.decomposition = decomposition;
  plant.A = -(p.kappa() / 2.0) * eye;
  if (decomposition != Decomposition::kPassive) {
    plant.A += p.chi * pump_nominal_block();
  }
  plant.B1 = std::sqrt(p.kappa2) * eye;
  plant.C1 = std::sqrt(p.kappa2) * eye;
  plant.B2 = std::sqrt(p.kappa1) * eye;
  plant.C2 = std::sqrt(p.kappa1) * eye;
  plant.D1 = -eye;
  plant.D2 = -eye;
  if (decomposition == Decomposition::kNominal) {
    plant.H1 = Matrix(2, 2);
    plant.E1 = Matrix(2, 2);
  } else {
    plant.H1 = p.chi * eye;
    plant.E1 = eye;
  }
  plant.rho = rho_bound(decomposition, p);
  plant.Theta = canonical_theta(2);
  return plant;
}

void validate(const UncertainPlant& plant) {
  const std::size_t n = plant.A.rows();
  if (!plant.A.is_square()) throw ValidationError("A must be square");
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("inconsistent plant: ") + what);
  };
  require(plant.B1.rows() == n && plant.B2.rows() == n, "B rows");
  require(plant.C1.cols() == n && plant.C2.cols() == n, "C cols");
  require(plant.D1.rows() == plant.C1.rows() && plant.D1.cols() == plant.B1.cols(), "D1");
  require(plant.D2.rows() == plant.C2.rows() && plant.D2.cols() == plant.B2.cols(), "D2");
  require(plant.H1.rows() == n && plant.E1.cols() == n && plant.H1.cols() == plant.E1.rows(),
          "H1/E1");
  require(plant.Theta.rows() == n && plant.Theta.cols() == n, "Theta");
  require(plant.rho >= 0.0, "rho must be nonnegative");
  const Matrix theta_sq = plant.Theta * plant.Theta + Matrix::identity(n);
  require((plant.Theta + plant.Theta.transpose()).max_abs() == 0.0 &&
              theta_sq.max_abs() <= 1e-12,
          "Theta must be antisymmetric with Theta^2 = -I");
  require(condition_number(plant.D1.transpose() * plant.D1) < kMaxConditionNumber,
          "D1'D1 must be invertible");
  require(condition_number(plant.D2 * plant.D2.transpose()) < kMaxConditionNumber,
          "D2 D2' must be invertible");
  const bool zero_uncertainty =
      plant.H1.max_abs() == 0.0 && plant.E1.max_abs() == 0.0 && plant.rho == 0.0;
  require((plant.decomposition == Decomposition::kNominal) == zero_uncertainty,
          "nominal tag iff H1 = E1 = 0 and rho = 0");
}

Matrix delta_a(const OpoParams& p, Decomposition decomposition, double dphi,
               double dbeta_ratio) {
  if (!(dphi >= p.phase_range.lo - kRangeSlack && dphi <= p.phase_range.hi + kRangeSlack)) {
    throw ValidationError("dphi = " + std::to_string(dphi) + " outside the phase range");
  }
  if (!(dbeta_ratio >= 0.0 && dbeta_ratio <= p.beta_bound + kRangeSlack)) {
    throw ValidationError("dbeta_ratio = " + std::to_string(dbeta_ratio) +
                          " outside [0, beta_bound]");
  }
  switch (decomposition) {
    case Decomposition::kPassive:
      return (p.chi * (1.0 + dbeta_ratio)) * reflection_block(dphi);
    case Decomposition::kActive:
    case Decomposition::kNominal: {
      // The nominal plant carries no uncertainty model, but the physical
      // deviation from its Delta-phi = 0 operating point is the active one.
      const Matrix deviation =
          reflection_block(dphi) - pump_nominal_block() + dbeta_ratio * reflection_block(dphi);
      return p.chi * deviation;
    }
  }
  throw ValidationError("unknown decomposition");
}

double rho_bound(Decomposition decomposition, const OpoParams& p) {
  switch (decomposition) {
    case Decomposition::kPassive:
      return 1.0 + p.beta_bound;
    case Decomposition::kActive: {
      const double alpha = std::max(std::abs(p.phase_range.lo), std::abs(p.phase_range.hi));
      if (alpha >= std::numbers::pi) return 2.0 + p.beta_bound;
      return std::sqrt(2.0 - 2.0 * std::cos(alpha)) + p.beta_bound;
    }
    case Decomposition::kNominal:
      return 0.0;
  }
  return 0.0;
}

Matrix true_state_matrix(const OpoParams& p, double dphi, double dbeta_ratio) {
  return -(p.kappa() / 2.0) * Matrix::identity(2) +
         (p.chi * (1.0 + dbeta_ratio)) * reflection_block(dphi);
}

}  // namespace qsyn
