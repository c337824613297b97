#include "qsyn/realizability.hpp"

#include <cmath>
#include <string>

#include "qsyn/linalg.hpp"

namespace qsyn {
namespace {

constexpr double kZeroDefect = 1e-10;

Matrix input_commutation(std::size_t cols) {
  if (cols % 2 != 0) {
    throw DimensionError("input blocks must have an even number of columns (quadrature pairs)");
  }
  return canonical_theta(cols);
}

// Swaps the two quadratures of every pair.
Matrix pair_swap(std::size_t n) {
  Matrix s(n, n);
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    s(k, k + 1) = 1.0;
    s(k + 1, k) = 1.0;
  }
  return s;
}

Matrix commutation_defect(const Matrix& Ac, const std::vector<Matrix>& blocks,
                          const Matrix& Theta) {
  Matrix r = Ac * Theta + Theta * Ac.transpose();
  for (const auto& b : blocks) {
    if (b.cols() == 0) continue;
    r += b * input_commutation(b.cols()) * b.transpose();
  }
  return r;
}

Matrix pairing_target(const Matrix& Cc, const Matrix& Theta) {
  return Theta * Cc.transpose() * input_commutation(Cc.rows());
}

double scalar_of_identity(const Matrix& m, double tol) {
  if (!m.is_square() || m.rows() == 0) return std::nan("");
  const double a = m(0, 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double expect = i == j ? a : 0.0;
      if (std::abs(m(i, j) - expect) > tol) return std::nan("");
    }
  return a;
}

// B with B diag(J) B' = S for skew-symmetric S, built pair by pair from the
// eigenvectors of S'S. Each pair (u, v) contributes s (u v' - v u'), which
// needs a channel of positive orientation u' Theta v >= 0.
Matrix skew_factor(const Matrix& S, const Matrix& Theta) {
  const std::size_t n = S.rows();
  const SymmetricEigen eig = symmetric_eigen(S.transpose() * S);
  const double top = eig.values.empty() ? 0.0 : eig.values.back();
  std::vector<Matrix> used;
  std::vector<Matrix> columns;

  auto orthogonalize = [&used](Matrix v) {
    for (const auto& q : used) {
      const double d = (q.transpose() * v)(0, 0);
      v -= d * q;
    }
    return v;
  };

  for (std::size_t k = n; k-- > 0;) {
    const double lambda = eig.values[k];
    if (lambda <= 1e-20 * std::max(top, 1e-300) || lambda <= 0.0) break;
    Matrix q1 = orthogonalize(eig.vectors.col(k));
    const double q1n = q1.frobenius_norm();
    if (q1n < 0.5) continue;
    q1 *= 1.0 / q1n;
    const double s = std::sqrt(lambda);
    Matrix q2 = orthogonalize((1.0 / s) * (S * q1));
    q2 -= (q1.transpose() * q2)(0, 0) * q1;
    q2 *= 1.0 / q2.frobenius_norm();
    // S restricted to span(q1, q2) equals s (u v' - v u') with u = q2, v = q1.
    Matrix u = q2;
    Matrix v = q1;
    const double orientation = (u.transpose() * Theta * v)(0, 0);
    if (orientation < -1e-12) {
      throw NotRealizable(
          "commutation defect needs a noise channel with negative coupling b^2 = " +
              std::to_string(-s),
          -s);
    }
    // Rotate within the pair so u aligns with the coordinate it loads most.
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::hypot(u(i, 0), v(i, 0));
      if (r > best_norm + 1e-12) {
        best_norm = r;
        best = i;
      }
    }
    const double cu = u(best, 0) / best_norm;
    const double cv = v(best, 0) / best_norm;
    const Matrix u_rot = cu * u + cv * v;
    const Matrix v_rot = cu * v - cv * u;
    const double scale = std::sqrt(s);
    columns.push_back(scale * u_rot);
    columns.push_back(scale * v_rot);
    used.push_back(q1);
    used.push_back(q2);
  }
  Matrix b(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) b.set_block(0, j, columns[j]);
  return b;
}

}  // namespace

PrCheck pr_check(const Matrix& Ac, const std::vector<Matrix>& blocks, const Matrix& Cc,
                 const Matrix& Theta, double tol) {
  Ac.require_square("pr_check Ac");
  const std::size_t n = Ac.rows();
  if (Theta.rows() != n || Theta.cols() != n || Cc.cols() != n) {
    throw DimensionError("pr_check: inconsistent dimensions");
  }
  for (const auto& b : blocks)
    if (b.rows() != n) throw DimensionError("pr_check: input block row mismatch");

  PrCheck out;
  out.commutation_residual = commutation_defect(Ac, blocks, Theta).max_abs();
  const Matrix target = pairing_target(Cc, Theta);
  if (blocks.size() >= 2) {
    const Matrix& bv1 = blocks[1];
    if (bv1.rows() != target.rows() || bv1.cols() != target.cols()) {
      throw DimensionError("pr_check: Bv1 must be " + target.shape_string());
    }
    const Matrix swapped = pair_swap(n) * target * pair_swap(target.cols());
    out.pairing_residual = std::min((bv1 - target).max_abs(), (bv1 - swapped).max_abs());
  } else {
    out.pairing_residual = target.max_abs();
  }
  out.pass = out.commutation_residual <= tol && out.pairing_residual <= tol;
  return out;
}

RealizedController augment_noise(const ControllerParams& c, const Matrix& Theta) {
  const std::size_t n = c.Ac.rows();
  if (n % 2 != 0) throw ValidationError("controller state dimension must be even");
  if (Theta.rows() != n || Theta.cols() != n) throw DimensionError("Theta dimension mismatch");
  if ((Theta - canonical_theta(n)).max_abs() != 0.0) {
    throw ValidationError("augment_noise requires the canonical commutation matrix");
  }

  RealizedController r;
  r.Ac = c.Ac;
  r.Cc = c.Cc;
  r.Theta = Theta;
  r.blocks.push_back(c.Bc);
  r.blocks.push_back(pairing_target(c.Cc, Theta));

  const Matrix defect = commutation_defect(r.Ac, r.blocks, Theta);
  Matrix bv2(n, 0);
  if (defect.max_abs() > kZeroDefect) {
    const Matrix skew = -0.5 * (defect - defect.transpose());
    bv2 = skew_factor(skew, Theta);
  }
  r.blocks.push_back(bv2);

  const PrCheck check = pr_check(r.Ac, r.blocks, r.Cc, Theta);
  r.pr_residual = check.commutation_residual;
  r.pairing_residual = check.pairing_residual;
  try {
    r.cavity = extract_cavity(r);
  } catch (const StructureError&) {
    r.cavity.reset();
  }
  return r;
}

std::vector<double> extract_cavity(const RealizedController& r) {
  constexpr double kStructureTol = 1e-9;
  const double a = scalar_of_identity(r.Ac, kStructureTol);
  if (std::isnan(a)) throw StructureError("Ac is not a scalar multiple of the identity");
  std::vector<double> kappas;
  double total = 0.0;
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    const Matrix& b = r.blocks[i];
    if (b.cols() == 0 || b.max_abs() == 0.0) continue;  // channel not present
    const double s = scalar_of_identity(b, kStructureTol);
    if (std::isnan(s)) {
      throw StructureError("input block " + std::to_string(i) +
                           " is not a scalar multiple of the identity");
    }
    kappas.push_back(s * s);
    total += s * s;
  }
  if (std::abs(-2.0 * a - total) > kRealizabilityTolerance) {
    throw StructureError("decay rates do not balance the cavity loss: -2a = " +
                         std::to_string(-2.0 * a) + ", sum kappa = " + std::to_string(total));
  }
  return kappas;
}

}  // namespace qsyn
