#include "qsyn/hinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "qsyn/linalg.hpp"
#include "qsyn/riccati.hpp"

namespace qsyn {
namespace {

constexpr std::size_t kBracketGridPoints = 1000;
constexpr int kMaxBracketDoublings = 60;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Matrix gain_hamiltonian(const ClosedLoop& cl, double g) {
  const double g2inv = 1.0 / (g * g);
  return block2x2(cl.Acl, g2inv * (cl.Bcl * cl.Bcl.transpose()),
                  -(cl.Ccl.transpose() * cl.Ccl), -cl.Acl.transpose());
}

// True when g is below the norm (the Hamiltonian has imaginary eigenvalues).
bool below_norm(const ClosedLoop& cl, double g) {
  return has_imaginary_axis_eigenvalue(gain_hamiltonian(cl, g));
}

double grid_peak(const ClosedLoop& cl) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& ev : eigenvalues(cl.Acl)) {
    const double m = std::abs(ev);
    if (m > 0.0) lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (!(hi > 0.0)) {
    lo = 1.0;
    hi = 1.0;
  }
  const double log_lo = std::log10(lo) - 3.0;
  const double log_hi = std::log10(hi) + 3.0;
  double peak = frequency_gain(cl, 0.0);
  for (std::size_t k = 0; k < kBracketGridPoints; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(kBracketGridPoints - 1);
    peak = std::max(peak, frequency_gain(cl, std::pow(10.0, log_lo + t * (log_hi - log_lo))));
  }
  return peak;
}

}  // namespace

ClosedLoop close_loop(const UncertainPlant& plant, const Matrix& dA, const Matrix& Ac,
                      const Matrix& Bc, const Matrix& Cc) {
  const std::size_t n = plant.state_dim();
  const std::size_t nc = Ac.rows();
  if (dA.rows() != n || dA.cols() != n || !Ac.is_square() || Bc.rows() != nc ||
      Bc.cols() != plant.C2.rows() || Cc.cols() != nc || Cc.rows() != plant.B1.cols()) {
    throw ValidationError("close_loop: controller dimensions do not match the plant");
  }
  ClosedLoop cl;
  cl.plant_state_dim = n;
  cl.controller_state_dim = nc;
  cl.Acl = block2x2(plant.A + dA, plant.B1 * Cc, Bc * plant.C2, Ac);
  cl.Bcl = vstack(plant.B2, Bc * plant.D2);
  cl.Ccl = hstack(plant.C1, plant.D1 * Cc);
  return cl;
}

ClosedLoop close_loop(const UncertainPlant& plant, const ControllerParams& ctrl, double dphi,
                      double dbeta_ratio) {
  return close_loop(plant, delta_a(plant.params, plant.decomposition, dphi, dbeta_ratio),
                    ctrl.Ac, ctrl.Bc, ctrl.Cc);
}

double frequency_gain(const ClosedLoop& cl, double omega) {
  const std::size_t n = cl.Acl.rows();
  ComplexMatrix lhs = to_complex(-cl.Acl);
  for (std::size_t i = 0; i < n; ++i) lhs(i, i) += Complex(0.0, omega);
  const ComplexMatrix x = solve_linear(lhs, to_complex(cl.Bcl));
  return max_singular_value(to_complex(cl.Ccl) * x);
}

double hinf_norm(const ClosedLoop& cl, double tol) {
  if (!(tol > 0.0)) throw ValidationError("hinf_norm: tolerance must be positive");
  if (!is_hurwitz(cl.Acl)) throw UnstableLoop("closed loop is not stable");
  if (cl.Bcl.max_abs() == 0.0 || cl.Ccl.max_abs() == 0.0) return 0.0;

  double lo = grid_peak(cl);  // every sampled gain is a lower bound
  if (lo == 0.0) return 0.0;
  double hi = 2.0 * lo;
  int doublings = 0;
  while (below_norm(cl, hi)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxBracketDoublings) {
      throw NumericalFailure("hinf_norm: could not bracket the norm");
    }
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (below_norm(cl, mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double BetaMode::draw(std::size_t index) const {
  if (!random) return 0.0;
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
  const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
  return bound * unit;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {0.0};
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    v[k] = lo + t * (hi - lo);
  }
  v.back() = hi;
  return v;
}

std::vector<SweepRecord> sweep(const UncertainPlant& plant, const ControllerParams& ctrl,
                               const std::vector<double>& phi_grid, const BetaMode& beta_mode,
                               double tol, unsigned threads) {
  std::vector<SweepRecord> records(phi_grid.size());
  detail::parallel_for(records.size(), threads, [&](std::size_t i) {
    SweepRecord rec;
    rec.dphi = phi_grid[i];
    rec.dbeta_ratio = beta_mode.draw(i);
    const ClosedLoop cl = close_loop(plant, ctrl, rec.dphi, rec.dbeta_ratio);
    rec.stable = is_hurwitz(cl.Acl);
    if (rec.stable) rec.norm = hinf_norm(cl, tol);
    records[i] = rec;
  });
  return records;
}

CertificateReport quadratic_stability_certificate(const UncertainPlant& plant,
                                                  const ControllerParams& ctrl, double gamma,
                                                  double epsilon, std::size_t n_grid) {
  if (!(gamma > 0.0) || !(epsilon > 0.0) || n_grid == 0) {
    throw ValidationError("certificate: gamma, epsilon and n_grid must be positive");
  }
  const std::size_t n = plant.state_dim();
  const ClosedLoop nominal =
      close_loop(plant, Matrix(n, n), ctrl.Ac, ctrl.Bc, ctrl.Cc);
  if (!is_hurwitz(nominal.Acl)) {
    throw ValidationError("certificate: nominal closed loop is not stable");
  }
  const std::size_t nc = nominal.controller_state_dim;
  const Matrix h_cl = vstack(plant.H1, Matrix(nc, plant.H1.cols()));
  const Matrix e_cl = hstack(plant.E1, Matrix(plant.E1.rows(), nc));
  const double g2inv = 1.0 / (gamma * gamma);
  const std::size_t ncl = n + nc;

  const RiccatiProblem candidate(
      nominal.Acl,
      -(g2inv * (nominal.Bcl * nominal.Bcl.transpose()) +
        (epsilon * plant.rho * plant.rho) * (h_cl * h_cl.transpose())),
      (1.0 / epsilon) * (e_cl.transpose() * e_cl) + nominal.Ccl.transpose() * nominal.Ccl +
          kCertificateMargin * Matrix::identity(ncl));

  CertificateReport report;
  try {
    report.P = solve_care(candidate).X;
  } catch (const Error& e) {
    throw CertificateUnavailable(std::string("no candidate Lyapunov matrix: ") + e.what());
  }
  if (!(symmetric_eigen(report.P).values.front() > 0.0)) {
    throw CertificateUnavailable("candidate Lyapunov matrix is not positive definite");
  }
  report.found = true;

  const Matrix& P = report.P;
  const Matrix fixed = g2inv * (P * nominal.Bcl * nominal.Bcl.transpose() * P) +
                       nominal.Ccl.transpose() * nominal.Ccl;
  std::vector<double> ratios{0.0};
  if (plant.params.beta_bound > 0.0) ratios.push_back(plant.params.beta_bound);
  report.worst_eig = -std::numeric_limits<double>::infinity();
  for (double phi : linspace(plant.params.phase_range.lo, plant.params.phase_range.hi, n_grid)) {
    for (double r : ratios) {
      Matrix a = nominal.Acl;
      Matrix da = delta_a(plant.params, plant.decomposition, phi, r);
      a.set_block(0, 0, a.block(0, 0, n, n) + da);
      const Matrix form = a.transpose() * P + P * a + fixed;
      report.worst_eig = std::max(report.worst_eig, symmetric_eigen(form).values.back());
      ++report.points;
    }
  }
  return report;
}

}  // namespace qsyn
