#pragma once

// Reference computations that deliberately avoid the library's own kernels:
// closed-form scalar Riccati roots, a frequency-grid peak search with
// golden-section refinement, power iteration, and random instance generators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qsyn/matrix.hpp"

namespace qsyn::oracle {

using Cx = std::complex<double>;

/// Stabilizing root of 2 a x - b x^2 + c = 0 (closed loop a - b x < 0).
inline double scalar_care_root(double a, double b, double c) {
  if (b == 0.0) return -c / (2.0 * a);
  return (a + std::sqrt(a * a + b * c)) / b;
}

/// Gaussian elimination with partial pivoting on a dense complex system.
inline std::vector<std::vector<Cx>> complex_solve(std::vector<std::vector<Cx>> a,
                                                  std::vector<std::vector<Cx>> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Cx f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      for (std::size_t j = 0; j < m; ++j) b[i][j] -= f * b[k][j];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      Cx s = b[k][j];
      for (std::size_t i = k + 1; i < n; ++i) s -= a[k][i] * b[i][j];
      b[k][j] = s / a[k][k];
    }
  }
  return b;
}

/// Largest singular value of a matrix with at most two columns, from the
/// closed-form eigenvalues of the 2x2 (or 1x1) Gram matrix.
inline double sigma_max_narrow(const std::vector<std::vector<Cx>>& g) {
  const std::size_t p = g.size();
  const std::size_t m = p == 0 ? 0 : g[0].size();
  if (m == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += std::norm(g[i][0]);
    return std::sqrt(s);
  }
  double g11 = 0.0, g22 = 0.0;
  Cx g12 = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    g11 += std::norm(g[i][0]);
    g22 += std::norm(g[i][1]);
    g12 += std::conj(g[i][0]) * g[i][1];
  }
  const double tr = g11 + g22;
  const double det = g11 * g22 - std::norm(g12);
  return std::sqrt(0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det))));
}

/// sigma_max(C (i w I - A)^-1 B) for B with one or two columns.
inline double gain(const Matrix& a, const Matrix& b, const Matrix& c, double w) {
  const std::size_t n = a.rows();
  std::vector<std::vector<Cx>> lhs(n, std::vector<Cx>(n));
  std::vector<std::vector<Cx>> rhs(n, std::vector<Cx>(b.cols()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lhs[i][j] = -a(i, j);
    lhs[i][i] += Cx(0.0, w);
    for (std::size_t j = 0; j < b.cols(); ++j) rhs[i][j] = b(i, j);
  }
  const auto x = complex_solve(lhs, rhs);
  std::vector<std::vector<Cx>> g(c.rows(), std::vector<Cx>(b.cols()));
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < n; ++k) g[i][j] += c(i, k) * x[k][j];
  return sigma_max_narrow(g);
}

/// Peak gain over w >= 0: log grid over [w_lo, w_hi] plus w = 0, then
/// golden-section refinement around the best few grid maxima.
inline double grid_peak(const Matrix& a, const Matrix& b, const Matrix& c,
                        std::size_t points = 4000, double w_lo = 1e-5, double w_hi = 1e5) {
  std::vector<double> w(points);
  for (std::size_t k = 0; k < points; ++k) {
    w[k] = w_lo * std::pow(w_hi / w_lo, static_cast<double>(k) / (points - 1));
  }
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = gain(a, b, c, w[k]);
  double best = std::max(gain(a, b, c, 0.0), *std::max_element(g.begin(), g.end()));

  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < points; ++k) {
    const bool left = k == 0 || g[k] >= g[k - 1];
    const bool right = k + 1 == points || g[k] >= g[k + 1];
    if (left && right) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](auto i, auto j) { return g[i] > g[j]; });
  if (peaks.size() > 4) peaks.resize(4);

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t k : peaks) {
    double lo = k == 0 ? 0.0 : w[k - 1];
    double hi = k + 1 == points ? w[k] : w[k + 1];
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = gain(a, b, c, x1), f2 = gain(a, b, c, x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = gain(a, b, c, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = gain(a, b, c, x2);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

/// sigma_max by power iteration on M^H M from a seeded random start.
inline double power_sigma_max(const ComplexMatrix& m, std::uint64_t seed = 7,
                              int iterations = 5000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Cx> v(m.cols());
  for (auto& x : v) x = Cx(nd(rng), nd(rng));
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<Cx> mv(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) mv[i] += m(i, j) * v[j];
    std::vector<Cx> w(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (std::size_t i = 0; i < m.rows(); ++i) w[j] += std::conj(m(i, j)) * mv[i];
    double nv = 0.0, nmv = 0.0, nw = 0.0;
    for (auto& x : v) nv += std::norm(x);
    for (auto& x : mv) nmv += std::norm(x);
    for (auto& x : w) nw += std::norm(x);
    sigma = std::sqrt(nmv / nv);
    if (nw == 0.0) return sigma;
    for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / std::sqrt(nw);
  }
  return sigma;
}

/// Spectral radius by power iteration (for matrices with a dominant
/// real eigenvalue, such as products of positive semidefinite matrices).
inline double power_spectral_radius(const Matrix& m, int iterations = 2000) {
  std::vector<double> v(m.cols(), 1.0);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> w(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) w[i] += m(i, j) * v[j];
    double n = 0.0;
    for (double x : w) n = std::max(n, std::abs(x));
    if (n == 0.0) return 0.0;
    lambda = n;
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / n;
  }
  return lambda;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c,
                            double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

/// Random matrix shifted so that every Gershgorin disc lies left of -margin.
inline Matrix random_stable(std::mt19937_64& rng, std::size_t n, double margin = 0.1) {
  Matrix a = random_matrix(rng, n, n);
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = a(i, i);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::abs(a(i, j));
    shift = std::max(shift, r);
  }
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= shift + margin;
  return a;
}

/// det(z I - m) by complex elimination.
inline Cx char_poly_at(const Matrix& m, Cx z) {
  const std::size_t n = m.rows();
  std::vector<std::vector<Cx>> a(n, std::vector<Cx>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? z : Cx(0.0)) - m(i, j);
  Cx det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (piv != k) {
      std::swap(a[k], a[piv]);
      det = -det;
    }
    if (a[k][k] == Cx(0.0)) return 0.0;
    det *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const Cx f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return det;
}

}  // namespace qsyn::oracle
