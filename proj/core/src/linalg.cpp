#include "qsyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qsyn {
namespace {

constexpr int kMaxQrSweepsPerEigenvalue = 30;
constexpr int kMaxSignIterations = 100;
constexpr int kMaxJacobiSweeps = 60;

double sign_of(double magnitude, double s) {
  return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// LU factorization with partial pivoting, stored in place.
template <typename T>
struct Lu {
  BasicMatrix<T> lu;
  std::vector<std::size_t> perm;
  int parity = 1;
  bool singular = false;

  explicit Lu(BasicMatrix<T> a) : lu(std::move(a)), perm(lu.rows()) {
    lu.require_square("LU factorization");
    const std::size_t n = lu.rows();
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu(i, k)) > best) {
          best = std::abs(lu(i, k));
          piv = i;
        }
      }
      if (best == 0.0) {
        singular = true;
        continue;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
        std::swap(perm[k], perm[piv]);
        parity = -parity;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        lu(i, k) /= lu(k, k);
        const T f = lu(i, k);
        if (f == T{0}) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
  }

  BasicMatrix<T> solve(const BasicMatrix<T>& b) const {
    const std::size_t n = lu.rows();
    if (b.rows() != n) throw DimensionError("solve: right-hand side row mismatch");
    if (singular) throw SingularMatrixError("matrix is singular");
    BasicMatrix<T> x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        T s = b(perm[i], c);
        for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x(j, c);
        x(i, c) = s;
      }
      for (std::size_t ii = n; ii-- > 0;) {
        T s = x(ii, c);
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x(j, c);
        x(ii, c) = s / lu(ii, ii);
      }
    }
    return x;
  }

  BasicMatrix<T> inverse() const {
    return solve(BasicMatrix<T>::identity(lu.rows()));
  }
};

template <typename T>
BasicMatrix<T> checked_solve(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  a.require_square("solve_linear");
  if (b.rows() != a.rows()) {
    throw DimensionError("solve_linear: " + a.shape_string() + " vs rhs " +
                         b.shape_string());
  }
  Lu<T> lu(a);
  if (lu.singular) throw SingularMatrixError("solve_linear: matrix is singular");
  const double cond = a.norm1() * lu.inverse().norm1();
  if (!(cond <= kMaxConditionNumber)) {
    throw SingularMatrixError("solve_linear: condition number " +
                              std::to_string(cond) + " exceeds limit");
  }
  return lu.solve(b);
}

// Orthogonal reduction to upper Hessenberg form by Householder reflections.
void reduce_to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = -sign_of(norm, a(k + 1, k));
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    // A <- (I - 2vv'/v'v) A
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A (I - 2vv'/v'v)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s = 2.0 * s / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
std::vector<Complex> hessenberg_qr(Matrix a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(n, 0.0), wi(n, 0.0);
  auto A = [&a](int i, int j) -> double& {
    return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) + s == s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      double x = A(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = A(nn - 1, nn - 1);
        double w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = z;
            wi[nn] = -z;
          }
          nn -= 2;
        } else {
          if (its == kMaxQrSweepsPerEigenvalue * n) {
            throw NumericalFailure("eigenvalues: QR iteration did not converge");
          }
          if (its == 10 || its == 20) {
            // Exceptional shift to break cycling.
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            const double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) +
                               std::abs(A(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = 0.0;
            if (i != m + 2) A(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = A(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) A(k, k - 1) = -A(k, k - 1);
            } else {
              A(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = A(k, j) + q * A(k + 1, j);
              if (k != nn - 1) {
                p += r * A(k + 2, j);
                A(k + 2, j) -= p * z;
              }
              A(k + 1, j) -= p * y;
              A(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * A(i, k) + y * A(i, k + 1);
              if (k != nn - 1) {
                p += z * A(i, k + 2);
                A(i, k + 2) -= p * r;
              }
              A(i, k + 1) -= p * q;
              A(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<Complex> out(n);
  for (int i = 0; i < n; ++i) out[i] = Complex(wr[i], wi[i]);
  // Present conjugate pairs with the positive imaginary part first.
  for (int i = 0; i + 1 < n; ++i) {
    if (out[i].imag() < 0.0 && out[i + 1].imag() > 0.0 &&
        out[i] == std::conj(out[i + 1])) {
      std::swap(out[i], out[i + 1]);
      ++i;
    }
  }
  return out;
}

// Matrix sign function by scaled Newton iteration.
Matrix matrix_sign(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix z = m;
  bool scaling = true;
  for (int it = 0; it < kMaxSignIterations; ++it) {
    Lu<double> lu(z);
    if (lu.singular) throw NumericalFailure("matrix sign: singular iterate");
    const Matrix zinv = lu.inverse();
    double c = 1.0;
    if (scaling) {
      double logdet = 0.0;
      for (std::size_t i = 0; i < n; ++i) logdet += std::log(std::abs(lu.lu(i, i)));
      c = std::exp(-logdet / static_cast<double>(n));
    }
    Matrix next = 0.5 * (c * z + (1.0 / c) * zinv);
    const double diff = (next - z).norm1();
    const double scale = next.norm1();
    z = std::move(next);
    if (diff <= 1e-2 * scale) scaling = false;
    if (diff <= 1e-14 * scale) return z;
    if (!scaling && it > 0 && diff <= 1e-11 * scale) {
      // Quadratic convergence: one more step reaches working accuracy.
      Lu<double> last(z);
      if (last.singular) throw NumericalFailure("matrix sign: singular iterate");
      return 0.5 * (z + last.inverse());
    }
  }
  throw NumericalFailure("matrix sign: Newton iteration did not converge");
}

// First k columns of Q from Householder QR with column pivoting.
Matrix pivoted_qr_basis(Matrix a, std::size_t k) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::vector<std::vector<double>> reflectors;
  std::vector<double> colnorm(cols);
  for (std::size_t step = 0; step < k; ++step) {
    for (std::size_t j = step; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = step; i < rows; ++i) s += a(i, j) * a(i, j);
      colnorm[j] = s;
    }
    std::size_t piv = step;
    for (std::size_t j = step + 1; j < cols; ++j)
      if (colnorm[j] > colnorm[piv]) piv = j;
    if (piv != step)
      for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, step), a(i, piv));
    const double norm = std::sqrt(colnorm[piv]);
    std::vector<double> v(rows, 0.0);
    if (norm == 0.0) throw NumericalFailure("stable subspace: rank deficient projector");
    const double alpha = -sign_of(norm, a(step, step));
    for (std::size_t i = step; i < rows; ++i) v[i] = a(i, step);
    v[step] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = step; i < rows; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 > 0.0) {
      for (std::size_t j = step; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = step; i < rows; ++i) s += v[i] * a(i, j);
        s = 2.0 * s / vnorm2;
        for (std::size_t i = step; i < rows; ++i) a(i, j) -= s * v[i];
      }
    }
    reflectors.push_back(std::move(v));
  }
  // Q = H_0 H_1 ... H_{k-1} applied to the first k unit vectors.
  Matrix q(rows, k);
  for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
  for (std::size_t r = reflectors.size(); r-- > 0;) {
    const auto& v = reflectors[r];
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += v[i] * q(i, j);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = 0; i < rows; ++i) q(i, j) -= s * v[i];
    }
  }
  return q;
}

// Hestenes one-sided Jacobi; returns column norms after orthogonalization.
std::vector<double> one_sided_jacobi_singular_values(Matrix a) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = sign_of(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a(i, j) * a(i, j);
    sv[j] = std::sqrt(s);
  }
  return sv;
}

}  // namespace

std::vector<Complex> eigenvalues(const Matrix& m) {
  m.require_square("eigenvalues");
  if (!m.all_finite()) throw ValidationError("eigenvalues: non-finite entries");
  if (m.rows() == 0) return {};
  Matrix h = m;
  reduce_to_hessenberg(h);
  return hessenberg_qr(std::move(h));
}

bool has_imaginary_axis_eigenvalue(const Matrix& m, double axis_tol) {
  const double bound = axis_tol * std::max(m.norm1(), std::numeric_limits<double>::min());
  for (const auto& ev : eigenvalues(m))
    if (std::abs(ev.real()) < bound) return true;
  return false;
}

Matrix stable_subspace(const Matrix& m, double axis_tol) {
  m.require_square("stable_subspace");
  const double bound = axis_tol * std::max(m.norm1(), std::numeric_limits<double>::min());
  std::size_t k = 0;
  for (const auto& ev : eigenvalues(m)) {
    if (std::abs(ev.real()) < bound) {
      throw ImaginaryAxisEigenvalue(
          "stable_subspace: eigenvalue (" + std::to_string(ev.real()) + ", " +
          std::to_string(ev.imag()) + ") lies on the imaginary axis");
    }
    if (ev.real() < 0.0) ++k;
  }
  const std::size_t n = m.rows();
  if (k == 0) return Matrix(n, 0);
  if (k == n) return Matrix::identity(n);
  const Matrix projector = 0.5 * (Matrix::identity(n) - matrix_sign(m));
  return pivoted_qr_basis(projector, k);
}

Matrix solve_linear(const Matrix& a, const Matrix& b) { return checked_solve(a, b); }

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
  return checked_solve(a, b);
}

Matrix inverse(const Matrix& a) {
  return checked_solve(a, Matrix::identity(a.rows()));
}

double condition_number(const Matrix& a) {
  a.require_square("condition_number");
  Lu<double> lu(a);
  if (lu.singular) return std::numeric_limits<double>::infinity();
  return a.norm1() * lu.inverse().norm1();
}

double determinant(const Matrix& a) {
  a.require_square("determinant");
  Lu<double> lu(a);
  if (lu.singular) return 0.0;
  double d = lu.parity;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= lu.lu(i, i);
  return d;
}

double max_singular_value(const ComplexMatrix& m) {
  if (!m.all_finite()) throw ValidationError("max_singular_value: non-finite entries");
  if (m.empty()) return 0.0;
  // Real embedding [[Re, -Im], [Im, Re]] has each singular value twice.
  const std::size_t r = m.rows();
  const std::size_t c = m.cols();
  Matrix e(2 * r, 2 * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const Complex v = m(i, j);
      e(i, j) = v.real();
      e(i, j + c) = -v.imag();
      e(i + r, j) = v.imag();
      e(i + r, j + c) = v.real();
    }
  const auto sv = one_sided_jacobi_singular_values(std::move(e));
  return *std::max_element(sv.begin(), sv.end());
}

double max_singular_value(const Matrix& m) {
  if (!m.all_finite()) throw ValidationError("max_singular_value: non-finite entries");
  if (m.empty()) return 0.0;
  const auto sv = one_sided_jacobi_singular_values(m);
  return *std::max_element(sv.begin(), sv.end());
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
  Matrix a = symmetrize(m);
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * std::max(1.0, a.frobenius_norm() * a.frobenius_norm())) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& ev : eigenvalues(m)) r = std::max(r, std::abs(ev));
  return r;
}

double spectral_abscissa(const Matrix& m) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(m)) r = std::max(r, ev.real());
  return r;
}

bool is_hurwitz(const Matrix& m) { return m.rows() == 0 || spectral_abscissa(m) < 0.0; }

}  // namespace qsyn
