#pragma once

#include <vector>

#include "qsyn/matrix.hpp"

namespace qsyn {

/// Relative distance from the imaginary axis (scaled by the 1-norm of the
/// matrix) below which an eigenvalue is treated as lying on the axis.
inline constexpr double kImaginaryAxisTolerance = 1e-9;

/// Reciprocal-condition limit used by solve_linear and inverse.
inline constexpr double kMaxConditionNumber = 1e12;

/// All eigenvalues of a real square matrix, with multiplicity. Hessenberg
/// reduction followed by Francis double-shift QR; complex pairs are returned
/// adjacent with the positive imaginary part first.
std::vector<Complex> eigenvalues(const Matrix& m);

/// Orthonormal basis (n x k) of the invariant subspace for the eigenvalues
/// with negative real part. Throws ImaginaryAxisEigenvalue when some
/// eigenvalue has |Re| < axis_tol * ||m||_1.
Matrix stable_subspace(const Matrix& m, double axis_tol = kImaginaryAxisTolerance);

/// True when some eigenvalue has |Re| < axis_tol * ||m||_1.
bool has_imaginary_axis_eigenvalue(const Matrix& m,
                                   double axis_tol = kImaginaryAxisTolerance);

/// x with a * x = b. Throws SingularMatrixError when the 1-norm condition
/// number of a exceeds kMaxConditionNumber.
Matrix solve_linear(const Matrix& a, const Matrix& b);
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

Matrix inverse(const Matrix& a);

/// ||a||_1 * ||a^-1||_1; +inf for an exactly singular matrix.
double condition_number(const Matrix& a);

double determinant(const Matrix& a);

double max_singular_value(const ComplexMatrix& m);
double max_singular_value(const Matrix& m);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns, orthonormal
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix (the input is
/// symmetrized first).
SymmetricEigen symmetric_eigen(const Matrix& m);

double spectral_radius(const Matrix& m);

/// Largest real part over the spectrum.
double spectral_abscissa(const Matrix& m);

bool is_hurwitz(const Matrix& m);

}  // namespace qsyn
