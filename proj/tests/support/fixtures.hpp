#pragma once

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qsyn/model.hpp"

namespace qsyn::testing {

inline OpoParams opo_params() {
  OpoParams p;
  p.kappa1 = 0.0011;
  p.kappa2 = 0.8264;
  p.chi = 0.0414;
  return p;
}

inline OpoParams with_range(OpoParams p, double lo, double hi) {
  p.phase_range = {lo, hi};
  return p;
}

inline OpoParams with_beta(OpoParams p, double bound) {
  p.beta_bound = bound;
  return p;
}

inline ::testing::AssertionResult diag_near(const Matrix& m, double d0, double d1, double tol) {
  if (m.rows() != 2 || m.cols() != 2) {
    return ::testing::AssertionFailure() << "expected 2x2, got " << m.shape_string();
  }
  const double off = std::max(std::abs(m(0, 1)), std::abs(m(1, 0)));
  if (std::abs(m(0, 0) - d0) > tol || std::abs(m(1, 1) - d1) > tol || off > tol) {
    return ::testing::AssertionFailure()
           << "got [[" << m(0, 0) << ", " << m(0, 1) << "], [" << m(1, 0) << ", " << m(1, 1)
           << "]], want diag(" << d0 << ", " << d1 << ") within " << tol;
  }
  return ::testing::AssertionSuccess();
}

inline ::testing::AssertionResult matrix_near(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return ::testing::AssertionFailure() << a.shape_string() << " vs " << b.shape_string();
  }
  const double d = (a - b).max_abs();
  if (d > tol) return ::testing::AssertionFailure() << "max abs difference " << d << " > " << tol;
  return ::testing::AssertionSuccess();
}

}  // namespace qsyn::testing
