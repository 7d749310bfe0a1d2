#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace folia {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Exact 2x2 integer matrix; the holonomy and deck computations of the
/// suspension model never leave integer arithmetic.
struct IntMatrix2 {
  std::array<std::int64_t, 4> m{1, 0, 0, 1};  // row-major a b / c d

  constexpr std::int64_t a() const { return m[0]; }
  constexpr std::int64_t b() const { return m[1]; }
  constexpr std::int64_t c() const { return m[2]; }
  constexpr std::int64_t d() const { return m[3]; }
  constexpr std::int64_t operator()(int i, int j) const { return m[2 * i + j]; }

  constexpr std::int64_t det() const { return a() * d() - b() * c(); }
  constexpr std::int64_t trace() const { return a() + d(); }

  constexpr IntMatrix2 transpose() const { return {{a(), c(), b(), d()}}; }

  /// Inverse of a unimodular matrix; only valid when det() == 1.
  constexpr IntMatrix2 unimodular_inverse() const { return {{d(), -b(), -c(), a()}}; }

  static constexpr IntMatrix2 identity() { return {}; }

  friend constexpr IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y) {
    return {{x.a() * y.a() + x.b() * y.c(), x.a() * y.b() + x.b() * y.d(),
             x.c() * y.a() + x.d() * y.c(), x.c() * y.b() + x.d() * y.d()}};
  }
  friend constexpr bool operator==(const IntMatrix2&, const IntMatrix2&) = default;

  /// A^k for any integer k (negative powers use the unimodular inverse).
  IntMatrix2 power(std::int64_t k) const;

  Mat to_dense() const;
  std::array<std::int64_t, 2> apply(std::array<std::int64_t, 2> v) const {
    return {a() * v[0] + b() * v[1], c() * v[0] + d() * v[1]};
  }
};

/// Max-norm of a matrix (largest absolute entry).
inline double max_norm(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Columns of `basis` stacked as a matrix.
Mat stack_columns(const std::vector<Vec>& basis, int dim);
std::vector<Vec> split_columns(const Mat& m);

/// Numerical rank with a relative singular-value cutoff.
int numerical_rank(const Mat& m, double rel_tol = 1e-9);

}  // namespace folia
