// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace bpr {

/// Dense real symmetric matrix. Symmetry is exact: every constructor either
/// checks it or produces it by copying the lower triangle into the upper.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  /// Throws std::invalid_argument unless `m` is square and exactly symmetric.
  explicit SymmetricMatrix(Eigen::MatrixXd m);

  static SymmetricMatrix zero(Eigen::Index n);
  static SymmetricMatrix identity(Eigen::Index n);
  static SymmetricMatrix outer(const Eigen::VectorXd& v);
  /// Mirrors the lower triangle of a square matrix onto the upper one.
  static SymmetricMatrix from_lower(Eigen::MatrixXd m);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index j, Eigen::Index k) const { return m_(j, k); }
  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }

  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  SymmetricMatrix& operator-=(const SymmetricMatrix& other);
  SymmetricMatrix& operator*=(double s);

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }
  friend SymmetricMatrix operator*(SymmetricMatrix a, double s) { return a *= s; }

 private:
  struct Unchecked {};
  SymmetricMatrix(Eigen::MatrixXd m, Unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // unit norm
  bool degenerate = false; // set when the input matrix is exactly zero
  int iterations = 0;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iter = 10'000;
  std::uint64_t seed = 0;
};

/// Sum of elementwise products, i.e. Tr(A X) for symmetric arguments.
double trace_inner(const SymmetricMatrix& a, const SymmetricMatrix& x);

/// Dominant (largest-magnitude) eigenpair by power iteration. Stops once the
/// eigen-residual ||Sv - lambda v|| drops below tol * |lambda|.
EigenPair power_iteration(const SymmetricMatrix& s, const PowerIterationOptions& opts = {});

struct Rank1Projection {
  SymmetricMatrix matrix;   // lambda_1 v v^T, or zero when lambda_1 <= 0
  EigenPair pair;           // zero-valued pair when lambda_1 <= 0
  Eigen::VectorXd factor;   // sqrt(lambda_1) v, or the zero vector
};

/// Nearest rank-1 PSD matrix in Frobenius norm. The algebraically largest
/// eigenpair is found by power iteration on S + cI, c a Gershgorin bound on
/// -lambda_min(S).
Rank1Projection rank1_psd_project(const SymmetricMatrix& s, const PowerIterationOptions& opts = {});

/// max(0, -min_i (S_ii - sum_{j != i} |S_ij|)).
double gershgorin_shift(const Eigen::MatrixXd& s);

}  // namespace bpr
