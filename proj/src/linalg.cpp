// SPDX-License-Identifier: Apache-2.0
#include "bpr/linalg.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bpr/rng.hpp"

namespace bpr {

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("SymmetricMatrix: matrix is not square");
  for (Eigen::Index k = 0; k < m_.cols(); ++k)
    for (Eigen::Index j = k + 1; j < m_.rows(); ++j)
      if (m_(j, k) != m_(k, j)) throw std::invalid_argument("SymmetricMatrix: matrix is not symmetric");
}

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index n) {
  return {Eigen::MatrixXd::Zero(n, n), Unchecked{}};
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index n) {
  return {Eigen::MatrixXd::Identity(n, n), Unchecked{}};
}

SymmetricMatrix SymmetricMatrix::outer(const Eigen::VectorXd& v) {
  // v_j v_k and v_k v_j round identically, so the product is exactly symmetric.
  return {v * v.transpose(), Unchecked{}};
}

SymmetricMatrix SymmetricMatrix::from_lower(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymmetricMatrix: matrix is not square");
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return {std::move(m), Unchecked{}};
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  if (other.dim() != dim()) throw std::invalid_argument("SymmetricMatrix: dimension mismatch");
  m_ += other.m_;
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other) {
  if (other.dim() != dim()) throw std::invalid_argument("SymmetricMatrix: dimension mismatch");
  m_ -= other.m_;
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double trace_inner(const SymmetricMatrix& a, const SymmetricMatrix& x) {
  if (a.dim() != x.dim()) throw std::invalid_argument("trace_inner: dimension mismatch");
  return a.matrix().cwiseProduct(x.matrix()).sum();
}

namespace {

Eigen::VectorXd random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

}  // namespace

EigenPair power_iteration(const SymmetricMatrix& s, const PowerIterationOptions& opts) {
  const Eigen::Index n = s.dim();
  if (n < 1) throw std::invalid_argument("power_iteration: empty matrix");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("power_iteration: tol must be positive");

  const Eigen::MatrixXd& a = s.matrix();
  const double scale = a.norm();

  EigenPair out;
  out.vector = random_unit_vector(n, opts.seed);
  if (scale == 0.0) {
    out.degenerate = true;
    return out;
  }

  const double null_level = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  bool redrawn = false;
  Eigen::VectorXd v = out.vector;
  Eigen::VectorXd w(n);
  double rho = 0.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    w.noalias() = a * v;
    rho = v.dot(w);
    const double wnorm = w.norm();
    if (wnorm <= null_level) {
      // Start vector (numerically) in the null space.
      if (redrawn) break;
      redrawn = true;
      v = random_unit_vector(n, mix_seed(opts.seed, 0x9e3779b97f4a7c15ULL));
      continue;
    }
    const double residual = (w - rho * v).norm();
    if (residual <= opts.tol * std::abs(rho)) {
      ++it;
      break;
    }
    v = w / wnorm;
  }
  out.value = rho;
  out.vector = v;
  out.iterations = it;
  return out;
}

double gershgorin_shift(const Eigen::MatrixXd& s) {
  double lower = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double off = s.row(i).cwiseAbs().sum() - std::abs(s(i, i));
    lower = std::min(lower, s(i, i) - off);
  }
  return std::max(0.0, -lower);
}

Rank1Projection rank1_psd_project(const SymmetricMatrix& s, const PowerIterationOptions& opts) {
  const Eigen::Index n = s.dim();
  const double shift = gershgorin_shift(s.matrix());
  Eigen::MatrixXd shifted = s.matrix();
  shifted.diagonal().array() += shift;

  EigenPair top = power_iteration(SymmetricMatrix::from_lower(std::move(shifted)), opts);
  const double lambda = top.value - shift;

  Rank1Projection out;
  if (!(lambda > 0.0)) {
    out.matrix = SymmetricMatrix::zero(n);
    out.pair.value = 0.0;
    out.pair.vector = Eigen::VectorXd::Zero(n);
    out.pair.degenerate = top.degenerate;
    out.pair.iterations = top.iterations;
    out.factor = Eigen::VectorXd::Zero(n);
    return out;
  }
  top.value = lambda;
  out.factor = std::sqrt(lambda) * top.vector;
  out.matrix = SymmetricMatrix::outer(out.factor);
  out.pair = std::move(top);
  return out;
}

}  // namespace bpr
