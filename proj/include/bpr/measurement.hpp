// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "bpr/linalg.hpp"

namespace bpr {

using SignalVector = Eigen::VectorXd;

enum class EnsembleKind { kGaussian, kFourierMask, kPlainDft };

std::string_view to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(std::string_view s);

/// m sensing vectors over R^n (real rows) or C^n (complex rows stored as
/// separate real and imaginary parts). The lifted form of row i is
///   A_i = re_i re_i^T + im_i im_i^T,
/// so Tr(A_i X) = |a_i^H x|^2 for X = x x^T. Lifted forms are never stored
/// densely; every lifted operation goes through the row factors.
class SensingEnsemble {
 public:
  SensingEnsemble() = default;
  /// `imag_rows` must be empty for the Gaussian kind and match `real_rows`
  /// in shape otherwise.
  SensingEnsemble(EnsembleKind kind, Eigen::MatrixXd real_rows, Eigen::MatrixXd imag_rows = {});

  EnsembleKind kind() const { return kind_; }
  Eigen::Index n() const { return re_.cols(); }
  Eigen::Index m() const { return re_.rows(); }
  bool is_complex() const { return kind_ != EnsembleKind::kGaussian; }
  const Eigen::MatrixXd& real_rows() const { return re_; }
  const Eigen::MatrixXd& imag_rows() const { return im_; }

  /// |a_i^H x|^2 for every row.
  Eigen::VectorXd quadratic_measurements(const SignalVector& x) const;
  /// Tr(A_i X) for every row.
  Eigen::VectorXd lifted_image(const SymmetricMatrix& x) const;
  /// sum_i w_i A_i; rows with w_i == 0 are skipped.
  SymmetricMatrix lifted_adjoint(const Eigen::VectorXd& w) const;
  SymmetricMatrix lifted_form(Eigen::Index i) const;
  /// Tr(A_i) = ||a_i||^2 for every row.
  Eigen::VectorXd lifted_traces() const;
  /// Ensemble made of the first `rows` sensing vectors.
  SensingEnsemble head(Eigen::Index rows) const;

  /// Gram matrix of the lifted forms, K_ij = Tr(A_i A_j). Computed on first
  /// use and shared by copies; safe to call concurrently.
  const Eigen::MatrixXd& lifted_gram() const;
  /// Tr(A_i sum_j w_j A_j) for every i, via the Gram matrix when it is small
  /// enough to cache (m <= kMaxGramRows) and densely otherwise.
  Eigen::VectorXd lifted_image_of_adjoint(const Eigen::VectorXd& w) const;

  static constexpr Eigen::Index kMaxGramRows = 4096;

 private:
  struct GramCache {
    std::once_flag once;
    Eigen::MatrixXd gram;
  };

  EnsembleKind kind_ = EnsembleKind::kGaussian;
  Eigen::MatrixXd re_;
  Eigen::MatrixXd im_;
  std::shared_ptr<GramCache> gram_ = std::make_shared<GramCache>();
};

/// Binary codes y_i in {-1, +1} plus the parameters that produced them.
struct BinaryMeasurements {
  Eigen::VectorXd codes;
  double tau = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return codes.size(); }
};

SignalVector gen_unit_sphere_signal(Eigen::Index n, std::uint64_t seed);

/// kappa [1.5 sin(4 pi l / n) + 2.5 cos(14 pi l / n)], l = 0..n-1, unit norm.
SignalVector gen_two_sinusoid_signal(Eigen::Index n);

SensingEnsemble gen_gaussian_ensemble(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

/// Rows of [F W_1; ...; F W_k] with F the unnormalized DFT matrix
/// (F_{pq} = exp(-2 pi i p q / n)) and W_j diagonal with i.i.d. Bernoulli(1/2)
/// entries. With randomize == false every W_j is the identity.
SensingEnsemble gen_structured_illumination_ensemble(Eigen::Index n, Eigen::Index k,
                                                     std::uint64_t seed, bool randomize);

/// Prob(chi^2_1 <= t) = erf(sqrt(t / 2)).
double chi1sq_cdf(double t);

/// Inverse of chi1sq_cdf by bisection on [0, 50].
double chi1sq_quantile(double p);

struct IntervalCentroids {
  double low = 0.0;   // E[q | q <= tau], q ~ chi^2_1
  double high = 0.0;  // E[q | q > tau]
};

IntervalCentroids interval_centroids(double tau);

/// Noise level giving the requested input SNR, where
/// SNR_in = sum_i q_i^2 / (m sigma^2).
double sigma_for_snr(const SensingEnsemble& ensemble, const SignalVector& x, double snr_db);

/// y_i = sgn(q_i + xi_i - tau) with xi_i ~ N(0, sigma^2) and sgn(0) = -1.
BinaryMeasurements encode_binary(const SensingEnsemble& ensemble, const SignalVector& x,
                                 double tau, double noise_sigma, std::uint64_t seed);

/// Median of the realized quadratic measurements.
double empirical_median_threshold(const SensingEnsemble& ensemble, const SignalVector& x);

/// Text serialization of an ensemble together with its codes. One header line
///   # kind=<kind> n=<n> m=<m> tau=<tau> sigma=<sigma> seed=<seed>
/// a column line, then one CSV row per measurement: code, re_0..re_{n-1}
/// and, for the Fourier kinds, im_0..im_{n-1}. Doubles are written with 17
/// significant digits so a round trip is exact.
void write_problem_csv(std::ostream& os, const SensingEnsemble& ensemble, const BinaryMeasurements& y);

struct Problem {
  SensingEnsemble ensemble;
  BinaryMeasurements measurements;
};

Problem read_problem_csv(std::istream& is);

void write_signal_csv(std::ostream& os, const SignalVector& x);
SignalVector read_signal_csv(std::istream& is);

}  // namespace bpr
