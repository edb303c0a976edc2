// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "bpr/linalg.hpp"
#include "bpr/measurement.hpp"

namespace bpr {

/// Fisher information of the noisy binary model
///   y_i = sgn(|a_i^H x|^2 + xi_i - tau),  xi_i ~ N(0, sigma^2)
/// at a given x. With q_i = |a_i^H x|^2, v_i = tau - q_i and Phi the noise
/// c.d.f., each code contributes
///   Phi'(v_i)^2 / (Phi(v_i) (1 - Phi(v_i))) * grad q_i grad q_i^T,
/// and grad q_i = 2 A_i x, which is 2 u_i a_i for real rows (u_i = a_i^T x).
struct FisherMatrix {
  SymmetricMatrix info;
  double tau = 0.0;
  double sigma = 0.0;
};

/// Thrown when the Fisher matrix is too ill-conditioned to invert.
class BoundUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Terms with Phi (1 - Phi) below this carry no information and are dropped.
inline constexpr double kSaturationFloor = 1e-300;

FisherMatrix fisher_information(const SensingEnsemble& ensemble, const SignalVector& x, double tau, double sigma);

/// Log-likelihood sum_i ybar_i log(1 - Phi(v_i)) + (1 - ybar_i) log Phi(v_i),
/// ybar_i = (1 + y_i) / 2.
double log_likelihood(const BinaryMeasurements& y, const SensingEnsemble& ensemble, const SignalVector& x,
                      double tau, double sigma);

/// Gradient of log_likelihood with respect to x.
Eigen::VectorXd score(const BinaryMeasurements& y, const SensingEnsemble& ensemble, const SignalVector& x,
                      double tau, double sigma);

/// SRER (dB) of an efficient unbiased estimator: 10 log10(||x||^2 / Tr(I^-1)).
/// Throws BoundUndefined if lambda_min(I) <= 1e-12 lambda_max(I).
double crb_srer(const FisherMatrix& fisher, const SignalVector& x);

}  // namespace bpr
