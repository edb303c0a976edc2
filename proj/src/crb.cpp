// SPDX-License-Identifier: Apache-2.0
#include "bpr/crb.hpp"

#include <cmath>
#include <numbers>

namespace bpr {

namespace {

struct NoiseModel {
  double sigma;

  // Upper and lower tails are evaluated separately through erfc so that
  // neither loses precision to cancellation.
  double cdf(double v) const { return 0.5 * std::erfc(-v / (sigma * std::numbers::sqrt2)); }
  double sf(double v) const { return 0.5 * std::erfc(v / (sigma * std::numbers::sqrt2)); }
  double pdf(double v) const {
    const double z = v / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  }
};

void check_inputs(const SensingEnsemble& ensemble, const SignalVector& x, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("noise sigma must be positive");
  if (x.size() != ensemble.n()) throw std::invalid_argument("signal dimension does not match the ensemble");
}

// Row i is grad_x |a_i^H x|^2 = 2 (re_i re_i^T + im_i im_i^T) x.
Eigen::MatrixXd measurement_gradients(const SensingEnsemble& ensemble, const SignalVector& x) {
  Eigen::MatrixXd g = 2.0 * (ensemble.real_rows() * x).asDiagonal() * ensemble.real_rows();
  if (ensemble.is_complex()) g += 2.0 * (ensemble.imag_rows() * x).asDiagonal() * ensemble.imag_rows();
  return g;
}

}  // namespace

FisherMatrix fisher_information(const SensingEnsemble& ensemble, const SignalVector& x, double tau, double sigma) {
  check_inputs(ensemble, x, sigma);
  const NoiseModel noise{sigma};
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  Eigen::VectorXd weight(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double v = tau - q(i);
    const double var = noise.cdf(v) * noise.sf(v);
    const double d = noise.pdf(v);
    weight(i) = var < kSaturationFloor ? 0.0 : d * d / var;
  }
  const Eigen::MatrixXd g = measurement_gradients(ensemble, x);
  Eigen::MatrixXd info = (weight.asDiagonal() * g).transpose() * g;
  return {SymmetricMatrix::from_lower(std::move(info)), tau, sigma};
}

double log_likelihood(const BinaryMeasurements& y, const SensingEnsemble& ensemble, const SignalVector& x,
                      double tau, double sigma) {
  check_inputs(ensemble, x, sigma);
  if (y.size() != ensemble.m()) throw std::invalid_argument("log_likelihood: code count mismatch");
  const NoiseModel noise{sigma};
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double v = tau - q(i);
    ll += y.codes(i) > 0 ? std::log(noise.sf(v)) : std::log(noise.cdf(v));
  }
  return ll;
}

Eigen::VectorXd score(const BinaryMeasurements& y, const SensingEnsemble& ensemble, const SignalVector& x,
                      double tau, double sigma) {
  check_inputs(ensemble, x, sigma);
  if (y.size() != ensemble.m()) throw std::invalid_argument("score: code count mismatch");
  const NoiseModel noise{sigma};
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  Eigen::VectorXd coeff(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double v = tau - q(i);
    const double lower = noise.cdf(v);
    const double upper = noise.sf(v);
    if (lower * upper < kSaturationFloor) {
      coeff(i) = 0.0;
      continue;
    }
    const double d = noise.pdf(v);
    coeff(i) = y.codes(i) > 0 ? d / upper : -d / lower;
  }
  return measurement_gradients(ensemble, x).transpose() * coeff;
}

double crb_srer(const FisherMatrix& fisher, const SignalVector& x) {
  if (fisher.info.dim() != x.size()) throw std::invalid_argument("crb_srer: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fisher.info.matrix(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  if (!(top > 0.0) || !(lambda.minCoeff() > 1e-12 * top))
    throw BoundUndefined("Cramer-Rao bound undefined: Fisher information is singular");
  const double mse_bound = lambda.cwiseInverse().sum();
  return 10.0 * std::log10(x.squaredNorm() / mse_bound);
}

}  // namespace bpr
