// SPDX-License-Identifier: Apache-2.0
#include "bpr/baselines.hpp"

#include <stdexcept>

namespace bpr {

PseudoMeasurements centroid_decode(const BinaryMeasurements& y, const IntervalCentroids& centroids) {
  PseudoMeasurements p;
  p.source = y;
  p.centroids = centroids;
  p.values = (y.codes.array() > 0.0).select(centroids.high, Eigen::ArrayXd::Constant(y.size(), centroids.low));
  return p;
}

PseudoMeasurements centroid_decode(const BinaryMeasurements& y) {
  return centroid_decode(y, interval_centroids(y.tau));
}

IntervalCentroids empirical_centroids(const SensingEnsemble& ensemble, const SignalVector& x, double tau) {
  const Eigen::VectorXd q = ensemble.quadratic_measurements(x);
  double below = 0.0, above = 0.0;
  Eigen::Index n_below = 0, n_above = 0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q(i) > tau) {
      above += q(i);
      ++n_above;
    } else {
      below += q(i);
      ++n_below;
    }
  }
  if (n_below == 0 || n_above == 0) throw std::invalid_argument("empirical_centroids: tau does not split the data");
  return {below / static_cast<double>(n_below), above / static_cast<double>(n_above)};
}

double phaselift_cost(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const PseudoMeasurements& p) {
  if (x.dim() != ensemble.n() || p.values.size() != ensemble.m())
    throw std::invalid_argument("phaselift_cost: dimension mismatch");
  return (ensemble.lifted_image(x) - p.values).squaredNorm();
}

SymmetricMatrix phaselift_gradient(const SymmetricMatrix& x, const SensingEnsemble& ensemble,
                                   const PseudoMeasurements& p) {
  if (x.dim() != ensemble.n() || p.values.size() != ensemble.m())
    throw std::invalid_argument("phaselift_gradient: dimension mismatch");
  return ensemble.lifted_adjoint(2.0 * (ensemble.lifted_image(x) - p.values));
}

PhaseliftStep phaselift_step_from_traces(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
                                         const Eigen::VectorXd& targets) {
  const double denom = direction_traces.squaredNorm();
  if (denom < 1e-30) return {0.0, true};
  return {(traces - targets).dot(direction_traces) / denom, false};
}

PhaseliftStep phaselift_step(const SymmetricMatrix& x, const SymmetricMatrix& g, const SensingEnsemble& ensemble,
                             const PseudoMeasurements& p) {
  if (x.dim() != ensemble.n() || g.dim() != ensemble.n() || p.values.size() != ensemble.m())
    throw std::invalid_argument("phaselift_step: dimension mismatch");
  return phaselift_step_from_traces(ensemble.lifted_image(x), ensemble.lifted_image(g), p.values);
}

namespace {

class QuadraticObjective final : public LiftedObjective {
 public:
  explicit QuadraticObjective(const PseudoMeasurements& p) : p_(p) {}

  double cost(const Eigen::VectorXd& traces) const override { return (traces - p_.values).squaredNorm(); }

  Eigen::VectorXd gradient_weights(const Eigen::VectorXd& traces) const override {
    return 2.0 * (traces - p_.values);
  }

  double step(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
              const SolverConfig&) const override {
    return phaselift_step_from_traces(traces, direction_traces, p_.values).eta;
  }

 private:
  const PseudoMeasurements& p_;
};

}  // namespace

RunTrace phaselift_run(const SensingEnsemble& ensemble, const PseudoMeasurements& p, const SolverConfig& config,
                       const std::optional<SignalVector>& ground_truth) {
  if (p.values.size() != ensemble.m()) throw std::invalid_argument("phaselift_run: measurement count mismatch");
  QuadraticObjective objective(p);
  return projected_descent(ensemble, objective, p.source, config, ground_truth);
}

}  // namespace bpr
