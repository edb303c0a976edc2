// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include <Eigen/Dense>

#include "bpr/measurement.hpp"
#include "bpr/solver.hpp"

namespace bpr {

/// Real-valued stand-ins for binary codes, fed to quadratic-loss solvers.
struct PseudoMeasurements {
  Eigen::VectorXd values;
  BinaryMeasurements source;
  IntervalCentroids centroids;
};

/// -1 -> centroid of [0, tau], +1 -> centroid of [tau, inf) under chi^2_1.
PseudoMeasurements centroid_decode(const BinaryMeasurements& y);
/// Same mapping with caller-supplied centroids.
PseudoMeasurements centroid_decode(const BinaryMeasurements& y, const IntervalCentroids& centroids);

/// Conditional means of the realized measurements q_i below and above tau.
/// Used for ensembles whose measurements are not chi^2_1 distributed.
IntervalCentroids empirical_centroids(const SensingEnsemble& ensemble, const SignalVector& x, double tau);

/// Q(X) = sum_i (Tr(A_i X) - p_i)^2.
double phaselift_cost(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const PseudoMeasurements& p);

/// grad Q(X) = 2 sum_i (Tr(A_i X) - p_i) A_i.
SymmetricMatrix phaselift_gradient(const SymmetricMatrix& x, const SensingEnsemble& ensemble,
                                   const PseudoMeasurements& p);

struct PhaseliftStep {
  double eta = 0.0;
  bool degenerate = false;  // sum_i Tr(A_i G)^2 < 1e-30
};

/// Exact minimizer of Q(X - eta G) over eta:
///   eta = sum_i (Tr(A_i X) - p_i) Tr(A_i G) / sum_i Tr(A_i G)^2.
PhaseliftStep phaselift_step(const SymmetricMatrix& x, const SymmetricMatrix& g, const SensingEnsemble& ensemble,
                             const PseudoMeasurements& p);
PhaseliftStep phaselift_step_from_traces(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
                                         const Eigen::VectorXd& targets);

/// Quadratic-loss baseline on the same accelerated rank-1 projected descent
/// as apgd_run, with the closed-form step in place of the grid search.
RunTrace phaselift_run(const SensingEnsemble& ensemble, const PseudoMeasurements& p, const SolverConfig& config,
                       const std::optional<SignalVector>& ground_truth = std::nullopt);

}  // namespace bpr
