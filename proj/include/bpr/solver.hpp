// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bpr/linalg.hpp"
#include "bpr/measurement.hpp"

namespace bpr {

/// Where the step size is searched.
enum class LineSearchAnchor {
  kMomentumPoint,  // at Y^t along grad F(Y^t), the point actually stepped from
  kIterate,        // at X^t along grad F(X^t)
};

struct SolverConfig {
  int max_iters = 300;
  double ls_range_max = 0.0025;
  double ls_precision = 1e-5;
  bool momentum = true;
  LineSearchAnchor anchor = LineSearchAnchor::kMomentumPoint;
  /// When set, replaces the line search with this constant step.
  std::optional<double> fixed_step;
  double projection_tol = 1e-10;
  int projection_max_iter = 10'000;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double cost = 0.0;
  double eta = 0.0;
  double srer_db = 0.0;  // NaN when no ground truth was supplied
  double consistency = 0.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  SignalVector estimate;
};

/// Iterate state of the accelerated scheme. `factor` is present whenever X
/// came out of a rank-1 projection.
struct LiftedIterate {
  SymmetricMatrix x;
  std::optional<Eigen::VectorXd> factor;
  SymmetricMatrix y;
  double theta = 1.0;
};

/// f(u) = u^2 / 2 for u <= 0, else 0.
double one_sided_loss(double u);
/// f'(u) = u for u <= 0, else 0 (f'(0) = 0).
double one_sided_loss_derivative(double u);

/// F(X) = sum_i f(y_i (Tr(A_i X) - tau)).
double bpr_cost(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const BinaryMeasurements& y);
/// Same cost from precomputed traces t_i = Tr(A_i X).
double bpr_cost_from_traces(const Eigen::VectorXd& traces, const BinaryMeasurements& y);

/// grad F(X) = sum_i f'(u_i) y_i A_i.
SymmetricMatrix bpr_gradient(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const BinaryMeasurements& y);
/// The weights f'(u_i) y_i multiplying A_i in the gradient.
Eigen::VectorXd bpr_gradient_weights(const Eigen::VectorXd& traces, const BinaryMeasurements& y);

/// Grid minimizer of F(Y - eta G) over eta in {0, precision, ..., range_max}.
/// Ties go to the smallest eta.
double line_search(const SymmetricMatrix& y_point, const SymmetricMatrix& g, const SensingEnsemble& ensemble,
                   const BinaryMeasurements& y, double range_max, double precision);
/// Same search using t_i = Tr(A_i Y) and g_i = Tr(A_i G).
double line_search_from_traces(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
                               const BinaryMeasurements& y, double range_max, double precision);

/// theta_{t+1} = 2 / (1 + sqrt(1 + 4 / theta_t^2)).
double next_theta(double theta);

/// C_0 = sum_i (Tr A_i)^2, which is sum_i ||a_i||^4 for real rows. Bounds the
/// Lipschitz constant of grad F in Frobenius norm.
double lipschitz_bound(const SensingEnsemble& ensemble);

/// A loss over the lifted variable whose gradient is sum_i w_i(t) A_i, with
/// t_i = Tr(A_i X). Both the consistency loss and the quadratic baseline fit
/// this shape, so they share one projected-descent loop.
class LiftedObjective {
 public:
  virtual ~LiftedObjective() = default;
  virtual double cost(const Eigen::VectorXd& traces) const = 0;
  virtual Eigen::VectorXd gradient_weights(const Eigen::VectorXd& traces) const = 0;
  /// Step size at a point with traces t along a direction with traces g.
  virtual double step(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
                      const SolverConfig& config) const = 0;
};

/// Rank-1 projected gradient descent from X = 0, with optional theta-momentum.
/// `codes` are used only for the consistency column of the trace.
RunTrace projected_descent(const SensingEnsemble& ensemble, const LiftedObjective& objective,
                           const BinaryMeasurements& codes, const SolverConfig& config,
                           const std::optional<SignalVector>& ground_truth = std::nullopt);

/// Binary phase retrieval: projected descent on the one-sided consistency cost.
RunTrace apgd_run(const SensingEnsemble& ensemble, const BinaryMeasurements& y, const SolverConfig& config,
                  const std::optional<SignalVector>& ground_truth = std::nullopt);

/// CSV with header iter,cost,eta,srer_db,consistency. Infinite SRER is
/// written as the 300 dB cap.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

}  // namespace bpr
