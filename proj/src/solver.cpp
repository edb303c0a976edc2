// SPDX-License-Identifier: Apache-2.0
#include "bpr/solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "bpr/metrics.hpp"

namespace bpr {

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be positive");
  if (!(ls_precision > 0.0) || !(ls_range_max > ls_precision))
    throw std::invalid_argument("SolverConfig: need 0 < ls_precision < ls_range_max");
  if (fixed_step && !(*fixed_step > 0.0)) throw std::invalid_argument("SolverConfig: fixed step must be positive");
  if (!(projection_tol > 0.0) || projection_max_iter < 1)
    throw std::invalid_argument("SolverConfig: invalid projection settings");
}

double one_sided_loss(double u) { return u <= 0.0 ? 0.5 * u * u : 0.0; }

double one_sided_loss_derivative(double u) { return u < 0.0 ? u : 0.0; }

namespace {

void check_dims(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const BinaryMeasurements& y) {
  if (x.dim() != ensemble.n()) throw std::invalid_argument("dimension mismatch between iterate and ensemble");
  if (y.size() != ensemble.m()) throw std::invalid_argument("code count does not match the ensemble");
}

}  // namespace

double bpr_cost_from_traces(const Eigen::VectorXd& traces, const BinaryMeasurements& y) {
  if (traces.size() != y.size()) throw std::invalid_argument("bpr_cost: code count mismatch");
  const Eigen::ArrayXd u = y.codes.array() * (traces.array() - y.tau);
  return 0.5 * u.min(0.0).square().sum();
}

double bpr_cost(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const BinaryMeasurements& y) {
  check_dims(x, ensemble, y);
  return bpr_cost_from_traces(ensemble.lifted_image(x), y);
}

Eigen::VectorXd bpr_gradient_weights(const Eigen::VectorXd& traces, const BinaryMeasurements& y) {
  if (traces.size() != y.size()) throw std::invalid_argument("bpr_gradient: code count mismatch");
  const Eigen::ArrayXd u = y.codes.array() * (traces.array() - y.tau);
  return (u.min(0.0) * y.codes.array()).matrix();
}

SymmetricMatrix bpr_gradient(const SymmetricMatrix& x, const SensingEnsemble& ensemble, const BinaryMeasurements& y) {
  check_dims(x, ensemble, y);
  return ensemble.lifted_adjoint(bpr_gradient_weights(ensemble.lifted_image(x), y));
}

double line_search_from_traces(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
                               const BinaryMeasurements& y, double range_max, double precision) {
  if (!(precision > 0.0) || !(range_max > precision))
    throw std::invalid_argument("line_search: need range_max > precision > 0");
  if (traces.size() != y.size() || direction_traces.size() != y.size())
    throw std::invalid_argument("line_search: code count mismatch");
  // u_i(eta) = y_i (t_i - eta g_i - tau) = base_i - eta slope_i
  const Eigen::ArrayXd all_base = y.codes.array() * (traces.array() - y.tau);
  const Eigen::ArrayXd all_slope = y.codes.array() * direction_traces.array();
  // A term contributes somewhere on [0, range_max] only if u_i <= 0 at an
  // end point (u_i is affine in eta).
  std::vector<Eigen::Index> live;
  for (Eigen::Index i = 0; i < all_base.size(); ++i)
    if (all_base(i) <= 0.0 || all_base(i) - range_max * all_slope(i) <= 0.0) live.push_back(i);
  const Eigen::ArrayXd base = all_base(live);
  const Eigen::ArrayXd slope = all_slope(live);
  const long steps = static_cast<long>(std::floor(range_max / precision + 1e-9));
  double best_eta = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (long k = 0; k <= steps; ++k) {
    const double eta = static_cast<double>(k) * precision;
    const double c = 0.5 * (base - eta * slope).min(0.0).square().sum();
    if (c < best_cost) {
      best_cost = c;
      best_eta = eta;
    }
  }
  return best_eta;
}

double line_search(const SymmetricMatrix& y_point, const SymmetricMatrix& g, const SensingEnsemble& ensemble,
                   const BinaryMeasurements& y, double range_max, double precision) {
  check_dims(y_point, ensemble, y);
  check_dims(g, ensemble, y);
  return line_search_from_traces(ensemble.lifted_image(y_point), ensemble.lifted_image(g), y, range_max,
                                 precision);
}

double next_theta(double theta) { return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (theta * theta))); }

double lipschitz_bound(const SensingEnsemble& ensemble) { return ensemble.lifted_traces().squaredNorm(); }

namespace {

class ConsistencyObjective final : public LiftedObjective {
 public:
  explicit ConsistencyObjective(const BinaryMeasurements& y) : y_(y) {}

  double cost(const Eigen::VectorXd& traces) const override { return bpr_cost_from_traces(traces, y_); }

  Eigen::VectorXd gradient_weights(const Eigen::VectorXd& traces) const override {
    return bpr_gradient_weights(traces, y_);
  }

  double step(const Eigen::VectorXd& traces, const Eigen::VectorXd& direction_traces,
              const SolverConfig& config) const override {
    return line_search_from_traces(traces, direction_traces, y_, config.ls_range_max, config.ls_precision);
  }

 private:
  const BinaryMeasurements& y_;
};

}  // namespace

RunTrace projected_descent(const SensingEnsemble& ensemble, const LiftedObjective& objective,
                           const BinaryMeasurements& codes, const SolverConfig& config,
                           const std::optional<SignalVector>& ground_truth) {
  config.validate();
  const Eigen::Index n = ensemble.n();
  const Eigen::Index m = ensemble.m();
  if (codes.size() != m) throw std::invalid_argument("projected_descent: code count mismatch");
  if (ground_truth && ground_truth->size() != n)
    throw std::invalid_argument("projected_descent: ground truth dimension mismatch");

  const PowerIterationOptions power{config.projection_tol, config.projection_max_iter, config.seed};

  // Traces t_i = Tr(A_i .) are linear in the matrix, so they are carried
  // alongside each iterate instead of being recomputed densely.
  LiftedIterate state{SymmetricMatrix::zero(n), std::nullopt, SymmetricMatrix::zero(n), 1.0};
  Eigen::VectorXd x_traces = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y_traces = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd estimate = Eigen::VectorXd::Zero(n);

  RunTrace trace;
  trace.records.reserve(static_cast<std::size_t>(config.max_iters));

  for (int it = 1; it <= config.max_iters; ++it) {
    const Eigen::VectorXd weights = objective.gradient_weights(y_traces);
    const SymmetricMatrix grad = ensemble.lifted_adjoint(weights);

    double eta = 0.0;
    if (config.fixed_step) {
      eta = *config.fixed_step;
    } else if (config.anchor == LineSearchAnchor::kMomentumPoint || !config.momentum) {
      eta = objective.step(y_traces, ensemble.lifted_image_of_adjoint(weights), config);
    } else {
      eta = objective.step(x_traces, ensemble.lifted_image_of_adjoint(objective.gradient_weights(x_traces)),
                           config);
    }

    Rank1Projection proj = rank1_psd_project(state.y - eta * grad, power);
    Eigen::VectorXd new_traces = ensemble.quadratic_measurements(proj.factor);

    if (config.momentum) {
      const double theta_next = next_theta(state.theta);
      const double beta = theta_next * (1.0 / state.theta - 1.0);
      state.y = proj.matrix + beta * (proj.matrix - state.x);
      y_traces = new_traces + beta * (new_traces - x_traces);
      state.theta = theta_next;
    } else {
      state.y = proj.matrix;
      y_traces = new_traces;
    }
    state.x = std::move(proj.matrix);
    state.factor = proj.factor;
    x_traces = std::move(new_traces);
    estimate = std::move(proj.factor);

    TraceRecord rec;
    rec.iter = it;
    rec.cost = objective.cost(x_traces);
    rec.eta = eta;
    rec.srer_db = ground_truth ? srer(*ground_truth, estimate) : std::numeric_limits<double>::quiet_NaN();
    rec.consistency = consistency_from_measurements(codes, x_traces);
    trace.records.push_back(rec);
  }
  trace.estimate = std::move(estimate);
  return trace;
}

RunTrace apgd_run(const SensingEnsemble& ensemble, const BinaryMeasurements& y, const SolverConfig& config,
                  const std::optional<SignalVector>& ground_truth) {
  ConsistencyObjective objective(y);
  return projected_descent(ensemble, objective, y, config, ground_truth);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  const auto old_precision = os.precision(10);
  os << "iter,cost,eta,srer_db,consistency\n";
  for (const auto& r : trace.records)
    os << r.iter << ',' << r.cost << ',' << r.eta << ',' << cap_db(r.srer_db) << ',' << r.consistency << '\n';
  os.precision(old_precision);
}

}  // namespace bpr
