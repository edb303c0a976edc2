// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "bpr/baselines.hpp"
#include "test_util.hpp"

using namespace bpr;
using bpr::testing::random_symmetric;

namespace {

struct Fixture {
  SensingEnsemble ensemble;
  SignalVector x;
  BinaryMeasurements y;
  PseudoMeasurements p;
};

Fixture make_fixture(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  Fixture s{gen_gaussian_ensemble(n, m, seed), gen_unit_sphere_signal(n, seed + 1), {}, {}};
  s.y = encode_binary(s.ensemble, s.x, 0.4550, 0.0, 0);
  s.p = centroid_decode(s.y);
  return s;
}

double scalar_q(const SymmetricMatrix& x, const SensingEnsemble& e, const Eigen::VectorXd& p) {
  double c = 0.0;
  for (Eigen::Index i = 0; i < e.m(); ++i) c += std::pow(trace_inner(e.lifted_form(i), x) - p(i), 2);
  return c;
}

}  // namespace

TEST(CentroidDecode, GoldenCentroids) {
  BinaryMeasurements y;
  y.codes = Eigen::Vector2d(-1.0, 1.0);
  y.tau = 0.4550;
  const PseudoMeasurements p = centroid_decode(y);
  EXPECT_NEAR(p.values(0), 0.1427, 1e-3);
  EXPECT_NEAR(p.values(1), 1.8573, 1e-3);
}

TEST(CentroidDecode, AllNegativeIsConstant) {
  BinaryMeasurements y;
  y.codes = -Eigen::VectorXd::Ones(6);
  y.tau = 0.4550;
  const PseudoMeasurements p = centroid_decode(y);
  EXPECT_TRUE((p.values.array() == p.centroids.low).all());
}

TEST(CentroidDecode, PreservesCountAndOrder) {
  const Fixture s = make_fixture(6, 50, 1);
  ASSERT_EQ(s.p.values.size(), 50);
  for (Eigen::Index i = 0; i < 50; ++i)
    EXPECT_EQ(s.p.values(i), s.y.codes(i) > 0 ? s.p.centroids.high : s.p.centroids.low);
}

TEST(EmpiricalCentroids, ConditionalMeans) {
  Eigen::MatrixXd a(4, 1);
  a << 1, 2, 3, 4;  // q = 1, 4, 9, 16
  const SensingEnsemble e(EnsembleKind::kGaussian, a);
  const IntervalCentroids c = empirical_centroids(e, Eigen::VectorXd::Ones(1), 5.0);
  EXPECT_DOUBLE_EQ(c.low, 2.5);
  EXPECT_DOUBLE_EQ(c.high, 12.5);
  EXPECT_THROW(empirical_centroids(e, Eigen::VectorXd::Ones(1), 100.0), std::invalid_argument);
}

TEST(PhaseliftCost, ZeroWhenRealizable) {
  const Fixture s = make_fixture(5, 30, 2);
  PseudoMeasurements exact = s.p;
  exact.values = s.ensemble.quadratic_measurements(s.x);
  EXPECT_NEAR(phaselift_cost(SymmetricMatrix::outer(s.x), s.ensemble, exact), 0.0, 1e-20);
}

TEST(PhaseliftCost, AtZeroIsSumOfSquares) {
  const Fixture s = make_fixture(5, 30, 3);
  EXPECT_NEAR(phaselift_cost(SymmetricMatrix::zero(5), s.ensemble, s.p), s.p.values.squaredNorm(), 1e-12);
}

TEST(PhaseliftCost, MatchesScalarLoop) {
  std::mt19937_64 rng(4);
  const Fixture s = make_fixture(4, 25, 4);
  for (int rep = 0; rep < 5; ++rep) {
    const SymmetricMatrix x = random_symmetric(4, rng);
    EXPECT_NEAR(phaselift_cost(x, s.ensemble, s.p), scalar_q(x, s.ensemble, s.p.values), 1e-9);
  }
}

TEST(PhaseliftCost, DimensionMismatchThrows) {
  const Fixture s = make_fixture(4, 25, 4);
  EXPECT_THROW(phaselift_cost(SymmetricMatrix::zero(3), s.ensemble, s.p), std::invalid_argument);
}

TEST(PhaseliftGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const Fixture s = make_fixture(5, 40, 5);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const SymmetricMatrix x = random_symmetric(5, rng);
    const SymmetricMatrix d = random_symmetric(5, rng);
    const double h = 1e-5;
    const double fd = (phaselift_cost(x + h * d, s.ensemble, s.p) - phaselift_cost(x - h * d, s.ensemble, s.p)) / (2 * h);
    const double an = trace_inner(phaselift_gradient(x, s.ensemble, s.p), d);
    worst = std::max(worst, bpr::testing::relative_error(fd, an));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(PhaseliftStep, ZeroNumeratorGivesZero) {
  const Fixture s = make_fixture(5, 30, 6);
  PseudoMeasurements exact = s.p;
  exact.values = s.ensemble.quadratic_measurements(s.x);
  std::mt19937_64 rng(6);
  const PhaseliftStep st = phaselift_step(SymmetricMatrix::outer(s.x), random_symmetric(5, rng), s.ensemble, exact);
  EXPECT_NEAR(st.eta, 0.0, 1e-12);
  EXPECT_FALSE(st.degenerate);
}

TEST(PhaseliftStep, OneDimensionalHandEvaluation) {
  const SensingEnsemble e(EnsembleKind::kGaussian, Eigen::MatrixXd::Ones(1, 1));
  PseudoMeasurements p;
  p.values = Eigen::VectorXd::Constant(1, 0.5);
  Eigen::MatrixXd xm(1, 1), gm(1, 1);
  xm << 2.0;
  gm << 3.0;
  // (2 - 0.5) * 3 / 3^2
  EXPECT_DOUBLE_EQ(phaselift_step(SymmetricMatrix(xm), SymmetricMatrix(gm), e, p).eta, 0.5);
}

TEST(PhaseliftStep, DegenerateDirection) {
  const Fixture s = make_fixture(4, 20, 7);
  const PhaseliftStep st = phaselift_step(SymmetricMatrix::identity(4), SymmetricMatrix::zero(4), s.ensemble, s.p);
  EXPECT_TRUE(st.degenerate);
  EXPECT_EQ(st.eta, 0.0);
}

TEST(PhaseliftStep, ExactLineMinimizer) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Fixture s = make_fixture(5, 40, 20 + rep);
    const SymmetricMatrix x = random_symmetric(5, rng);
    const SymmetricMatrix g = phaselift_gradient(x, s.ensemble, s.p);
    const double eta = phaselift_step(x, g, s.ensemble, s.p).eta;
    ASSERT_GT(eta, 0.0);
    const auto q = [&](double e) { return phaselift_cost(x - e * g, s.ensemble, s.p); };
    EXPECT_LE(q(eta), q(eta * (1 + 1e-3)));
    EXPECT_LE(q(eta), q(eta * (1 - 1e-3)));
    // Dense grid on [0, 2 eta] with spacing 1e-6 relative to eta.
    double grid_best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 2000; ++k) grid_best = std::min(grid_best, q(eta * k * 1e-3));
    EXPECT_LE(q(eta), grid_best * (1 + 1e-12));
  }
}

TEST(PhaseliftRun, DeterministicWithFullTrace) {
  const Fixture s = make_fixture(16, 320, 9);
  SolverConfig cfg;
  cfg.max_iters = 60;
  const RunTrace a = phaselift_run(s.ensemble, s.p, cfg, s.x);
  const RunTrace b = phaselift_run(s.ensemble, s.p, cfg, s.x);
  ASSERT_EQ(a.records.size(), 60u);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].cost, b.records[i].cost);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_GT(a.records.back().srer_db, 5.0);
}

TEST(PhaseliftRun, RecoversFromRealizableMeasurements) {
  const Fixture s = make_fixture(8, 160, 10);
  PseudoMeasurements exact = s.p;
  exact.values = s.ensemble.quadratic_measurements(s.x);
  SolverConfig cfg;
  cfg.max_iters = 300;
  const RunTrace run = phaselift_run(s.ensemble, exact, cfg, s.x);
  EXPECT_GT(run.records.back().srer_db, 40.0);
}

TEST(PhaseliftRun, CountMismatchThrows) {
  const Fixture s = make_fixture(4, 20, 11);
  PseudoMeasurements bad = s.p;
  bad.values.conservativeResize(10);
  EXPECT_THROW(phaselift_run(s.ensemble, bad, SolverConfig{}), std::invalid_argument);
}
