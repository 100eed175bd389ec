#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "conesta/errors.hpp"
#include "conesta/objective.hpp"
#include "conesta/rng.hpp"
#include "conesta/simulation.hpp"
#include "conesta/smoothing.hpp"
#include "conesta/solvers.hpp"
#include "oracles.hpp"

using namespace conesta;

namespace {

std::shared_ptr<const StructureOperator> chain(std::size_t p) {
  return std::make_shared<const StructureOperator>(build_tv_operator(GridMask::chain(p)));
}

// Minimizes the p = 2, X = I problem by a grid scan followed by shrinking
// pattern searches around the best point.
double brute_force_pair(const Eigen::Vector2d& y, const PenaltyWeights& w) {
  const auto f = [&](double a, double b) {
    return 0.5 * ((a - y[0]) * (a - y[0]) + (b - y[1]) * (b - y[1])) +
           0.5 * w.l2 * (a * a + b * b) + w.l1 * (std::abs(a) + std::abs(b)) +
           w.tv * std::abs(b - a);
  };
  double ca = 0.0, cb = 0.0, best = f(0.0, 0.0);
  double half = std::max(std::abs(y[0]), std::abs(y[1])) + 1.0;
  for (int round = 0; round < 12; ++round) {
    const int steps = 200;
    const double a0 = ca, b0 = cb;
    for (int i = -steps; i <= steps; ++i) {
      for (int j = -steps; j <= steps; ++j) {
        const double a = a0 + half * i / steps, b = b0 + half * j / steps;
        const double v = f(a, b);
        if (v < best) best = v, ca = a, cb = b;
      }
    }
    half *= 0.05;
  }
  return best;
}

SimulationDesign small_design(std::uint64_t seed) {
  SimulationDesign d;
  d.n = 40;
  d.p = 30;
  d.seed = seed;
  return d;
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.eps = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.tau = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.gap_check_period = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.max_inner_total = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.mu_fixed = 1e-13;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(MuOptimal, MatchesClosedForm) {
  const double eps = 0.1, gamma = 1.0, m = 1.0, a2 = 4.0, lg = 1.0;
  const double expected = (-gamma * m * a2 + std::sqrt(std::pow(gamma * m * a2, 2) + m * lg * a2 * eps)) /
                          (m * lg);
  EXPECT_NEAR(mu_optimal(eps, gamma, m, a2, lg), expected, 1e-14);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double e = std::pow(10.0, rng.uniform(-3.0, 1.0));
    const double g = rng.uniform(0.1, 3.0), mm = rng.uniform(0.5, 200.0);
    const double a = rng.uniform(0.5, 12.0), l = rng.uniform(0.5, 500.0);
    const double naive = (-g * mm * a + std::sqrt(g * g * mm * mm * a * a + mm * l * a * e)) / (mm * l);
    EXPECT_NEAR(mu_optimal(e, g, mm, a, l), naive, 1e-9 * naive);
  }
}

TEST(MuOptimal, MinimizesIterationBound) {
  // The worst-case count behaves like sqrt(L_g + gamma ||A||^2 / mu) / sqrt(eps - mu gamma M).
  const double eps = 0.05, gamma = 1.618, m = 99.5, a2 = 4.0, lg = 170.0;
  const auto bound = [&](double mu) {
    return (lg + gamma * a2 / mu) / (eps - mu * gamma * m);
  };
  const double mu = mu_optimal(eps, gamma, m, a2, lg);
  ASSERT_LT(mu * gamma * m, eps);
  EXPECT_LE(bound(mu), bound(mu * 1.01));
  EXPECT_LE(bound(mu), bound(mu * 0.99));
}

TEST(MuOptimal, MonotoneAndLimits) {
  double prev = 0.0;
  for (double eps : {1e-9, 1e-6, 1e-3, 1.0, 1e3}) {
    const double mu = mu_optimal(eps, 1.618, 99.5, 4.0, 170.0);
    EXPECT_GT(mu, prev);
    EXPECT_LT(mu * 1.618 * 99.5, eps);
    prev = mu;
  }
  // Small eps: mu ~ eps / (2 gamma M).
  const double tiny = 1e-12;
  EXPECT_NEAR(mu_optimal(tiny, 1.618, 99.5, 4.0, 170.0) / (tiny / (2 * 1.618 * 99.5)), 1.0, 1e-6);
  // gamma = 0: sqrt(||A||^2 eps / (M L_g)).
  EXPECT_NEAR(mu_optimal(0.1, 0.0, 2.0, 4.0, 5.0), std::sqrt(4.0 * 0.1 / (2.0 * 5.0)), 1e-15);
  EXPECT_THROW(mu_optimal(0.0, 1.0, 1.0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(mu_optimal(0.1, 1.0, 0.0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(mu_optimal(0.1, 1.0, 1.0, 1.0, 0.0), InvalidArgument);
}

TEST(FixedMu, Values) {
  EXPECT_DOUBLE_EQ(fixed_mu_value(FixedMuMode::chen, 1e-4, 2.0, 0.5), 5e-5);
  EXPECT_DOUBLE_EQ(fixed_mu_value(FixedMuMode::large, 1e-4, 2.0, 0.5), std::sqrt(5e-5));
  EXPECT_THROW(fixed_mu_value(FixedMuMode::chen, 1e-4, 0.0, 0.5), InvalidArgument);
}

TEST(Fista, RidgeClosedForm) {
  Rng rng(11);
  const Eigen::MatrixXd X = oracle::random_matrix(rng, 30, 10);
  const Eigen::VectorXd y = oracle::random_vector(rng, 30);
  const Problem pb(X, y, {0.0, 0.7, 0.0}, chain(10));
  FistaBudget budget;
  budget.max_iterations = 100000;
  const SolverResult r = fista(pb, Eigen::VectorXd::Zero(10), 1e-14, 1.0, budget);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((r.beta - oracle::ridge_solution(X, y, 0.7)).norm(), 1e-6);
}

TEST(Fista, ValidatesArguments) {
  const Problem pb(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2), {}, chain(2));
  EXPECT_THROW(fista(pb, Eigen::VectorXd::Zero(3), 1e-3, 1.0), InvalidArgument);
  EXPECT_THROW(fista(pb, Eigen::VectorXd::Zero(2), 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(fista(pb, Eigen::VectorXd::Zero(2), 1e-3, 0.0), InvalidArgument);
  FistaBudget none;
  none.max_iterations = 0;
  EXPECT_THROW(fista(pb, Eigen::VectorXd::Zero(2), 1e-3, 1.0, none), InvalidArgument);
}

TEST(Conesta, OrthogonalLassoClosedForm) {
  Rng rng(13);
  const Eigen::VectorXd y = oracle::random_vector(rng, 8, 2.0);
  const PenaltyWeights w{0.6, 0.4, 0.0};
  const Problem pb(Eigen::MatrixXd::Identity(8, 8), y, w, chain(8));
  SolverConfig c;
  c.eps = 1e-10;
  const SolverResult r = conesta::conesta(pb, Eigen::VectorXd::Zero(8), c);
  EXPECT_TRUE(r.converged);
  Eigen::VectorXd expected(8);
  for (int i = 0; i < 8; ++i) expected[i] = oracle::grid_prox_abs(y[i], w.l1) / (1.0 + w.l2);
  EXPECT_LE((r.beta - expected).lpNorm<Eigen::Infinity>(), 1e-4);
  for (int i = 0; i < 8; ++i) {
    if (std::abs(y[i]) <= w.l1) EXPECT_EQ(r.beta[i], 0.0);
  }
}

TEST(Conesta, LassoZeroAboveThreshold) {
  Rng rng(17);
  const Eigen::MatrixXd X = oracle::random_matrix(rng, 20, 12);
  const Eigen::VectorXd y = oracle::random_vector(rng, 20);
  const double l1 = 1.01 * (X.transpose() * y).lpNorm<Eigen::Infinity>();
  const Problem pb(X, y, {l1, 0.5, 0.0}, chain(12));
  SolverConfig c;
  c.eps = 1e-8;
  const SolverResult r = conesta::conesta(pb, Eigen::VectorXd::Zero(12), c);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.beta.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Conesta, TwoVariableTvMatchesBruteForce) {
  Rng rng(19);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::Vector2d y = oracle::random_vector(rng, 2, 2.0);
    const PenaltyWeights w{rng.uniform(0.0, 0.5), rng.uniform(0.1, 1.0), rng.uniform(0.2, 2.0)};
    const Problem pb(Eigen::MatrixXd::Identity(2, 2), y, w, chain(2));
    SolverConfig c;
    c.eps = 1e-8;
    const SolverResult r = conesta::conesta(pb, Eigen::VectorXd::Zero(2), c);
    ASSERT_TRUE(r.converged);
    const double best = brute_force_pair(y, w);
    const double f = f_value(pb, r.beta);
    EXPECT_LE(f - best, 1e-8 + 1e-9);
    EXPECT_GE(f - best, -1e-9);
  }
}

TEST(Conesta, CertifiedOnLabeledDataset) {
  const LabeledDataset ds = simulate(small_design(3));
  const Problem pb = ds.problem();
  SolverConfig c;
  c.eps = 1e-5;
  c.max_inner_total = 2000000;
  c.max_inner_per_outer = 2000000;
  const SolverResult r = conesta::conesta(pb, Eigen::VectorXd::Zero(30), c);
  ASSERT_TRUE(r.converged);
  const double err = error_to_optimum(ds, r.beta);
  EXPECT_LE(err, c.eps);
  EXPECT_GE(err, -1e-10);
  EXPECT_LE(r.final_gap, c.eps);
  for (const auto& rec : r.trace) EXPECT_GE(rec.gap - (rec.f - ds.f_star), -1e-9);
}

TEST(Conesta, TraceAndStepInvariants) {
  const LabeledDataset ds = simulate(small_design(4));
  const Problem pb = ds.problem();
  SolverConfig c;
  c.eps = 1e-4;
  c.tau = 0.5;
  c.max_inner_total = 1000000;
  c.max_inner_per_outer = 1000000;
  const SolverResult r = conesta::conesta(pb, Eigen::VectorXd::Zero(30), c);
  ASSERT_TRUE(r.converged);
  ASSERT_GE(r.outer_steps.size(), 2u);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().k, 0u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_GT(r.trace[i].k, r.trace[i - 1].k);
    EXPECT_GE(r.trace[i].outer, r.trace[i - 1].outer);
    EXPECT_GE(r.trace[i].seconds, r.trace[i - 1].seconds);
  }
  EXPECT_EQ(r.trace.back().k, r.iterations);
  std::size_t inner_sum = 0;
  for (std::size_t i = 0; i < r.outer_steps.size(); ++i) {
    const OuterStep& s = r.outer_steps[i];
    inner_sum += s.inner_iterations;
    EXPECT_NEAR(s.eps_next / s.eps, c.tau, 1e-15);
    EXPECT_GT(s.eps_mu, 0.0);
    if (i > 0) EXPECT_LE(s.mu, r.outer_steps[i - 1].mu);
  }
  EXPECT_EQ(inner_sum, r.iterations);
  EXPECT_LE(r.outer_steps.back().eps, c.eps);
}

TEST(Conesta, WarmStartAtOptimumIsCheap) {
  const LabeledDataset ds = simulate(small_design(5));
  const Problem pb = ds.problem();
  SolverConfig c;
  c.eps = 1e-4;
  c.max_inner_total = 1000000;
  c.max_inner_per_outer = 1000000;
  const SolverResult cold = conesta::conesta(pb, Eigen::VectorXd::Zero(30), c);
  const SolverResult warm = conesta::conesta(pb, ds.beta_star, c);
  ASSERT_TRUE(cold.converged);
  ASSERT_TRUE(warm.converged);
  EXPECT_LT(warm.iterations, cold.iterations);
  EXPECT_LE(error_to_optimum(ds, warm.beta), c.eps);
}

TEST(Conesta, BudgetIsRespected) {
  const LabeledDataset ds = simulate(small_design(6));
  SolverConfig c;
  c.eps = 1e-12;
  c.max_inner_total = 500;
  c.max_inner_per_outer = 200;
  const SolverResult r = conesta::conesta(ds.problem(), Eigen::VectorXd::Zero(30), c);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.iterations, 500u);
  for (const auto& s : r.outer_steps) EXPECT_LE(s.inner_iterations, 200u);
}

TEST(Conesta, Deterministic) {
  const LabeledDataset ds = simulate(small_design(7));
  SolverConfig c;
  c.eps = 1e-3;
  const SolverResult a = conesta::conesta(ds.problem(), Eigen::VectorXd::Zero(30), c);
  const SolverResult b = conesta::conesta(ds.problem(), Eigen::VectorXd::Zero(30), c);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(FistaFixedMu, MuColumnIsConstant) {
  const LabeledDataset ds = simulate(small_design(8));
  const Problem pb = ds.problem();
  SolverConfig c;
  c.eps = 1e-3;
  c.max_inner_total = 3000;
  for (FixedMuMode mode : {FixedMuMode::chen, FixedMuMode::large}) {
    const SolverResult r = fista_fixed_mu(pb, Eigen::VectorXd::Zero(30), c, mode);
    const double mu = fixed_mu_value(mode, c.eps, pb.weights().tv, pb.m());
    for (const auto& rec : r.trace) EXPECT_EQ(rec.mu, mu);
    EXPECT_LE(r.iterations, 3000u);
  }
  c.mu_fixed = 0.25;
  const SolverResult r = fista_fixed_mu(pb, Eigen::VectorXd::Zero(30), c, FixedMuMode::chen);
  for (const auto& rec : r.trace) EXPECT_EQ(rec.mu, 0.25);
}

TEST(FistaFixedMu, ConvergedMeansCertified) {
  const LabeledDataset ds = simulate(small_design(9));
  SolverConfig c;
  c.eps = 1e-2;
  c.max_inner_total = 1000000;
  const SolverResult r = fista_fixed_mu(ds.problem(), Eigen::VectorXd::Zero(30), c, FixedMuMode::chen);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(error_to_optimum(ds, r.beta), c.eps);
}

TEST(ProxStructured, MatchesBruteForceOnPair) {
  // prox of t|u1 - u0| at v has the closed form: shrink the difference by 2t.
  const auto op = chain(2);
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector2d v = oracle::random_vector(rng, 2);
    const double t = rng.uniform(0.0, 1.0);
    Eigen::VectorXd alpha;
    const ProxResult r = prox_structured(*op, v, t, 1e-14, 100000, alpha);
    EXPECT_TRUE(r.converged);
    const double d = v[1] - v[0];
    const double shrink = std::copysign(std::max(std::abs(d) - 2.0 * t, 0.0), d);
    const double mid = 0.5 * (v[0] + v[1]);
    EXPECT_NEAR(r.u[0], mid - 0.5 * shrink, 1e-6);
    EXPECT_NEAR(r.u[1], mid + 0.5 * shrink, 1e-6);
  }
}

TEST(ProxStructured, ZeroStepIsIdentity) {
  const auto op = chain(5);
  Eigen::VectorXd alpha;
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const ProxResult r = prox_structured(*op, v, 0.0, 1e-8, 10, alpha);
  EXPECT_EQ(r.u, v);
  EXPECT_THROW(prox_structured(*op, Eigen::VectorXd::Zero(4), 0.1, 1e-8, 10, alpha), InvalidArgument);
}

TEST(InexactFista, ReachesReferenceObjective) {
  const LabeledDataset ds = simulate(small_design(10));
  SolverConfig c;
  c.eps = 1e-5;
  c.max_inner_total = 200000;
  const SolverResult r = inexact_fista(ds.problem(), Eigen::VectorXd::Zero(30), c);
  EXPECT_LE(error_to_optimum(ds, r.beta), 1e-5);
  EXPECT_LE(r.iterations, 200000u + 10000u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_GE(r.trace[i].k, r.trace[i - 1].k);
    EXPECT_GT(r.trace[i].outer, r.trace[i - 1].outer);
  }
  EXPECT_THROW(inexact_fista(ds.problem(), Eigen::VectorXd::Zero(30), c, InexactOptions{0.0, 10}),
               InvalidArgument);
}

TEST(Fista, ProgressesWhenUpdatesAreBelowRounding) {
  // Optimum of 1/2||b - y||^2 + 1/2||b||^2 + 0.05|b1 - b0| is (0.525, 0.575).
  // With mu = 1e-12 one step moves the start by about 1e-17, below the
  // spacing of doubles near 0.5, yet the iterates must still make progress.
  const PenaltyWeights w{0.0, 1.0, 0.05};
  const Problem pb(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 1.2), w, chain(2));
  const Eigen::Vector2d start(0.525 + 1e-6, 0.575 - 1e-6);
  const double mu = 1e-12;
  FistaBudget budget;
  budget.max_iterations = 4000;
  const SolverResult r = fista(pb, start, 1e-300, mu, budget);
  EXPECT_NE(r.beta, Eigen::VectorXd(start));
  EXPECT_LT(f_mu_value(pb, r.beta, mu), f_mu_value(pb, start, mu));
  EXPECT_LT(r.beta[0], start[0]);
  EXPECT_GT(r.beta[1], start[1]);
}
