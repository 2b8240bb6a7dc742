#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "meshmdp/meshmdp.hpp"
#include "test_support.hpp"

using namespace meshmdp;
using testing_support::small_lqg_spec;

namespace {

// Uniform density on [x + a - w, x + a + w]; exactly zero outside.
class BoxKernel final : public TransitionKernel {
 public:
  BoxKernel(double w, std::size_t steps) : w_(w), steps_(steps) {}
  std::size_t dim() const noexcept override { return 1; }
  std::size_t steps() const noexcept override { return steps_; }
  double log_density(std::size_t, ConstVec x, ConstVec a, ConstVec y) const override {
    return std::fabs(y[0] - x[0] - a[0]) <= w_ ? -std::log(2.0 * w_) : -INFINITY;
  }
  void sample_into(std::size_t, ConstVec x, ConstVec a, Substream& rng,
                   std::span<double> out) const override {
    out[0] = x[0] + a[0] + rng.uniform(-w_, w_);
  }

 private:
  double w_;
  std::size_t steps_;
};

struct Fixture {
  MdpSpec spec;
  TrajectoryMesh mesh;
  DenominatorTable denoms;
};

Fixture lqg_fixture(std::size_t n, std::uint64_t seed, std::size_t h = 3) {
  MdpSpec spec = small_lqg_spec(6, std::sqrt(0.02));
  TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, n, seed);
  DenominatorTable d = precompute_denominators(mesh, *spec.kernel, h);
  return {std::move(spec), std::move(mesh), std::move(d)};
}

}  // namespace

TEST(Denominators, TwoPathsIsSingleTerm) {
  const MdpSpec spec = small_lqg_spec(3, 0.1);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 2, 4);
  for (std::size_t h = 0; h < 3; ++h) {
    const DenominatorTable d = precompute_denominators(mesh, *spec.kernel, h);
    const double zero[] = {0.0};
    EXPECT_EQ(d.log_denoms[0], spec.kernel->log_density(h, mesh.state(1, h), zero, mesh.state(0, h + 1)));
    EXPECT_EQ(d.log_denoms[1], spec.kernel->log_density(h, mesh.state(0, h), zero, mesh.state(1, h + 1)));
  }
}

TEST(Denominators, ConstantKernel) {
  MdpSpec spec;
  spec.horizon = 2;
  spec.reward = [](std::size_t, ConstVec, ConstVec) { return 0.0; };
  spec.terminal = [](ConstVec) { return 0.0; };
  spec.kernel = std::make_shared<testing_support::ConstantKernel>(0.25, 2);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 37, 1);
  const DenominatorTable d = precompute_denominators(mesh, *spec.kernel, 1);
  for (double v : d.log_denoms) EXPECT_NEAR(v, std::log(36 * 0.25), 1e-13);
}

TEST(Denominators, MatchDirectDoubleLoop) {
  const double sigma = 0.1;
  const MdpSpec spec = small_lqg_spec(20, sigma);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 100, 21);
  for (std::size_t h : {0u, 7u, 19u}) {
    const DenominatorTable d = precompute_denominators(mesh, *spec.kernel, h);
    const std::vector<double> direct = testing_support::direct_denominators(mesh, h, sigma);
    for (std::size_t n = 0; n < 100; ++n)
      EXPECT_NEAR(std::exp(d.log_denoms[n]) / direct[n], 1.0, 1e-10);
    EXPECT_EQ(d.density_evals, 100u * 99u);
  }
}

TEST(Denominators, ErrorContract) {
  const MdpSpec spec = small_lqg_spec(3, 0.1);
  const TrajectoryMesh one = simulate_mesh(spec, zero_controls(spec), {0.0}, 1, 1);
  EXPECT_THROW(precompute_denominators(one, *spec.kernel, 0), InvalidArgument);
  const TrajectoryMesh two = simulate_mesh(spec, zero_controls(spec), {0.0}, 2, 1);
  EXPECT_THROW(precompute_denominators(two, *spec.kernel, 3), InvalidArgument);
}

TEST(Denominators, IndependentOfWorkers) {
  const MdpSpec spec = small_lqg_spec(4, 0.1, 1.0, 0.01, -1.0, 3);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0, 0, 0}, 301, 2);
  const auto a = precompute_denominators(mesh, *spec.kernel, 2, 1);
  const auto b = precompute_denominators(mesh, *spec.kernel, 2, 3);
  EXPECT_EQ(a.log_denoms, b.log_denoms);
}

TEST(MeshExpectation, ConstantFunctionIsExact) {
  const Fixture f = lqg_fixture(200, 3);
  const std::vector<double> c(200, -1.75);
  Substream rng(1);
  for (int t = 0; t < 200; ++t) {
    const double x[] = {rng.uniform(-1, 1)}, a[] = {rng.uniform(-0.1, 0.1)};
    const ExpectationResult r = mesh_expectation(x, a, 3, c, f.mesh, *f.spec.kernel, f.denoms);
    EXPECT_FALSE(r.weights.degenerate);
    EXPECT_NEAR(r.value, -1.75, 1e-12);
  }
}

TEST(MeshExpectation, WeightsFormASimplex) {
  const Fixture f = lqg_fixture(150, 4);
  std::vector<double> vals(150);
  for (std::size_t n = 0; n < 150; ++n) vals[n] = f.spec.terminal(f.mesh.state(n, 4));
  Substream rng(2);
  for (int t = 0; t < 300; ++t) {
    const double x[] = {rng.uniform(-1.5, 1.5)}, a[] = {rng.uniform(-0.5, 0.5)};
    const ExpectationResult r = mesh_expectation(x, a, 3, vals, f.mesh, *f.spec.kernel, f.denoms);
    double sum = 0.0, dot = 0.0;
    for (std::size_t n = 0; n < 150; ++n) {
      EXPECT_GE(r.weights.weights[n], 0.0);
      sum += r.weights.weights[n];
      dot += r.weights.weights[n] * vals[n];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(r.value, dot, 1e-12);
  }
}

TEST(MeshExpectation, MatchesPlainArithmeticWeights) {
  const double sigma = std::sqrt(0.02);
  const Fixture f = lqg_fixture(80, 5, 2);
  const std::vector<double> direct = testing_support::direct_denominators(f.mesh, 2, sigma);
  std::vector<double> vals(80);
  for (std::size_t n = 0; n < 80; ++n) vals[n] = std::sin(3.0 * f.mesh.state(n, 3)[0]);
  const double x[] = {0.2}, a[] = {0.01};
  double num = 0.0, acc = 0.0;
  for (std::size_t n = 0; n < 80; ++n) {
    const double w = testing_support::gaussian_density(x, a, f.mesh.state(n, 3), sigma) / direct[n];
    num += w;
    acc += w * vals[n];
  }
  const ExpectationResult r = mesh_expectation(x, a, 2, vals, f.mesh, *f.spec.kernel, f.denoms);
  EXPECT_NEAR(r.value, acc / num, 1e-12);
  EXPECT_NEAR(unnormalized_weight_mass(x, a, 2, f.mesh, *f.spec.kernel, f.denoms), num, 1e-10 * num);
}

TEST(MeshExpectation, DegenerateWeightsGiveZero) {
  MdpSpec spec;
  spec.horizon = 1;
  spec.reward = [](std::size_t, ConstVec, ConstVec) { return 0.0; };
  spec.terminal = [](ConstVec x) { return 5.0 + x[0]; };
  spec.kernel = std::make_shared<BoxKernel>(0.5, 1);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 30, 1);
  const DenominatorTable d = precompute_denominators(mesh, *spec.kernel, 0);
  const std::vector<double> vals(30, 5.0);
  const double far[] = {100.0}, a[] = {0.0};
  const ExpectationResult r = mesh_expectation(far, a, 0, vals, mesh, *spec.kernel, d);
  EXPECT_TRUE(r.weights.degenerate);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(std::accumulate(r.weights.weights.begin(), r.weights.weights.end(), 0.0), 0.0);
}

TEST(BackwardSolve, DegenerateCellsAreCountedNotRaised) {
  MdpSpec spec;
  spec.horizon = 1;
  spec.reward = [](std::size_t, ConstVec, ConstVec) { return 0.0; };
  spec.terminal = [](ConstVec) { return 1.0; };
  spec.kernel = std::make_shared<BoxKernel>(0.5, 1);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 20, 3);
  // the +50 action pushes every successor out of reach
  const ActionSet actions(1, {50.0, 0.0});
  const SolveResult r = backward_solve(mesh, spec, actions);
  EXPECT_EQ(r.degenerate_count, 1u);
  EXPECT_EQ(r.values.root_value, 1.0);
  EXPECT_EQ(r.policy.choice(0, 0), 1u);
}

TEST(Contraction, EqualityAndShiftCases) {
  const Fixture f = lqg_fixture(120, 6);
  std::vector<double> vals(120), shifted(120);
  for (std::size_t n = 0; n < 120; ++n) {
    vals[n] = f.spec.terminal(f.mesh.state(n, 4));
    shifted[n] = vals[n] + 0.37;
  }
  const double x[] = {0.1}, a[] = {0.0};
  EXPECT_TRUE(contraction_check(vals, vals, x, a, 3, f.mesh, *f.spec.kernel, f.denoms));
  EXPECT_TRUE(contraction_check(vals, shifted, x, a, 3, f.mesh, *f.spec.kernel, f.denoms));
  const double e1 = mesh_expectation(x, a, 3, vals, f.mesh, *f.spec.kernel, f.denoms).value;
  const double e2 = mesh_expectation(x, a, 3, shifted, f.mesh, *f.spec.kernel, f.denoms).value;
  EXPECT_NEAR(e2 - e1, 0.37, 1e-12);
}

TEST(Contraction, RandomProbes) {
  const Fixture f = lqg_fixture(100, 7);
  Substream rng(3);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> fv(100), gv(100);
    for (std::size_t n = 0; n < 100; ++n) {
      fv[n] = rng.normal();
      gv[n] = rng.normal();
    }
    const double x[] = {rng.uniform(-1, 1)}, a[] = {rng.uniform(-0.2, 0.2)};
    EXPECT_TRUE(contraction_check(fv, gv, x, a, 3, f.mesh, *f.spec.kernel, f.denoms));
  }
}

TEST(BackwardSolve, ConstantTerminal) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MdpSpec spec = small_lqg_spec(1, 0.3);
    spec.terminal = [](ConstVec) { return -0.8; };
    spec.reward = [](std::size_t, ConstVec, ConstVec) { return 0.0; };
    const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 25, seed);
    const SolveResult r = backward_solve(mesh, spec, ActionSet(1, {-0.5, 0.0, 0.7}));
    EXPECT_NEAR(r.values.root_value, -0.8, 1e-14);
  }
}

TEST(BackwardSolve, ActionRewardOnly) {
  const std::size_t H = 5;
  MdpSpec spec = small_lqg_spec(H, 0.2);
  spec.terminal = [](ConstVec) { return 0.0; };
  spec.reward = [](std::size_t, ConstVec, ConstVec a) { return std::sin(3.0 * a[0]); };
  const ActionSet actions(1, {-0.3, 0.1, 0.4, 0.9});
  double best = -INFINITY;
  for (std::size_t j = 0; j < actions.size(); ++j) best = std::max(best, std::sin(3.0 * actions[j][0]));
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 30, 9);
  const SolveResult r = backward_solve(mesh, spec, actions);
  EXPECT_NEAR(r.values.root_value, H * best, 1e-12);
}

TEST(BackwardSolve, TerminalValuesAreExact) {
  const MdpSpec spec = small_lqg_spec(4, 0.14);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 40, 2);
  const SolveResult r = backward_solve(mesh, spec, sample_actions(1, 5, 0.02, 3));
  for (std::size_t n = 0; n < 40; ++n) EXPECT_EQ(r.values.at(n, 4), spec.terminal(mesh.state(n, 4)));
}

TEST(BackwardSolve, RejectsMismatchedInputs) {
  const MdpSpec spec = small_lqg_spec(4, 0.14);
  const MdpSpec other = small_lqg_spec(3, 0.14);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 10, 2);
  EXPECT_THROW(backward_solve(mesh, other, ActionSet(1, {0.0})), InvalidArgument);
  EXPECT_THROW(backward_solve(mesh, spec, ActionSet(2, {0.0, 0.0})), InvalidArgument);
  const TrajectoryMesh one = simulate_mesh(spec, zero_controls(spec), {0.0}, 1, 2);
  EXPECT_THROW(backward_solve(one, spec, ActionSet(1, {0.0})), InvalidArgument);
}

TEST(BackwardSolve, TiesGoToLowestIndex) {
  const MdpSpec spec = small_lqg_spec(2, 0.1);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 10, 2);
  const SolveResult r = backward_solve(mesh, spec, ActionSet(1, {0.0, 0.0, 0.0}));
  for (std::size_t n = 0; n < 10; ++n)
    for (std::size_t h = 0; h < 2; ++h) EXPECT_EQ(r.policy.choice(n, h), 0u);
}

TEST(BackwardSolve, DeterministicAcrossWorkers) {
  const MdpSpec spec = small_lqg_spec(5, 0.14, 1.0, 0.01, -1.0, 2);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0, 0.0}, 120, 8);
  const ActionSet actions = sample_actions(2, 12, 0.02, 4);
  const SolveResult a = backward_solve(mesh, spec, actions, {1});
  const SolveResult b = backward_solve(mesh, spec, actions, {4});
  EXPECT_EQ(a.values.root_value, b.values.root_value);
  for (std::size_t h = 0; h < 5; ++h)
    for (std::size_t n = 0; n < 120; ++n) {
      EXPECT_EQ(a.values.at(n, h), b.values.at(n, h));
      EXPECT_EQ(a.policy.choice(n, h), b.policy.choice(n, h));
    }
}

TEST(BackwardSolve, MonotoneInNextValues) {
  const Fixture f = lqg_fixture(60, 10);
  const ActionSet actions = sample_actions(1, 8, 0.05, 2);
  Substream rng(5);
  std::vector<std::size_t> points(60);
  std::iota(points.begin(), points.end(), 0u);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> lo(60), hi(60);
    for (std::size_t n = 0; n < 60; ++n) {
      lo[n] = rng.normal();
      hi[n] = lo[n] + std::fabs(rng.normal());
    }
    const BellmanStep a = bellman_step(f.spec, f.mesh, actions, 3, lo, f.denoms, points, 1);
    const BellmanStep b = bellman_step(f.spec, f.mesh, actions, 3, hi, f.denoms, points, 1);
    for (std::size_t n = 0; n < 60; ++n) EXPECT_LE(a.values[n], b.values[n] + 1e-12);
  }
}

TEST(BackwardSolve, MatchesNaiveDirectFormula) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 10 + (seed % 5) * 10;  // 10..50
    const std::size_t d = seed % 3 == 2 ? 2 : 1;
    const MdpSpec spec = small_lqg_spec(4, std::sqrt(0.02), 1.0, 0.01, seed % 2 ? 1.0 : -1.0, d);
    const TrajectoryMesh mesh =
        simulate_mesh(spec, zero_controls(spec), std::vector<double>(d, 0.0), n, derive_seed(1, "bf-mesh", seed));
    const ActionSet actions = sample_actions(d, 6, 0.02, derive_seed(1, "bf-actions", seed));
    const double fast = backward_solve(mesh, spec, actions).values.root_value;
    const double naive = testing_support::naive_root_value(spec, mesh, actions);
    EXPECT_NEAR(fast, naive, 1e-8 * std::fabs(naive)) << "seed " << seed;
  }
}

TEST(BackwardSolve, CostAccounting) {
  for (std::size_t n : {2u, 17u, 64u}) {
    const std::size_t H = 6;
    const MdpSpec spec = small_lqg_spec(H, 0.1);
    const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, n, 1);
    const ActionSet actions = sample_actions(1, 7, 0.02, 2);
    const SolveResult r = backward_solve(mesh, spec, actions);
    EXPECT_EQ(r.cost.hn2_budget, H * n * n);
    EXPECT_EQ(r.cost.denominator_evals, H * n * (n - 1));
    EXPECT_GE(r.cost.density_evals, r.cost.hn2_budget);
    // step 0 evaluates x0 only
    EXPECT_EQ(r.cost.weight_builds, ((H - 1) * n + 1) * 7);
    EXPECT_EQ(r.cost.numerator_evals, r.cost.weight_builds * n);
    EXPECT_EQ(r.cost.density_evals, r.cost.denominator_evals + r.cost.numerator_evals);
  }
}

TEST(BackwardSolve, ErrorShrinksWithN) {
  // mean |root - closed form| over 20 replications, non-increasing in N
  LqgConfig cfg;
  cfg.n_repetitions = 20;
  cfg.base_seed = 314;
  const MdpSpec spec = build_lqg_spec(cfg);
  OracleEstimate ref;
  ref.value = 0.4542;
  double previous = INFINITY;
  for (std::size_t n : {10u, 100u, 200u, 500u}) {
    const RunResult row = run_row(cfg, spec, n, ref);
    ASSERT_FALSE(row.error);
    EXPECT_LE(row.mean_abs_error, previous) << "N=" << n;
    previous = row.mean_abs_error;
  }
}
