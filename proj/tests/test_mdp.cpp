#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "meshmdp/meshmdp.hpp"
#include "test_support.hpp"

using namespace meshmdp;
using testing_support::small_lqg_spec;

namespace {

MdpSpec constant_spec(double c, std::size_t horizon = 1) {
  MdpSpec spec;
  spec.horizon = horizon;
  spec.reward = [](std::size_t, ConstVec, ConstVec) { return 0.0; };
  spec.terminal = [c](ConstVec) { return c; };
  spec.kernel = std::make_shared<GaussianShiftKernel>(GaussianShiftKernel::uniform(0.1, horizon, 1));
  return spec;
}

}  // namespace

TEST(MdpSpec, ValidateRejectsBrokenSpecs) {
  MdpSpec ok = small_lqg_spec(3, 0.1);
  EXPECT_NO_THROW(ok.validate());
  MdpSpec s = ok;
  s.horizon = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = ok;
  s.reward = nullptr;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = ok;
  s.kernel = nullptr;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = ok;
  s.state_dim = 2;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = ok;
  s.horizon = 4;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(ActionSet, Invariants) {
  EXPECT_THROW(ActionSet(1, {}), InvalidArgument);
  EXPECT_THROW(ActionSet(2, {1.0, 2.0, 3.0}), InvalidArgument);
  EXPECT_THROW(ActionSet::from_list({{1.0}, {1.0, 2.0}}), InvalidArgument);
  EXPECT_THROW(ActionSet(1, {0.5, 2.0}, {ActionSet::Origin::uniform_sampled, 1, 2, 1.0}),
               InvalidArgument);
  const ActionSet a = ActionSet::from_list({{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.dim(), 2u);
  EXPECT_EQ(a[1][0], 3.0);
  EXPECT_EQ(a.provenance().origin, ActionSet::Origin::explicit_list);
}

TEST(PolicyTable, RejectsInvalidIndex) {
  PolicyTable p(3, 2, ActionSet(1, {0.0, 1.0}));
  EXPECT_NO_THROW(p.set_choice(2, 1, 1));
  EXPECT_THROW(p.set_choice(0, 0, 2), InvalidArgument);
  EXPECT_EQ(p.choice(2, 1), 1u);
}

TEST(SimulateMesh, SinglePathStartsAtX0) {
  const MdpSpec spec = small_lqg_spec(4, 0.1);
  const TrajectoryMesh m = simulate_mesh(spec, zero_controls(spec), {0.37}, 1, 5);
  EXPECT_EQ(m.state(0, 0)[0], 0.37);
  EXPECT_EQ(m.n_paths(), 1u);
}

TEST(SimulateMesh, AllPathsStartAtX0) {
  const MdpSpec spec = small_lqg_spec(3, 0.2, 1.0, 0.01, -1.0, 2);
  const TrajectoryMesh m = simulate_mesh(spec, zero_controls(spec), {0.1, -0.2}, 50, 5);
  for (std::size_t n = 0; n < 50; ++n) {
    EXPECT_EQ(m.state(n, 0)[0], 0.1);
    EXPECT_EQ(m.state(n, 0)[1], -0.2);
  }
}

TEST(SimulateMesh, ErrorContract) {
  const MdpSpec spec = small_lqg_spec(3, 0.1);
  EXPECT_THROW(simulate_mesh(spec, zero_controls(spec), {0.0}, 0, 1), InvalidArgument);
  EXPECT_THROW(simulate_mesh(spec, zero_controls(spec), {0.0, 0.0}, 5, 1), InvalidArgument);
  EXPECT_THROW(simulate_mesh(spec, {{0.0}}, {0.0}, 5, 1), InvalidArgument);
  EXPECT_THROW(simulate_mesh(spec, {{0.0}, {0.0}, {0.0, 1.0}}, {0.0}, 5, 1), InvalidArgument);
}

TEST(SimulateMesh, ZeroDriftMeanAndVariance) {
  // sigma^2 = Delta = 0.01, H = 20
  const std::size_t H = 20;
  const MdpSpec spec = small_lqg_spec(H, 0.1);
  const std::size_t n = 100000;
  const TrajectoryMesh m = simulate_mesh(spec, zero_controls(spec), {0.0}, n, 11);
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = m.state(i, H)[0];
    mean += v;
    sq += v * v;
  }
  mean /= n;
  const double var = (sq - n * mean * mean) / (n - 1);
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(H * 0.01) / std::sqrt(double(n)));
  EXPECT_NEAR(var, 0.2, 0.2 * 0.05);
}

TEST(SimulateMesh, DeterministicAcrossWorkers) {
  const MdpSpec spec = small_lqg_spec(5, 0.1, 1.0, 0.01, -1.0, 3);
  const TrajectoryMesh a = simulate_mesh(spec, zero_controls(spec), {0, 0, 0}, 257, 99, 1);
  const TrajectoryMesh b = simulate_mesh(spec, zero_controls(spec), {0, 0, 0}, 257, 99, 4);
  for (std::size_t h = 0; h <= 5; ++h) {
    const auto sa = a.step(h), sb = b.step(h);
    ASSERT_TRUE(std::equal(sa.begin(), sa.end(), sb.begin()));
  }
  const TrajectoryMesh c = simulate_mesh(spec, zero_controls(spec), {0, 0, 0}, 257, 100, 1);
  EXPECT_NE(a.state(3, 5)[0], c.state(3, 5)[0]);
}

TEST(SimulateMesh, StepRegeneratesFromStoredStates) {
  const MdpSpec spec = small_lqg_spec(6, 0.1, 1.0, 0.01, -1.0, 2);
  const std::vector<std::vector<double>> b(6, std::vector<double>{0.01, -0.02});
  const TrajectoryMesh m = simulate_mesh(spec, b, {0.0, 0.0}, 40, 3);
  for (std::size_t n = 0; n < 40; ++n)
    for (std::size_t h = 0; h < 6; ++h) {
      Substream rng = path_substream(3, n, h);
      const auto y = spec.kernel->sample(h, m.state(n, h), b[h], rng);
      EXPECT_EQ(y[0], m.state(n, h + 1)[0]);
      EXPECT_EQ(y[1], m.state(n, h + 1)[1]);
    }
}

TEST(SimulateMesh, CsvDump) {
  const MdpSpec spec = small_lqg_spec(2, 0.1, 1.0, 0.01, -1.0, 2);
  const TrajectoryMesh m = simulate_mesh(spec, zero_controls(spec), {0.5, 0.25}, 3, 1);
  std::ostringstream os;
  m.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "path,step,x0,x1");
  std::getline(is, line);
  EXPECT_EQ(line, "0,0,0.5,0.25");
  std::size_t rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3u * 3u);
}

TEST(EvaluatePolicy, ConstantPayoff) {
  const MdpSpec spec = constant_spec(2.5);
  const ActionSet actions(1, {0.3});
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 10, 1);
  const SolveResult r = backward_solve(mesh, spec, actions);
  const PolicyEstimate e = evaluate_policy(spec, mesh, r.policy, r.values, 500, 3);
  EXPECT_EQ(e.mean, 2.5);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(EvaluatePolicy, ZeroPolicyMatchesQuadrature) {
  const std::size_t H = 20;
  const MdpSpec spec = small_lqg_spec(H, 0.1);
  const ActionSet actions(1, {0.0});
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 20, 1);
  const SolveResult r = backward_solve(mesh, spec, actions);
  const PolicyEstimate e = evaluate_policy(spec, mesh, r.policy, r.values, 40000, 17, 2);
  const double target = testing_support::normal_expectation(
      [](double z) { return -std::log((1.0 + z * z) / 2.0); }, 0.0, std::sqrt(H * 0.01));
  EXPECT_NEAR(e.mean, target, 4.0 * e.std_error);
}

TEST(EvaluatePolicy, GreedyPolicyNearClosedForm) {
  LqgConfig cfg;
  cfg.n_actions = 50;
  const MdpSpec spec = build_lqg_spec(cfg);
  const ActionSet actions = sample_actions(1, 50, cfg.increment_halfwidth(), 12);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 500, 13);
  const SolveResult r = backward_solve(mesh, spec, actions);
  const PolicyEstimate e = evaluate_policy(spec, mesh, r.policy, r.values, 20000, 14);
  const OracleEstimate ref = lqg_reference(cfg);
  const double combined = std::sqrt(e.std_error * e.std_error + ref.std_error * ref.std_error);
  EXPECT_NEAR(e.mean, 0.4542, 3.0 * combined);
}

TEST(EvaluatePolicy, MismatchedMeshRejected) {
  const MdpSpec spec = small_lqg_spec(3, 0.1);
  const ActionSet actions(1, {0.0});
  const TrajectoryMesh m1 = simulate_mesh(spec, zero_controls(spec), {0.0}, 10, 1);
  const TrajectoryMesh m2 = simulate_mesh(spec, zero_controls(spec), {0.0}, 12, 1);
  const SolveResult r = backward_solve(m1, spec, actions);
  EXPECT_THROW(evaluate_policy(spec, m2, r.policy, r.values, 10, 1), InvalidArgument);
}

TEST(EvaluatePolicy, RepeatedSeedsAreStable) {
  const MdpSpec spec = small_lqg_spec(5, 0.14);
  const ActionSet actions = sample_actions(1, 10, 0.02, 4);
  const TrajectoryMesh mesh = simulate_mesh(spec, zero_controls(spec), {0.0}, 60, 2);
  const SolveResult r = backward_solve(mesh, spec, actions);
  std::vector<PolicyEstimate> reps;
  double grand = 0.0;
  for (int s = 0; s < 40; ++s) {
    reps.push_back(evaluate_policy(spec, mesh, r.policy, r.values, 2000, derive_seed(5, "rep", s)));
    grand += reps.back().mean;
  }
  grand /= reps.size();
  int inside = 0;
  for (const auto& e : reps) inside += std::fabs(e.mean - grand) <= 2.0 * e.std_error;
  EXPECT_GE(inside, 0.95 * reps.size() - 1);
}
