#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "morphgrad/envs/benchmark.hpp"
#include "morphgrad/envs/hopper.hpp"
#include "morphgrad/envs/spring_mass.hpp"
#include "morphgrad/errors.hpp"

using namespace morphgrad;

namespace {

void zero_policy(std::span<const double>, std::span<double> a) {
  for (double& v : a) v = 0.0;
}

// Fixed nonzero hopper controller: knee pushes while the foot is down, hip
// holds the leg slightly forward.
void hopper_reference(std::span<const double> obs, std::span<double> a) {
  a[0] = std::tanh(2.0 * (0.15 - obs[3]) - 0.2 * obs[5]);
  a[1] = obs[7] > 0.5 ? 0.6 : -0.4;
}

HopperParams quiet_hopper() {
  HopperParams p;
  p.init_velocity_noise = 0.0;
  return p;
}

}  // namespace

TEST(Benchmark, SphereValues) {
  const BenchmarkEnv env{BenchmarkKind::kSphere, 2};
  EXPECT_EQ(benchmark_fitness(env, std::vector<double>{0, 0}), 0.0);
  EXPECT_EQ(benchmark_fitness(env, std::vector<double>{1, 1}), -2.0);
}

TEST(Benchmark, RastriginOptimumAndIntegerLattice) {
  const BenchmarkEnv env{BenchmarkKind::kRastrigin, 3};
  EXPECT_EQ(benchmark_fitness(env, std::vector<double>{0, 0, 0}), 0.0);
  // cos(2 pi k) = 1 on integers, leaving -sum w^2.
  EXPECT_NEAR(benchmark_fitness(env, std::vector<double>{1, -2, 0}), -5.0, 1e-12);
  EXPECT_LT(benchmark_fitness(env, std::vector<double>{0.5, 0, 0}), -20.0);
}

TEST(Benchmark, KindNames) {
  EXPECT_EQ(parse_benchmark_kind("sphere"), BenchmarkKind::kSphere);
  EXPECT_EQ(to_string(BenchmarkKind::kRastrigin), "rastrigin");
  EXPECT_THROW(parse_benchmark_kind("ackley"), ContractError);
}

TEST(Benchmark, DimensionMismatchThrows) {
  EXPECT_THROW(benchmark_fitness({BenchmarkKind::kSphere, 3}, std::vector<double>{1.0}),
               ContractError);
}

TEST(SpringMass, ZeroPolicyStaysAtRest) {
  const SpringMass1D env;
  const auto r = env.rollout(env.default_design(), zero_policy, 0);
  EXPECT_LT(std::abs(r.task_score), 1e-9);
  EXPECT_EQ(r.steps, env.params().steps);
  EXPECT_FALSE(r.diverged);
}

TEST(SpringMass, DeterministicAndSeedIndependent) {
  const SpringMass1D env;
  const auto a = env.rollout(env.default_design(), SpringMass1D::reference_policy, 1);
  const auto b = env.rollout(env.default_design(), SpringMass1D::reference_policy, 1);
  const auto c = env.rollout(env.default_design(), SpringMass1D::reference_policy, 999);
  EXPECT_EQ(a.task_score, b.task_score);
  EXPECT_EQ(a.task_score, c.task_score);
  EXPECT_GT(a.task_score, 1.0);
}

TEST(SpringMass, MorphologySensitivity) {
  const SpringMass1D env;
  const double a = env.rollout(std::vector<double>{0.5, 0.5}, SpringMass1D::reference_policy, 0)
                       .task_score;
  const double b = env.rollout(std::vector<double>{1.1, 0.5}, SpringMass1D::reference_policy, 0)
                       .task_score;
  EXPECT_GT(std::abs(a - b), 0.1 * std::max(std::abs(a), std::abs(b)));
}

TEST(SpringMass, StableAcrossAdmissibleDesigns) {
  const SpringMass1D env;
  for (double l : {0.25, 0.5, 1.0, 1.5, 1.75})
    for (double t : {0.125, 0.5, 0.875}) {
      const auto r = env.rollout(std::vector<double>{l, t}, SpringMass1D::reference_policy, 0);
      EXPECT_FALSE(r.diverged) << l << " " << t;
      EXPECT_TRUE(std::isfinite(r.task_score));
    }
}

TEST(SpringMass, HalvingTimestepBarelyChangesScore) {
  SpringMassParams fine;
  fine.dt = 0.005;
  fine.steps = 2000;
  const SpringMass1D coarse_env, fine_env(fine);
  const double a =
      coarse_env.rollout(coarse_env.default_design(), SpringMass1D::reference_policy, 0).task_score;
  const double b =
      fine_env.rollout(fine_env.default_design(), SpringMass1D::reference_policy, 0).task_score;
  EXPECT_LT(std::abs(a - b), 0.01 * std::abs(a));
}

TEST(SpringMass, BlowUpGivesSentinel) {
  SpringMassParams p;
  p.dt = 5.0;
  const SpringMass1D env(p);
  const auto r = env.rollout(env.default_design(), SpringMass1D::reference_policy, 0);
  EXPECT_TRUE(r.diverged);
  EXPECT_EQ(r.task_score, kDivergedScore);
}

TEST(SpringMass, LegAreaIsLengthTimesThickness) {
  EXPECT_DOUBLE_EQ(SpringMass1D().leg_area(std::vector<double>{1.2, 0.5}), 0.6);
}

TEST(Hopper, ZeroPolicyDeterministicOver100Calls) {
  const PlanarHopper env;
  const auto first = env.rollout(env.default_design(), zero_policy, 3);
  for (int i = 0; i < 100; ++i) {
    const auto r = env.rollout(env.default_design(), zero_policy, 3);
    ASSERT_EQ(r.task_score, first.task_score);
    ASSERT_EQ(r.steps, first.steps);
  }
}

TEST(Hopper, ZeroTorqueStaysInPlace) {
  const PlanarHopper env(quiet_hopper());
  const auto t = env.simulate(env.default_design(), zero_policy, 0);
  EXPECT_FALSE(t.fell);
  EXPECT_EQ(t.result.steps, 1000u);
  EXPECT_LT(std::abs(t.final_state.q[0]), 1e-6);
  EXPECT_LT(std::abs(t.result.task_score), 1e-6);
}

TEST(Hopper, ZeroPolicyStateStaysBounded) {
  const PlanarHopper env;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = env.simulate(env.default_design(), zero_policy, seed);
    EXPECT_FALSE(t.result.diverged);
    for (double v : t.final_state.qd) EXPECT_LT(std::abs(v), 1.0);
  }
}

TEST(Hopper, HalvingTimestepChangesFinalStateByLessThanOnePercent) {
  HopperParams fine = quiet_hopper();
  fine.dt = 0.005;
  fine.max_steps = 2000;
  const PlanarHopper coarse_env(quiet_hopper()), fine_env(fine);
  const auto a = coarse_env.simulate(coarse_env.default_design(), zero_policy, 0).final_state;
  const auto b = fine_env.simulate(fine_env.default_design(), zero_policy, 0).final_state;
  EXPECT_LT(std::abs(a.q[1] - b.q[1]), 0.01 * std::abs(a.q[1]));
  EXPECT_LT(std::abs(a.q[0] - b.q[0]), 1e-6);
}

TEST(Hopper, FallAddsTerminalPenalty) {
  HopperParams p = quiet_hopper();
  p.fall_height = 5.0;  // above the standing torso height
  const PlanarHopper env(p);
  const auto t = env.simulate(env.default_design(), zero_policy, 0);
  EXPECT_TRUE(t.fell);
  EXPECT_EQ(t.result.steps, 1u);
  EXPECT_NEAR(t.result.task_score, p.fall_penalty, 1e-3);
}

TEST(Hopper, NonFiniteActionGivesSentinel) {
  const PlanarHopper env;
  const auto r = env.rollout(env.default_design(),
                             [](std::span<const double>, std::span<double> a) {
                               a[0] = std::nan("");
                               a[1] = 0.0;
                             },
                             0);
  EXPECT_TRUE(r.diverged);
  EXPECT_EQ(r.task_score, kDivergedScore);
}

TEST(Hopper, MorphologySensitivity) {
  const PlanarHopper env(quiet_hopper());
  const double a = env.rollout(std::vector<double>{0.7, 0.7, 0.3, 0.3}, hopper_reference, 0)
                       .task_score;
  const double b = env.rollout(std::vector<double>{0.35, 0.5, 0.15, 0.2}, hopper_reference, 0)
                       .task_score;
  EXPECT_GT(std::abs(a - b), 0.1 * std::max(std::abs(a), std::abs(b)));
}

TEST(Hopper, ReferencePolicyDeterministicPerSeed) {
  const PlanarHopper env;
  const auto a = env.rollout(env.default_design(), hopper_reference, 11);
  const auto b = env.rollout(env.default_design(), hopper_reference, 11);
  const auto c = env.rollout(env.default_design(), hopper_reference, 12);
  EXPECT_EQ(a.task_score, b.task_score);
  EXPECT_NE(a.task_score, c.task_score);
  EXPECT_FALSE(env.seed_independent());
  EXPECT_TRUE(PlanarHopper(quiet_hopper()).seed_independent());
}

TEST(Hopper, ObservationLayout) {
  const PlanarHopper env(quiet_hopper());
  std::vector<double> first;
  env.rollout(env.default_design(),
              [&](std::span<const double> obs, std::span<double> a) {
                if (first.empty()) first.assign(obs.begin(), obs.end());
                a[0] = a[1] = 0.0;
              },
              0);
  ASSERT_EQ(first.size(), 8u);
  EXPECT_NEAR(first[0], 1.4, 0.01);  // torso height ~ leg length
  EXPECT_EQ(first[3], 0.0);          // hip angle
  EXPECT_EQ(first[4], 0.0);          // knee angle
  EXPECT_EQ(first[7], 1.0);          // foot contact
}

TEST(Hopper, InvalidDesignThrows) {
  const PlanarHopper env;
  EXPECT_THROW(env.rollout(std::vector<double>{0.7, 0.7, 0.3}, zero_policy, 0), ContractError);
  EXPECT_THROW(env.rollout(std::vector<double>{0.7, -0.7, 0.3, 0.3}, zero_policy, 0),
               ContractError);
}
