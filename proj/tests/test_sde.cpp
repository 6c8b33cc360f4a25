// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dbsde/error.hpp"
#include "dbsde/rng.hpp"
#include "dbsde/sde.hpp"
#include "support/test_support.hpp"

namespace dbsde {
namespace {

double sum_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

TEST(Rng, SplitmixReferenceOutput) {
  // Reference value of splitmix64 seeded with 0.
  RngStream s(0);
  EXPECT_EQ(s.next_u64(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(s.next_u64(), 0x6E789E6AA1B965F4ull);
}

TEST(Rng, UniformIsInHalfOpenUnitInterval) {
  EXPECT_GT(bits_to_unit_interval(0), 0.0);
  EXPECT_EQ(bits_to_unit_interval(~0ull), 1.0);
  RngStream s(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Rng, BoxMullerHandExample) {
  const NormalPair p = box_muller(0.5, 0.25);
  const double r = std::sqrt(-2.0 * std::log(0.5));
  EXPECT_NEAR(p.first, 0.0, 1e-15);
  EXPECT_NEAR(p.second, r, 1e-15);
  EXPECT_NEAR(p.second, 1.1774100225154747, 1e-15);
}

TEST(Rng, NormalMomentsOverAMillionDraws) {
  RngStream s(2024);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = s.normal();
  const auto st = testing::sample_stats(xs);
  EXPECT_LT(std::abs(st.mean), 4.0 / 1000.0);
  EXPECT_LT(std::abs(st.variance - 1.0), 0.01);
}

TEST(Rng, SameSeedSameSequence) {
  RngStream a(77), b(77);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, DistinctStreamIdsDiffer) {
  RngStream a = RngStream::derive(1, 10, 0), b = RngStream::derive(1, 11, 0), c = RngStream::derive(1, 10, 1);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_EQ(RngStream::derive(1, 10, 0).next_u64(), x);
}

TEST(Grid, UniformExamples) {
  EXPECT_EQ(make_uniform_grid(1.0, 4).times(), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(make_uniform_grid(0.7, 1).times(), (std::vector<double>{0, 0.7}));
  for (std::size_t n : {3u, 7u, 11u, 29u}) EXPECT_EQ(make_uniform_grid(0.3, n).horizon(), 0.3);
}

TEST(Grid, InvalidGridsRejected) {
  EXPECT_THROW(make_uniform_grid(0.0, 4), ConfigError);
  EXPECT_THROW(make_uniform_grid(-1.0, 4), ConfigError);
  EXPECT_THROW(make_uniform_grid(1.0, 0), ConfigError);
  EXPECT_THROW(TimeGrid({0.0}), ConfigError);
  EXPECT_THROW(TimeGrid({0.1, 0.5}), ConfigError);
  EXPECT_THROW(TimeGrid({0.0, 0.5, 0.5}), ConfigError);
  EXPECT_NO_THROW(TimeGrid({0.0, 0.1, 0.5, 2.0}));
}

TEST(EulerStep, Examples) {
  const ProblemSpec unit = testing::simple_problem(2, 1.0, 0.0, 1.0, sum_sq);
  const auto a = euler_step(unit, 0.0, std::vector<double>{0, 0}, 0.1, std::vector<double>{0.5, -0.5});
  EXPECT_EQ(a, (std::vector<double>{0.5, -0.5}));

  ProblemSpec linear = testing::simple_problem(2, 1.0, 0.0, 0.0, sum_sq);
  linear.drift = [](double, std::span<const double> x, std::span<double> out) {
    std::copy(x.begin(), x.end(), out.begin());
  };
  const auto b = euler_step(linear, 0.0, std::vector<double>{1, 2}, 0.1, std::vector<double>{3, 4});
  EXPECT_DOUBLE_EQ(b[0], 1.1);
  EXPECT_DOUBLE_EQ(b[1], 2.2);

  const ProblemSpec scaled = testing::simple_problem(2, 1.0, 0.0, std::numbers::sqrt2, sum_sq);
  const auto c = euler_step(scaled, 0.0, std::vector<double>{0, 0}, 123.0, std::vector<double>{1, 0});
  EXPECT_EQ(c, (std::vector<double>{std::numbers::sqrt2, 0.0}));
}

TEST(EulerStep, NonFiniteResultRaises) {
  const ProblemSpec p = testing::simple_problem(1, 1.0, 1e308, 1.0, sum_sq);
  EXPECT_THROW(euler_step(p, 0.0, std::vector<double>{1e308}, 10.0, std::vector<double>{0.0}), NumericError);
}

TEST(SimulatePaths, FrozenWithoutDriftOrNoise) {
  ProblemSpec p = testing::simple_problem(3, 1.0, 0.0, 0.0, sum_sq);
  p.xi = XiSampler::uniform_box({-1, -1, -1}, {1, 1, 1});
  const auto sim = simulate_paths(p, make_uniform_grid(1.0, 5), 16, RngStream(3), 1);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto x0 = sim.paths.at(i, 0);
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto xn = sim.paths.at(i, n);
      EXPECT_TRUE(std::equal(x0.begin(), x0.end(), xn.begin()));
    }
  }
}

TEST(SimulatePaths, TerminalStateTelescopes) {
  ProblemSpec p = testing::simple_problem(1, 1.0, 0.0, 1.0, sum_sq);
  p.xi = XiSampler::point_mass({0.75});
  const auto sim = simulate_paths(p, make_uniform_grid(1.0, 10), 50, RngStream(9), 1);
  for (std::size_t i = 0; i < 50; ++i) {
    double x = 0.75;
    for (std::size_t n = 0; n < 10; ++n) x += sim.increments.at(i, n)[0];
    EXPECT_EQ(sim.paths.at(i, 10)[0], x);
  }
}

TEST(SimulatePaths, TerminalVarianceMatchesHorizon) {
  const ProblemSpec p = testing::simple_problem(1, 1.0, 0.0, 1.0, sum_sq);
  const auto sim = simulate_paths(p, make_uniform_grid(1.0, 10), 100000, RngStream(11), 1);
  std::vector<double> xt(100000);
  for (std::size_t i = 0; i < xt.size(); ++i) xt[i] = sim.paths.at(i, 10)[0];
  EXPECT_LT(std::abs(testing::sample_stats(xt).variance - 1.0), 0.03);
}

TEST(SimulatePaths, IncrementMomentsWithinFourStandardErrors) {
  const ProblemSpec p = testing::simple_problem(2, 1.0, 0.0, 1.0, sum_sq);
  const TimeGrid grid({0.0, 0.1, 0.4, 1.0});
  const std::size_t batch = 100000;
  const auto sim = simulate_paths(p, grid, batch, RngStream(13), 1);
  for (std::size_t n = 0; n < grid.steps(); ++n) {
    for (std::size_t k = 0; k < 2; ++k) {
      std::vector<double> xs(batch);
      for (std::size_t i = 0; i < batch; ++i) xs[i] = sim.increments.at(i, n)[k];
      const auto st = testing::sample_stats(xs);
      const double dt = grid.dt(n);
      EXPECT_LT(std::abs(st.mean), 4.0 * std::sqrt(dt / batch)) << n << "," << k;
      // Var of the sample variance of a normal is 2 dt^2 / (n - 1).
      EXPECT_LT(std::abs(st.variance - dt), 4.0 * dt * std::sqrt(2.0 / (batch - 1.0))) << n << "," << k;
    }
  }
}

TEST(SimulatePaths, ReplayReproducesPathsBitwise) {
  ProblemSpec p = testing::simple_problem(3, 1.0, 0.3, 1.7, sum_sq);
  p.xi = XiSampler::uniform_box({-1, 0, 1}, {1, 2, 3});
  const TimeGrid grid = make_uniform_grid(0.5, 7);
  const auto sim = simulate_paths(p, grid, 40, RngStream(21), 5);
  const auto replayed = replay_paths(p, grid, sim.paths.step(0), sim.increments);
  EXPECT_EQ(replayed.states, sim.paths.states);
}

TEST(SimulatePaths, SeedDeterminismAndThreadInvariance) {
  ProblemSpec p = testing::simple_problem(4, 1.0, 0.1, 1.2, sum_sq);
  p.xi = XiSampler::uniform_box({-1, -1, -1, -1}, {1, 1, 1, 1});
  const TimeGrid grid = make_uniform_grid(1.0, 6);
  const auto serial = simulate_paths(p, grid, 333, RngStream(8), 2);
  const auto again = simulate_paths(p, grid, 333, RngStream(8), 2);
  const auto parallel = simulate_paths(p, grid, 333, RngStream(8), 2, 4);
  EXPECT_EQ(serial.paths.states, again.paths.states);
  EXPECT_EQ(serial.paths.states, parallel.paths.states);
  EXPECT_EQ(serial.increments.increments, parallel.increments.increments);
  const auto other = simulate_paths(p, grid, 333, RngStream(9), 2);
  EXPECT_NE(serial.paths.states, other.paths.states);
}

TEST(SimulatePaths, ZeroBatchRejected) {
  const ProblemSpec p = testing::simple_problem(1, 1.0, 0.0, 1.0, sum_sq);
  EXPECT_THROW(simulate_paths(p, make_uniform_grid(1.0, 2), 0, RngStream(1), 1), ConfigError);
}

}  // namespace
}  // namespace dbsde
