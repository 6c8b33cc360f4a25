// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dbsde/error.hpp"
#include "dbsde/optim.hpp"
#include "dbsde/rng.hpp"

namespace dbsde {
namespace {

TEST(Sgd, Examples) {
  const auto p = sgd_step(std::vector<double>{1, 2}, std::vector<double>{0.5, -1}, 0.1);
  EXPECT_DOUBLE_EQ(p[0], 0.95);
  EXPECT_DOUBLE_EQ(p[1], 2.1);
  EXPECT_EQ(sgd_step(std::vector<double>{3, -4}, std::vector<double>{0, 0}, 0.5), (std::vector<double>{3, -4}));
}

TEST(Sgd, Errors) {
  EXPECT_THROW(sgd_step(std::vector<double>{1}, std::vector<double>{1}, 0.0), ConfigError);
  EXPECT_THROW(sgd_step(std::vector<double>{1}, std::vector<double>{1}, -1.0), ConfigError);
  EXPECT_THROW(sgd_step(std::vector<double>{1, 2}, std::vector<double>{1}, 0.1), DimensionError);
}

TEST(Adam, FirstStepIsSignOfGradient) {
  RngStream rng(4);
  std::vector<double> params(50), grads(50);
  for (std::size_t k = 0; k < 50; ++k) {
    params[k] = rng.uniform(-1, 1);
    const double mag = std::pow(10.0, rng.uniform(-3.0, 2.0));
    grads[k] = rng.uniform() < 0.5 ? -mag : mag;
  }
  // The first step is exactly -lr g / (|g| + eps), which is within
  // lr eps / |g| of -lr sign(g); with |g| >= 1e-3 that is <= 1e-9 for lr <= 1e-4.
  const double lr = 1e-4;
  const auto u = adam_step(AdamState::zeros(50), params, grads, lr);
  for (std::size_t k = 0; k < 50; ++k) {
    const double step = u.params[k] - params[k];
    EXPECT_NEAR(step, -lr * std::copysign(1.0, grads[k]), 1e-9) << k;
  }
  EXPECT_EQ(u.state.step_count, 1u);
  const auto big = adam_step(AdamState::zeros(50), params, grads, 0.05);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_NEAR(big.params[k] - params[k], -0.05 * grads[k] / (std::abs(grads[k]) + 1e-8), 1e-15) << k;
  }
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
  const std::vector<double> params{1.5, -2.0, 0.0};
  AdamState state = AdamState::zeros(3);
  std::vector<double> p = params;
  for (int i = 0; i < 10; ++i) {
    auto u = adam_step(state, p, std::vector<double>(3, 0.0), 0.1);
    p = u.params;
    state = u.state;
  }
  EXPECT_EQ(p, params);
  EXPECT_EQ(state.step_count, 10u);
}

TEST(Adam, ZeroBetasSpecialisation) {
  AdamHyper h{0.0, 0.0, 1e-8};
  AdamState state = AdamState::zeros(3, h);
  std::vector<double> p{0.0, 1.0, 2.0};
  const std::vector<std::vector<double>> gs{{0.5, -2.0, 1e-3}, {-0.1, 4.0, 3.0}, {2.0, 1e-6, -7.0}};
  for (const auto& g : gs) {
    const auto u = adam_step(state, p, g, 0.05);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(u.params[k], p[k] - 0.05 * g[k] / (std::abs(g[k]) + 1e-8), 1e-15);
    }
    p = u.params;
    state = u.state;
  }
}

TEST(Adam, MatchesHandRecursion) {
  const AdamHyper h;
  AdamState state = AdamState::zeros(2);
  std::vector<double> p{0.3, -0.7}, m(2, 0.0), v(2, 0.0), ref = p;
  const std::vector<std::vector<double>> gs{{1.0, -0.5}, {0.2, 0.1}, {-3.0, 0.0}, {0.5, 0.5}};
  for (std::size_t t = 1; t <= gs.size(); ++t) {
    const auto& g = gs[t - 1];
    for (std::size_t k = 0; k < 2; ++k) {
      m[k] = h.beta1 * m[k] + (1 - h.beta1) * g[k];
      v[k] = h.beta2 * v[k] + (1 - h.beta2) * g[k] * g[k];
      const double mh = m[k] / (1 - std::pow(h.beta1, t));
      const double vh = v[k] / (1 - std::pow(h.beta2, t));
      ref[k] -= 0.01 * mh / (std::sqrt(vh) + h.epsilon);
    }
    const auto u = adam_step(state, p, g, 0.01);
    p = u.params;
    state = u.state;
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(p[k], ref[k], 1e-14);
  }
}

TEST(Adam, PureFunctionOfInputs) {
  AdamState state = AdamState::zeros(3);
  state.m = {0.1, 0.2, 0.3};
  state.v = {0.01, 0.02, 0.03};
  state.step_count = 5;
  const AdamState before = state;
  const std::vector<double> p{1, 2, 3}, g{-1, 0.5, 2};
  const auto a = adam_step(state, p, g, 1e-3);
  const auto b = adam_step(state, p, g, 1e-3);
  EXPECT_EQ(state, before);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.state, b.state);
}

TEST(Adam, Errors) {
  EXPECT_THROW(adam_step(AdamState::zeros(2), std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, 0.1),
               DimensionError);
  EXPECT_THROW(adam_step(AdamState::zeros(2), std::vector<double>{1, 2}, std::vector<double>{1}, 0.1),
               DimensionError);
  EXPECT_THROW(adam_step(AdamState::zeros(1), std::vector<double>{1}, std::vector<double>{1}, 0.0), ConfigError);
}

TEST(LrSchedule, Lookup) {
  const LrSchedule s{{{0, 1e-2}, {1000, 1e-3}}};
  EXPECT_EQ(lr_at(s, 0), 1e-2);
  EXPECT_EQ(lr_at(s, 500), 1e-2);
  EXPECT_EQ(lr_at(s, 1000), 1e-3);
  EXPECT_EQ(lr_at(s, 99999), 1e-3);
  EXPECT_EQ(lr_at(LrSchedule::constant(5e-3), 123456), 5e-3);
  // First rate applies before the first boundary.
  EXPECT_EQ(lr_at(LrSchedule{{{10, 0.5}, {20, 0.25}}}, 3), 0.5);
}

TEST(LrSchedule, ParseAndPrint) {
  const LrSchedule s = LrSchedule::parse("0:1e-2, 2000:1e-3,4000:5e-4");
  ASSERT_EQ(s.boundaries.size(), 3u);
  EXPECT_EQ(s.boundaries[1].first, 2000u);
  EXPECT_EQ(s.boundaries[2].second, 5e-4);
  EXPECT_EQ(LrSchedule::parse(s.to_string()).boundaries, s.boundaries);
  EXPECT_EQ(LrSchedule::parse("0.005").boundaries, LrSchedule::constant(0.005).boundaries);
}

TEST(LrSchedule, Errors) {
  EXPECT_THROW(lr_at(LrSchedule{}, 0), ConfigError);
  EXPECT_THROW(LrSchedule::parse(""), ConfigError);
  EXPECT_THROW(LrSchedule::parse("0:1e-2,0:1e-3"), ConfigError);
  EXPECT_THROW(LrSchedule::parse("100:1e-2,50:1e-3"), ConfigError);
  EXPECT_THROW(LrSchedule::parse("0:-1"), ConfigError);
  EXPECT_THROW(LrSchedule::parse("0:abc"), ConfigError);
  EXPECT_THROW(LrSchedule::parse("0"), ConfigError);
}

TEST(Clip, ScalesDownOnlyAboveThreshold) {
  std::vector<double> g{3.0, 4.0};
  EXPECT_EQ(clip_by_norm(g, 10.0), 5.0);
  EXPECT_EQ(g, (std::vector<double>{3.0, 4.0}));
  EXPECT_EQ(clip_by_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g[0], 0.6, 1e-15);
  EXPECT_NEAR(g[1], 0.8, 1e-15);
  EXPECT_NEAR(l2_norm(g), 1.0, 1e-15);
}

}  // namespace
}  // namespace dbsde
