// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dbsde {

std::vector<double> sgd_step(std::span<const double> params, std::span<const double> grads, double lr);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool operator==(const AdamHyper&) const = default;
};

struct AdamState {
  AdamHyper hyper;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step_count = 0;

  static AdamState zeros(std::size_t n, AdamHyper hyper = {});
  bool operator==(const AdamState&) const = default;
};

struct AdamUpdate {
  std::vector<double> params;
  AdamState state;
};

/// One bias-corrected Adam update. Pure: inputs are not modified.
AdamUpdate adam_step(const AdamState& state, std::span<const double> params, std::span<const double> grads,
                     double lr);

/// Piecewise-constant learning rate: (first step, rate) pairs with strictly
/// increasing thresholds.
struct LrSchedule {
  std::vector<std::pair<std::uint64_t, double>> boundaries;

  static LrSchedule constant(double lr) { return {{{0, lr}}}; }
  /// Parses "rate" or "step:rate,step:rate,...".
  static LrSchedule parse(const std::string& text);
  std::string to_string() const;
  void validate() const;
};

double lr_at(const LrSchedule& schedule, std::uint64_t step);

double l2_norm(std::span<const double> v);

/// Rescales `grads` in place so its L2 norm is at most max_norm. Returns the
/// norm before clipping.
double clip_by_norm(std::span<double> grads, double max_norm);

}  // namespace dbsde
