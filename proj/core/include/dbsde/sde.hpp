// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Euler-Maruyama simulation of the forward process
//   X_{n+1} = X_n + mu(t_n, X_n) dt_n + sigma(t_n, X_n) dW_n.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dbsde/problem.hpp"
#include "dbsde/rng.hpp"
#include "dbsde/tensor.hpp"

namespace dbsde {

/// Strictly increasing times 0 = t_0 < ... < t_N = T with N >= 1.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  std::size_t steps() const { return times_.size() - 1; }
  double horizon() const { return times_.back(); }
  double time(std::size_t n) const { return times_[n]; }
  double dt(std::size_t n) const { return times_[n + 1] - times_[n]; }
  const std::vector<double>& times() const { return times_; }

 private:
  std::vector<double> times_;
};

/// t_n = n T / N with the final node set to T exactly.
TimeGrid make_uniform_grid(double horizon, std::size_t steps);

/// Brownian increments dW_n ~ Normal(0, dt_n I): [batch x N x d].
struct BrownianBatch {
  Tensor increments;
  std::size_t batch() const { return increments.dim(0); }
  std::size_t steps() const { return increments.dim(1); }
  std::size_t dim() const { return increments.dim(2); }
  /// Copy of dW_n for every sample: [batch x d].
  Tensor step(std::size_t n) const;
  std::span<const double> at(std::size_t sample, std::size_t n) const;
};

/// Forward states X_{t_n}: [batch x (N+1) x d].
struct PathBatch {
  Tensor states;
  std::size_t batch() const { return states.dim(0); }
  std::size_t steps() const { return states.dim(1) - 1; }
  std::size_t dim() const { return states.dim(2); }
  /// Copy of X_{t_n} for every sample: [batch x d].
  Tensor step(std::size_t n) const;
  std::span<const double> at(std::size_t sample, std::size_t n) const;
};

std::vector<double> euler_step(const ProblemSpec& problem, double t, std::span<const double> x, double dt,
                               std::span<const double> dw);

struct SimulatedBatch {
  PathBatch paths;
  BrownianBatch increments;
};

/// Simulates `batch` paths. Sample i draws its starting point and then its
/// increments from base.substream(stream_id, i), so the result does not
/// depend on `threads`. The returned increments are the ones that drove X.
SimulatedBatch simulate_paths(const ProblemSpec& problem, const TimeGrid& grid, std::size_t batch,
                              const RngStream& base, std::uint64_t stream_id, unsigned threads = 1);

/// Recomputes the Euler recursion from X_{t_0} and the given increments.
PathBatch replay_paths(const ProblemSpec& problem, const TimeGrid& grid, const Tensor& initial_states,
                       const BrownianBatch& increments);

}  // namespace dbsde
