// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Discretized controlled rollout of the backward process:
//
//   Y_0     = psi0(X_0)                        (or the trainable y0)
//   Z_n     = phi_n(X_n)                       (or the trainable z0 at n = 0)
//   Y_{n+1} = Y_n - f(t_n, X_n, Y_n, Z_n) dt_n + Z_n . dW_n
//
// and the terminal-matching loss mean |g(X_N) - Y_N|^2.

#pragma once

#include <cstddef>
#include <vector>

#include "dbsde/autodiff.hpp"
#include "dbsde/net.hpp"
#include "dbsde/problem.hpp"
#include "dbsde/rng.hpp"
#include "dbsde/sde.hpp"

namespace dbsde {

struct RolloutResult {
  ad::VarId loss;
  ad::VarId terminal;            // Y_N, [batch x 1]
  BankVars parameters;           // bank parameters bound on the tape
  std::vector<double> y0_values;      // Y_0 per sample
  std::vector<double> terminal_values;  // Y_N per sample
  std::vector<double> terminal_gap;   // g(X_N) - Y_N per sample
};

/// Records the full rollout on `tape`. Throws NumericError naming (step,
/// sample) if f or g evaluates to a non-finite value.
RolloutResult rollout_loss(ad::Tape& tape, const ProblemSpec& problem, const SubnetBank& bank,
                           const TimeGrid& grid, const PathBatch& paths, const BrownianBatch& increments);

/// The same recursion driven by the exact solution: Y_0 = u(0, X_0),
/// Z_n = sigma^T grad u(t_n, X_n). The loss it returns is pure
/// time-discretization error.
double oracle_rollout_loss(const ProblemSpec& problem, const TimeGrid& grid, const PathBatch& paths,
                           const BrownianBatch& increments);

struct U0Estimate {
  double mean;
  double stddev;
};

/// Deterministic mode: (y0, 0). General mode: mean and sample standard
/// deviation of psi0 over n_eval starting points drawn from `stream`.
U0Estimate estimate_u0(const SubnetBank& bank, const ProblemSpec& problem, std::size_t n_eval,
                       RngStream& stream);

}  // namespace dbsde
