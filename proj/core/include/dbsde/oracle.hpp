// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference solvers that share no code path with the trained rollout.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dbsde/problem.hpp"
#include "dbsde/rng.hpp"
#include "dbsde/sde.hpp"

namespace dbsde {

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for deterministic oracles
  std::string provenance;  // sample count or grid description
};

/// u(0, x0) = E[g(X_T)] for a problem with f = 0, X simulated by Euler from
/// the point mass at x0. Requires n_samples >= 100.
OracleEstimate mc_feynman_kac(const ProblemSpec& problem, std::span<const double> x0, std::size_t n_samples,
                              const TimeGrid& grid, RngStream& stream);

/// Solution at (0, x0) of du/dt + Laplace(u) - lambda |grad u|^2 = 0,
/// u(T, .) = g, via the log transform:
///   u(0, x0) = -(1/lambda) ln E[exp(-lambda g(x0 + sqrt(2) W_T))],
/// with W_T ~ Normal(0, T I) sampled in one shot. The exponent is shifted by
/// the sample minimum of g; std_error is the delta-method error.
OracleEstimate cole_hopf_mc(double lambda, const std::function<double(std::span<const double>)>& g,
                            std::span<const double> x0, double horizon, std::size_t n_samples,
                            RngStream& stream);

/// The hjb built-in uses f = -lambda |z|^2 with z = sqrt(2) grad u, i.e. a
/// coefficient 2 lambda on |grad u|^2. Returns that coefficient.
double hjb_cole_hopf_coefficient(const ProblemSpec& hjb_problem);

/// Half-width 6 sigma sqrt(T) with sigma taken at (0, x0).
double default_fd_half_width(const ProblemSpec& problem, double x0);

/// Smallest K allowed by the explicit-driver stability rule
/// K >= 4 M^2 sigma^2 T / L^2 (sigma^2 maximized over the initial grid).
std::size_t fd_min_time_steps(const ProblemSpec& problem, double x0, double half_width, std::size_t M);

/// Solves a d = 1 problem backward from u(T, .) = g on [x0 - L, x0 + L] with
/// M + 1 nodes and K time steps: Crank-Nicolson for mu u_x + 1/2 sigma^2 u_xx,
/// explicit driver with z = sigma u_x (second-order Adams-Bashforth
/// extrapolation after the first step), zero-curvature boundaries. Returns
/// u(0, x0).
OracleEstimate fd_semilinear_1d(const ProblemSpec& problem, double x0, double half_width, std::size_t M,
                                std::size_t K);

}  // namespace dbsde
