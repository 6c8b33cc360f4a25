// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only helpers: a central finite-difference gradient oracle that never
// touches the reverse sweep, and small hand-built problems.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <span>
#include <vector>

#include "dbsde/net.hpp"
#include "dbsde/problem.hpp"
#include "dbsde/sde.hpp"

namespace dbsde::testing {

/// Central differences of `loss` at `params`, one coordinate at a time.
inline std::vector<double> finite_difference_gradient(const std::function<double(std::span<const double>)>& loss,
                                                      std::vector<double> params, double h = 1e-6) {
  std::vector<double> grad(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + h;
    const double up = loss(params);
    params[k] = saved - h;
    const double down = loss(params);
    params[k] = saved;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Same central differences, but `loss` returns an extended-precision value
/// so that rounding in the loss does not swamp small gradient entries.
inline std::vector<double> extended_fd_gradient(const std::function<long double(std::span<const double>)>& loss,
                                                std::vector<double> params, double h = 1e-6) {
  std::vector<double> grad(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + h;
    const long double up = loss(params);
    const long double hi = params[k];
    params[k] = saved - h;
    const long double down = loss(params);
    const long double lo = params[k];
    params[k] = saved;
    grad[k] = static_cast<double>((up - down) / (hi - lo));
  }
  return grad;
}

/// max_k |analytic_k - fd_k| / (|fd_k| + 1e-12)
inline double max_relative_error(std::span<const double> analytic, std::span<const double> fd) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    worst = std::max(worst, std::abs(analytic[k] - fd[k]) / (std::abs(fd[k]) + 1e-12));
  }
  return worst;
}

/// Problem with constant drift vector and scalar diffusion, zero driver,
/// terminal g, point mass at the origin.
inline ProblemSpec simple_problem(std::size_t d, double horizon, double drift, double sigma,
                                  std::function<double(std::span<const double>)> g) {
  ProblemSpec p;
  p.name = "test";
  p.dim = d;
  p.horizon = horizon;
  p.drift = [drift](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), drift);
  };
  p.diffusion_kind = DiffusionKind::kScalarIdentity;
  p.diffusion = [d, sigma](double, std::span<const double>, DiffusionMatrix& out) {
    out = DiffusionMatrix::scalar(d, sigma);
  };
  p.driver = [](double, std::span<const double>, double, std::span<const double>, DriverPartials* partials) {
    if (partials) {
      partials->dy = 0.0;
      std::fill(partials->dz.begin(), partials->dz.end(), 0.0);
    }
    return 0.0;
  };
  p.driver_is_zero = true;
  p.terminal = std::move(g);
  p.xi = XiSampler::point_mass(std::vector<double>(d, 0.0));
  return p;
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

inline SampleStats sample_stats(std::span<const double> xs) {
  SampleStats s;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= n;
  for (double x : xs) s.variance += (x - s.mean) * (x - s.mean);
  s.variance /= (n - 1.0);
  s.std_error = std::sqrt(s.variance / n);
  return s;
}

/// MLP forward pass for one input row in extended precision.
inline std::vector<long double> reference_mlp(const MLPParams& p, std::vector<long double> h) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = p.weights[l];
    std::vector<long double> next(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) {
      long double acc = p.biases[l][j];
      for (std::size_t k = 0; k < w.rows(); ++k) acc += h[k] * w.at(k, j);
      if (l + 1 < p.weights.size()) {
        if (p.config.activation == ad::Activation::kTanh) acc = std::tanh(acc);
        if (p.config.activation == ad::Activation::kRelu) acc = acc > 0 ? acc : 0.0L;
      }
      next[j] = acc;
    }
    h = std::move(next);
  }
  return h;
}

/// Extended-precision rollout loss for the built-in problems (mu = 0,
/// sigma = sqrt(2) I), written out from the formulas rather than through
/// the library's problem callbacks or tape.
inline long double reference_rollout_loss(const std::string& problem, long double lambda, const SubnetBank& bank,
                                          const TimeGrid& grid, const PathBatch& paths,
                                          const BrownianBatch& increments) {
  const std::size_t batch = paths.batch(), d = paths.dim(), N = grid.steps();
  const bool det = bank.layout.mode == BankMode::kDeterministicXi;
  long double total = 0.0L;
  for (std::size_t i = 0; i < batch; ++i) {
    auto state = [&](std::size_t n) {
      const auto x = paths.at(i, n);
      return std::vector<long double>(x.begin(), x.end());
    };
    long double y = det ? static_cast<long double>(bank.y0[0]) : reference_mlp(bank.psi0, state(0))[0];
    for (std::size_t n = 0; n < N; ++n) {
      std::vector<long double> z;
      if (det && n == 0) z.assign(bank.z0.data().begin(), bank.z0.data().end());
      else z = reference_mlp(bank.phi[bank.phi_index(n)], state(n));
      long double zz = 0.0L, zdw = 0.0L;
      for (std::size_t k = 0; k < d; ++k) {
        zz += z[k] * z[k];
        zdw += z[k] * increments.at(i, n)[k];
      }
      long double f = 0.0L;
      if (problem == "hjb") f = -lambda * zz;
      if (problem == "allen_cahn") f = y - y * y * y;
      y = y - f * grid.dt(n) + zdw;
    }
    long double xx = 0.0L;
    for (long double v : state(N)) xx += v * v;
    long double g = xx;
    if (problem == "hjb") g = std::log((1.0L + xx) / 2.0L);
    if (problem == "allen_cahn") g = 1.0L / (2.0L + 0.4L * xx);
    total += (g - y) * (g - y);
  }
  return total / static_cast<long double>(batch);
}

/// Central-difference estimate of
///   du/dt + mu . grad u + 1/2 Tr(sigma sigma^T Hess u) + f(t, x, u, sigma^T grad u)
/// built only from the exact value function; the exact gradient is not used.
inline double pde_residual(const ProblemSpec& p, double t, std::span<const double> x, double h = 1e-3) {
  const auto& u = p.exact->value;
  const std::size_t d = p.dim;
  std::vector<double> xp(x.begin(), x.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    std::vector<double> y = xp;
    y[i] += di;
    y[j] += dj;
    return u(t, y);
  };
  const double u0 = u(t, xp);
  const double dt = (u(t + h, xp) - u(t - h, xp)) / (2.0 * h);
  std::vector<double> grad(d);
  std::vector<double> hess(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    grad[i] = (at(i, h, i, 0.0) - at(i, -h, i, 0.0)) / (2.0 * h);
    for (std::size_t j = 0; j < d; ++j) {
      hess[i * d + j] = i == j ? (at(i, h, i, 0.0) - 2.0 * u0 + at(i, -h, i, 0.0)) / (h * h)
                               : (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
    }
  }
  std::vector<double> mu(d);
  p.drift(t, xp, mu);
  const std::vector<double> sigma = p.diffusion_at(t, xp).dense();
  double residual = dt;
  for (std::size_t i = 0; i < d; ++i) residual += mu[i] * grad[i];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double a = 0.0;  // (sigma sigma^T)_ij
      for (std::size_t k = 0; k < d; ++k) a += sigma[i * d + k] * sigma[j * d + k];
      residual += 0.5 * a * hess[j * d + i];
    }
  }
  std::vector<double> z(d, 0.0);  // sigma^T grad
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < d; ++i) z[k] += sigma[i * d + k] * grad[i];
  }
  return residual + p.driver_value(t, xp, u0, z);
}

}  // namespace dbsde::testing
