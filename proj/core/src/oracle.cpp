// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dbsde/error.hpp"

namespace dbsde {

namespace {

struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

void require_samples(std::size_t n) {
  if (n < 100) throw ConfigError("Monte Carlo oracles need at least 100 samples");
}

// Tridiagonal solve; sub[0] and super[n-1] are ignored. Overwrites rhs.
void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> super,
                       std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * super[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
}

// Interior rows (nodes 1..M-1) of the operator mu d/dx + 1/2 sigma^2 d2/dx2,
// with u_0 = 2u_1 - u_2 and u_M = 2u_{M-1} - u_{M-2} substituted in.
struct Operator {
  std::vector<double> sub, diag, super;
};

Operator build_operator(const ProblemSpec& problem, double t, const std::vector<double>& xs, double h) {
  const std::size_t M = xs.size() - 1, n = M - 1;
  Operator op{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  std::vector<double> mu(1);
  DiffusionMatrix sigma;
  for (std::size_t i = 1; i < M; ++i) {
    const std::span<const double> x{&xs[i], 1};
    problem.drift(t, x, mu);
    problem.diffusion(t, x, sigma);
    const double s = sigma.dense()[0];
    const double a = 0.5 * s * s / (h * h) - mu[0] / (2.0 * h);
    const double b = -s * s / (h * h);
    const double c = 0.5 * s * s / (h * h) + mu[0] / (2.0 * h);
    op.sub[i - 1] = a;
    op.diag[i - 1] = b;
    op.super[i - 1] = c;
  }
  op.diag[0] += 2.0 * op.sub[0];
  op.super[0] -= op.sub[0];
  op.sub[0] = 0.0;
  op.diag[n - 1] += 2.0 * op.super[n - 1];
  op.sub[n - 1] -= op.super[n - 1];
  op.super[n - 1] = 0.0;
  return op;
}

}  // namespace

OracleEstimate mc_feynman_kac(const ProblemSpec& problem, std::span<const double> x0, std::size_t n_samples,
                              const TimeGrid& grid, RngStream& stream) {
  if (!problem.driver_is_zero) {
    throw ConfigError("mc_feynman_kac applies only to problems with f = 0 (problem '" + problem.name + "')");
  }
  require_samples(n_samples);
  const std::size_t d = problem.dim;
  if (x0.size() != d) throw DimensionError("mc_feynman_kac: x0 has wrong dimension");
  std::vector<double> x(d), next(d), drift(d), noise(d), dw(d);
  DiffusionMatrix sigma;
  RunningStats stats;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::copy(x0.begin(), x0.end(), x.begin());
    for (std::size_t n = 0; n < grid.steps(); ++n) {
      const double t = grid.time(n), dt = grid.dt(n), sqrt_dt = std::sqrt(dt);
      for (double& w : dw) w = sqrt_dt * stream.normal();
      problem.drift(t, x, drift);
      problem.diffusion(t, x, sigma);
      sigma.apply(dw, noise);
      for (std::size_t k = 0; k < d; ++k) x[k] += drift[k] * dt + noise[k];
    }
    const double g = problem.terminal(x);
    if (!std::isfinite(g)) throw NumericError("mc_feynman_kac: non-finite g at sample " + std::to_string(s));
    stats.add(g);
  }
  return {stats.mean, stats.std_error(), std::to_string(n_samples) + " samples, " +
                                             std::to_string(grid.steps()) + " steps"};
}

OracleEstimate cole_hopf_mc(double lambda, const std::function<double(std::span<const double>)>& g,
                            std::span<const double> x0, double horizon, std::size_t n_samples,
                            RngStream& stream) {
  if (!(lambda > 0.0)) throw ConfigError("cole_hopf_mc: lambda must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("cole_hopf_mc: T must be > 0");
  require_samples(n_samples);
  const std::size_t d = x0.size();
  const double scale = std::sqrt(2.0 * horizon);
  std::vector<double> values(n_samples), x(d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t k = 0; k < d; ++k) x[k] = x0[k] + scale * stream.normal();
    values[s] = g(x);
    if (!std::isfinite(values[s])) {
      throw NumericError("cole_hopf_mc: non-finite g at sample " + std::to_string(s));
    }
  }
  // exp(-lambda (g - g_min)) lies in (0, 1]; accumulate it minus one.
  const double g_min = *std::min_element(values.begin(), values.end());
  RunningStats shifted;
  for (double v : values) shifted.add(std::expm1(-lambda * (v - g_min)));
  const double mean_weight = 1.0 + shifted.mean;
  const double value = g_min - std::log1p(shifted.mean) / lambda;
  const double std_error = shifted.std_error() / (lambda * mean_weight);
  if (!std::isfinite(value) || !std::isfinite(std_error)) {
    throw NumericError("cole_hopf_mc: non-finite estimate after rescaling");
  }
  return {value, std_error, std::to_string(n_samples) + " samples"};
}

double hjb_cole_hopf_coefficient(const ProblemSpec& hjb_problem) {
  const auto it = hjb_problem.parameters.find("lambda");
  if (it == hjb_problem.parameters.end()) {
    throw ConfigError("problem '" + hjb_problem.name + "' has no lambda parameter");
  }
  return 2.0 * it->second;
}

double default_fd_half_width(const ProblemSpec& problem, double x0) {
  const double x[] = {x0};
  const double sigma = std::abs(problem.diffusion_at(0.0, x).dense()[0]);
  return 6.0 * sigma * std::sqrt(problem.horizon);
}

std::size_t fd_min_time_steps(const ProblemSpec& problem, double x0, double half_width, std::size_t M) {
  const double h = 2.0 * half_width / static_cast<double>(M);
  double max_sigma2 = 0.0;
  for (std::size_t i = 0; i <= M; ++i) {
    const double x[] = {x0 - half_width + static_cast<double>(i) * h};
    const double s = problem.diffusion_at(problem.horizon, x).dense()[0];
    max_sigma2 = std::max(max_sigma2, s * s);
  }
  const double m = static_cast<double>(M);
  return static_cast<std::size_t>(std::ceil(4.0 * m * m * max_sigma2 * problem.horizon / (half_width * half_width)));
}

OracleEstimate fd_semilinear_1d(const ProblemSpec& problem, double x0, double half_width, std::size_t M,
                                std::size_t K) {
  if (problem.dim != 1) throw ConfigError("fd_semilinear_1d requires d = 1");
  if (!(half_width > 0.0)) throw ConfigError("fd_semilinear_1d: L must be > 0");
  if (M < 4) throw ConfigError("fd_semilinear_1d: M must be >= 4");
  if (K < 1) throw ConfigError("fd_semilinear_1d: K must be >= 1");
  const std::size_t k_min = fd_min_time_steps(problem, x0, half_width, M);
  if (K < k_min) {
    throw ConfigError("fd_semilinear_1d: K = " + std::to_string(K) + " violates K >= 4 M^2 sigma^2 T / L^2 = " +
                      std::to_string(k_min));
  }

  const double h = 2.0 * half_width / static_cast<double>(M);
  const double T = problem.horizon;
  const double dt = T / static_cast<double>(K);
  std::vector<double> xs(M + 1), u(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    xs[i] = x0 - half_width + static_cast<double>(i) * h;
    u[i] = problem.terminal(std::span<const double>{&xs[i], 1});
  }

  const std::size_t n = M - 1;
  std::vector<double> f_now(n), f_prev(n), rhs(n);
  DiffusionMatrix sigma;
  for (std::size_t k = 0; k < K; ++k) {
    const double t_old = T - static_cast<double>(k) * dt;
    const double t_new = k + 1 == K ? 0.0 : T - static_cast<double>(k + 1) * dt;

    for (std::size_t i = 1; i < M; ++i) {
      const std::span<const double> x{&xs[i], 1};
      problem.diffusion(t_old, x, sigma);
      const double z = sigma.dense()[0] * (u[i + 1] - u[i - 1]) / (2.0 * h);
      f_now[i - 1] = problem.driver_is_zero ? 0.0 : problem.driver_value(t_old, x, u[i], {&z, 1});
    }

    const Operator old_op = build_operator(problem, t_old, xs, h);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = j + 1;
      // First/last rows have zero sub/super entries after substitution.
      const double lu = old_op.sub[j] * u[i - 1] + old_op.diag[j] * u[i] + old_op.super[j] * u[i + 1];
      const double explicit_f = k == 0 ? f_now[j] : 1.5 * f_now[j] - 0.5 * f_prev[j];
      rhs[j] = u[i] + 0.5 * dt * lu + dt * explicit_f;
    }

    Operator lhs = build_operator(problem, t_new, xs, h);
    for (std::size_t j = 0; j < n; ++j) {
      lhs.sub[j] *= -0.5 * dt;
      lhs.super[j] *= -0.5 * dt;
      lhs.diag[j] = 1.0 - 0.5 * dt * lhs.diag[j];
    }
    solve_tridiagonal(std::move(lhs.sub), std::move(lhs.diag), std::move(lhs.super), rhs);

    for (std::size_t j = 0; j < n; ++j) u[j + 1] = rhs[j];
    u[0] = 2.0 * u[1] - u[2];
    u[M] = 2.0 * u[M - 1] - u[M - 2];
    if (!std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); })) {
      throw NumericError("fd_semilinear_1d: non-finite values at time step " + std::to_string(k + 1));
    }
    std::swap(f_prev, f_now);
  }

  const double pos = (x0 - xs[0]) / h;
  const std::size_t i0 = std::min<std::size_t>(static_cast<std::size_t>(pos), M - 1);
  const double w = pos - static_cast<double>(i0);
  const double value = (1.0 - w) * u[i0] + w * u[i0 + 1];
  return {value, 0.0, "grid M=" + std::to_string(M) + " K=" + std::to_string(K) + " L=" + std::to_string(half_width)};
}

}  // namespace dbsde
