// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/bsde.hpp"

#include <cmath>
#include <string>

#include "dbsde/error.hpp"

namespace dbsde {

namespace {

void check_shapes(const ProblemSpec& problem, const SubnetBank& bank, const TimeGrid& grid,
                  const PathBatch& paths, const BrownianBatch& increments) {
  const std::size_t N = grid.steps(), d = problem.dim;
  if (paths.steps() != N || increments.steps() != N) {
    throw DimensionError("rollout: path/increment step count does not match the time grid");
  }
  if (paths.dim() != d || increments.dim() != d) {
    throw DimensionError("rollout: path/increment dimension does not match the problem");
  }
  if (paths.batch() != increments.batch()) {
    throw DimensionError("rollout: path and increment batch sizes differ");
  }
  if (bank.layout.dim != d || bank.layout.steps != N) {
    throw DimensionError("rollout: bank built for d=" + std::to_string(bank.layout.dim) + ", N=" +
                         std::to_string(bank.layout.steps) + " but problem/grid have d=" +
                         std::to_string(d) + ", N=" + std::to_string(N));
  }
}

[[noreturn]] void driver_error(const char* what, std::size_t step, std::size_t sample) {
  throw NumericError(std::string("non-finite ") + what + " at step " + std::to_string(step) + ", sample " +
                     std::to_string(sample));
}

}  // namespace

RolloutResult rollout_loss(ad::Tape& tape, const ProblemSpec& problem, const SubnetBank& bank,
                           const TimeGrid& grid, const PathBatch& paths, const BrownianBatch& increments) {
  check_shapes(problem, bank, grid, paths, increments);
  const std::size_t N = grid.steps(), d = problem.dim, batch = paths.batch();
  const bool deterministic = bank.layout.mode == BankMode::kDeterministicXi;

  RolloutResult result;
  result.parameters = bind_bank(tape, bank);
  const BankVars& vars = result.parameters;

  ad::VarId x = tape.constant(paths.step(0));
  ad::VarId y = deterministic ? ad::record_broadcast_rows(tape, vars.y0, batch)
                              : mlp_forward(tape, vars.psi0, x);
  result.y0_values.assign(tape.value(y).data().begin(), tape.value(y).data().end());

  std::vector<double> dz_row(d);
  for (std::size_t n = 0; n < N; ++n) {
    if (n > 0) x = tape.constant(paths.step(n));
    const ad::VarId z = (deterministic && n == 0) ? ad::record_broadcast_rows(tape, vars.z0, batch)
                                                  : mlp_forward(tape, vars.phi[bank.phi_index(n)], x);
    const ad::VarId dw = tape.constant(increments.step(n));
    const ad::VarId martingale = ad::record_dot(tape, z, dw);
    const double t = grid.time(n), dt = grid.dt(n);

    if (problem.driver_is_zero) {
      y = ad::record_linear_combination(tape, {{1.0, y}, {1.0, martingale}});
      continue;
    }
    const Tensor& yv = tape.value(y);
    const Tensor& zv = tape.value(z);
    const Tensor& xv = tape.value(x);
    Tensor f = Tensor::zeros({batch, 1});
    Tensor df_dy = Tensor::zeros({batch, 1});
    Tensor df_dz = Tensor::zeros({batch, d});
    for (std::size_t i = 0; i < batch; ++i) {
      DriverPartials partials{0.0, df_dz.row(i)};
      f[i] = problem.driver(t, xv.row(i), yv[i], zv.row(i), &partials);
      df_dy[i] = partials.dy;
      if (!std::isfinite(f[i])) driver_error("driver f", n, i);
    }
    const ad::VarId inputs[] = {y, z};
    const ad::VarId fv = ad::record_rowwise_map(tape, inputs, std::move(f), {std::move(df_dy), std::move(df_dz)});
    y = ad::record_linear_combination(tape, {{1.0, y}, {-dt, fv}, {1.0, martingale}});
  }

  Tensor target = Tensor::zeros({batch, 1});
  for (std::size_t i = 0; i < batch; ++i) {
    target[i] = problem.terminal(paths.at(i, N));
    if (!std::isfinite(target[i])) driver_error("terminal condition g", N, i);
  }
  const Tensor& yT = tape.value(y);
  result.terminal_values.assign(yT.data().begin(), yT.data().end());
  result.terminal_gap.resize(batch);
  for (std::size_t i = 0; i < batch; ++i) result.terminal_gap[i] = target[i] - yT[i];

  result.terminal = y;
  const ad::VarId g = tape.constant(std::move(target));
  result.loss = ad::loss_mse(tape, y, g);
  return result;
}

double oracle_rollout_loss(const ProblemSpec& problem, const TimeGrid& grid, const PathBatch& paths,
                           const BrownianBatch& increments) {
  if (!problem.exact) throw ConfigError("oracle rollout requires a problem with an exact solution");
  const std::size_t N = grid.steps(), d = problem.dim, batch = paths.batch();
  if (paths.steps() != N || increments.steps() != N || paths.dim() != d || increments.dim() != d ||
      increments.batch() != batch) {
    throw DimensionError("oracle rollout: inconsistent path/increment/grid shapes");
  }
  std::vector<double> grad(d), z(d);
  DiffusionMatrix sigma;
  double sum = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    double y = problem.exact->value(0.0, paths.at(i, 0));
    for (std::size_t n = 0; n < N; ++n) {
      const double t = grid.time(n);
      const auto x = paths.at(i, n);
      problem.exact->gradient(t, x, grad);
      problem.diffusion(t, x, sigma);
      sigma.apply_transpose(grad, z);
      const auto dw = increments.at(i, n);
      double zdw = 0.0;
      for (std::size_t k = 0; k < d; ++k) zdw += z[k] * dw[k];
      const double f = problem.driver_is_zero ? 0.0 : problem.driver_value(t, x, y, z);
      if (!std::isfinite(f)) driver_error("driver f", n, i);
      y = y - f * grid.dt(n) + zdw;
    }
    const double gap = problem.terminal(paths.at(i, N)) - y;
    if (!std::isfinite(gap)) driver_error("terminal gap", N, i);
    sum += gap * gap;
  }
  return sum / static_cast<double>(batch);
}

U0Estimate estimate_u0(const SubnetBank& bank, const ProblemSpec& problem, std::size_t n_eval,
                       RngStream& stream) {
  if (bank.layout.mode == BankMode::kDeterministicXi) return {bank.y0[0], 0.0};
  if (n_eval < 1) throw ConfigError("estimate_u0: n_eval must be >= 1");
  ad::Tape tape;
  const ad::VarId x = tape.constant(sample_xi(problem, n_eval, stream));
  const Tensor& out = tape.value(mlp_forward(tape, bank.psi0, x));
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_eval; ++i) {
    const double delta = out[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (out[i] - mean);
  }
  const double var = n_eval > 1 ? m2 / static_cast<double>(n_eval - 1) : 0.0;
  return {mean, std::sqrt(var)};
}

}  // namespace dbsde
