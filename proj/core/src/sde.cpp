// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/sde.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dbsde/error.hpp"

namespace dbsde {

namespace {

struct StepScratch {
  std::vector<double> drift;
  std::vector<double> noise;
  DiffusionMatrix sigma;
  explicit StepScratch(std::size_t d) : drift(d), noise(d) {}
};

void euler_step_into(const ProblemSpec& problem, double t, std::span<const double> x, double dt,
                     std::span<const double> dw, std::span<double> out, StepScratch& scratch) {
  problem.drift(t, x, scratch.drift);
  problem.diffusion(t, x, scratch.sigma);
  scratch.sigma.apply(dw, scratch.noise);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + scratch.drift[i] * dt + scratch.noise[i];
}

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

[[noreturn]] void path_error(std::size_t sample, std::size_t step) {
  throw NumericError("non-finite forward state at sample " + std::to_string(sample) + ", step " +
                     std::to_string(step));
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ConfigError("time grid needs at least one step");
  if (times_.front() != 0.0) throw ConfigError("time grid must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ConfigError("time grid must be strictly increasing");
  }
}

TimeGrid make_uniform_grid(double horizon, std::size_t steps) {
  if (!(horizon > 0.0)) throw ConfigError("grid horizon T must be > 0");
  if (steps < 1) throw ConfigError("grid needs N >= 1 steps");
  std::vector<double> times(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    times[n] = static_cast<double>(n) * horizon / static_cast<double>(steps);
  }
  times.back() = horizon;
  return TimeGrid(std::move(times));
}

Tensor BrownianBatch::step(std::size_t n) const {
  const std::size_t b = batch(), d = dim();
  Tensor out = Tensor::zeros({b, d});
  for (std::size_t i = 0; i < b; ++i) std::ranges::copy(at(i, n), out.row(i).begin());
  return out;
}

std::span<const double> BrownianBatch::at(std::size_t sample, std::size_t n) const {
  const std::size_t d = dim();
  return increments.data().subspan((sample * steps() + n) * d, d);
}

Tensor PathBatch::step(std::size_t n) const {
  const std::size_t b = batch(), d = dim();
  Tensor out = Tensor::zeros({b, d});
  for (std::size_t i = 0; i < b; ++i) std::ranges::copy(at(i, n), out.row(i).begin());
  return out;
}

std::span<const double> PathBatch::at(std::size_t sample, std::size_t n) const {
  const std::size_t d = dim();
  return states.data().subspan((sample * (steps() + 1) + n) * d, d);
}

std::vector<double> euler_step(const ProblemSpec& problem, double t, std::span<const double> x, double dt,
                               std::span<const double> dw) {
  if (!(dt > 0.0)) throw ConfigError("euler_step: dt must be > 0");
  if (x.size() != problem.dim || dw.size() != problem.dim) {
    throw DimensionError("euler_step: state or increment has wrong dimension");
  }
  StepScratch scratch(problem.dim);
  std::vector<double> out(problem.dim);
  euler_step_into(problem, t, x, dt, dw, out, scratch);
  if (!finite(out)) throw NumericError("euler_step: non-finite state at t=" + std::to_string(t));
  return out;
}

SimulatedBatch simulate_paths(const ProblemSpec& problem, const TimeGrid& grid, std::size_t batch,
                              const RngStream& base, std::uint64_t stream_id, unsigned threads) {
  if (batch < 1) throw ConfigError("simulate_paths: batch must be >= 1");
  const std::size_t d = problem.dim, N = grid.steps();
  SimulatedBatch out{PathBatch{Tensor::zeros({batch, N + 1, d})},
                     BrownianBatch{Tensor::zeros({batch, N, d})}};
  double* xs = out.paths.states.data().data();
  double* ws = out.increments.increments.data().data();

  auto run_range = [&](std::size_t begin, std::size_t end) {
    StepScratch scratch(d);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream stream = base.substream(stream_id, i);
      double* path = xs + i * (N + 1) * d;
      double* incs = ws + i * N * d;
      problem.xi.draw(stream, {path, d});
      for (std::size_t n = 0; n < N; ++n) {
        const double sqrt_dt = std::sqrt(grid.dt(n));
        double* dw = incs + n * d;
        for (std::size_t k = 0; k < d; ++k) dw[k] = sqrt_dt * stream.normal();
        std::span<double> next{path + (n + 1) * d, d};
        euler_step_into(problem, grid.time(n), {path + n * d, d}, grid.dt(n), {dw, d}, next, scratch);
        if (!finite(next)) path_error(i, n + 1);
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(batch)));
  if (threads == 1) {
    run_range(0, batch);
  } else {
    std::vector<std::jthread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (batch + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = w * chunk, end = std::min(batch, begin + chunk);
      workers.emplace_back([&, w, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return out;
}

PathBatch replay_paths(const ProblemSpec& problem, const TimeGrid& grid, const Tensor& initial_states,
                       const BrownianBatch& increments) {
  const std::size_t batch = increments.batch(), N = increments.steps(), d = increments.dim();
  if (N != grid.steps() || d != problem.dim || initial_states.rows() != batch || initial_states.cols() != d) {
    throw DimensionError("replay_paths: inconsistent shapes");
  }
  PathBatch out{Tensor::zeros({batch, N + 1, d})};
  double* xs = out.states.data().data();
  StepScratch scratch(d);
  for (std::size_t i = 0; i < batch; ++i) {
    double* path = xs + i * (N + 1) * d;
    std::ranges::copy(initial_states.row(i), path);
    for (std::size_t n = 0; n < N; ++n) {
      euler_step_into(problem, grid.time(n), {path + n * d, d}, grid.dt(n), increments.at(i, n),
                      {path + (n + 1) * d, d}, scratch);
      if (!finite({path + (n + 1) * d, d})) path_error(i, n + 1);
    }
  }
  return out;
}

}  // namespace dbsde
