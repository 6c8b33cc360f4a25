// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "dbsde/bsde.hpp"
#include "dbsde/net.hpp"
#include "dbsde/problems.hpp"
#include "dbsde/sde.hpp"

namespace {

using namespace dbsde;

SubnetBank make_bank(std::size_t d, std::size_t N, BankMode mode) {
  BankLayout layout;
  layout.mode = mode;
  layout.dim = d;
  layout.steps = N;
  layout.hidden_widths = default_hidden_widths(d);
  return SubnetBank::initialize(layout, 1);
}

void BM_SimulatePaths(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ProblemSpec p = get_problem("hjb", d);
  const TimeGrid grid = make_uniform_grid(p.horizon, 20);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_paths(p, grid, 256, RngStream(1), stream++, 1));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_SimulatePaths)->Arg(10)->Arg(100);

void BM_MlpForward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const SubnetBank bank = make_bank(d, 1, BankMode::kGeneralXi);
  const Tensor x = Tensor::zeros({256, d});
  for (auto _ : state) {
    ad::Tape tape;
    benchmark::DoNotOptimize(mlp_forward(tape, bank.psi0, tape.constant(x)));
  }
}
BENCHMARK(BM_MlpForward)->Arg(10)->Arg(100);

void BM_RolloutAndBackward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ProblemSpec p = get_problem("hjb", d);
  const TimeGrid grid = make_uniform_grid(p.horizon, 20);
  const SubnetBank bank = make_bank(d, 20, BankMode::kDeterministicXi);
  const SimulatedBatch batch = simulate_paths(p, grid, 256, RngStream(2), 0, 1);
  for (auto _ : state) {
    ad::Tape tape;
    const RolloutResult r = rollout_loss(tape, p, bank, grid, batch.paths, batch.increments);
    benchmark::DoNotOptimize(ad::backward(tape, r.loss));
  }
}
BENCHMARK(BM_RolloutAndBackward)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
