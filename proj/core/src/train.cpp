// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/train.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "dbsde/archive.hpp"
#include "dbsde/bsde.hpp"
#include "dbsde/error.hpp"
#include "dbsde/optim.hpp"
#include "dbsde/problems.hpp"
#include "dbsde/sde.hpp"

namespace dbsde {

namespace {

void write_summary(const std::filesystem::path& path, const RunConfig& config, const SubnetBank& bank,
                   const MetricsRecord& final_record) {
  nlohmann::ordered_json doc;
  doc["problem"] = config.problem;
  doc["d"] = config.d;
  doc["N"] = config.N;
  doc["iterations"] = config.iterations;
  doc["seed"] = config.seed;
  doc["param_count"] = param_count(bank);
  doc["final"] = {{"step", final_record.step},        {"loss", final_record.loss},
                  {"y0", final_record.y0},            {"grad_norm", final_record.grad_norm},
                  {"lr", final_record.lr},            {"elapsed_s", final_record.elapsed_s}};
  std::ofstream out(path, std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing run summary '" + path.string() + "'");
}

}  // namespace

TrainResult run_train(const RunConfig& config) {
  const ProblemSpec problem = get_problem(config.problem, config.d, config.problem_overrides);
  const TimeGrid grid = make_uniform_grid(problem.horizon, config.N);
  const RngStream base(config.seed);

  TrainResult result;
  result.output_dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + config.output_dir.string() + "': " + ec.message());
  std::filesystem::remove(config.output_dir / "metrics.csv", ec);
  std::filesystem::remove(config.output_dir / "loss_curve.csv", ec);
  MetricsWriter metrics(config.output_dir / "metrics.csv");
  std::ofstream curve(config.output_dir / "loss_curve.csv", std::ios::trunc);
  if (!curve) throw IoError("cannot open loss curve file in '" + config.output_dir.string() + "'");
  curve << "step,loss\n";

  SubnetBank bank = SubnetBank::initialize(config.bank_layout(), config.seed);
  std::vector<double> params = flatten_params(bank);
  AdamState adam = AdamState::zeros(params.size(), config.adam);
  const auto start = std::chrono::steady_clock::now();

  for (std::uint64_t step = 0; step <= config.iterations; ++step) {
    try {
      const SimulatedBatch batch =
          simulate_paths(problem, grid, config.batch_size, base, kTrainStreamBase + step, config.threads);
      ad::Tape tape;
      const RolloutResult rollout = rollout_loss(tape, problem, bank, grid, batch.paths, batch.increments);
      const ad::Gradients grads = ad::backward(tape, rollout.loss);
      std::vector<double> grad = flatten_gradients(tape, grads, rollout.parameters.ordered);
      const double grad_norm = clip_by_norm(grad, config.grad_clip);
      const double lr = lr_at(config.lr_schedule, step);
      const double loss = tape.value(rollout.loss).item();
      curve << step << ',' << format_real(loss) << '\n';

      if (step % config.eval_every == 0 || step == config.iterations) {
        RngStream eval_stream = base.substream(kEvalStreamBase + step, 0);
        const U0Estimate u0 = estimate_u0(bank, problem, config.eval_samples, eval_stream);
        MetricsRecord record{step, loss, u0.mean, grad_norm, lr, 0.0};
        if (config.timing == TimingMode::kWall) {
          record.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        metrics.append(record);
        result.records.push_back(record);
      }
      if (step == config.iterations) break;

      if (config.optimizer == OptimizerKind::kAdam) {
        AdamUpdate update = adam_step(adam, params, grad, lr);
        params = std::move(update.params);
        adam = std::move(update.state);
      } else {
        params = sgd_step(params, grad, lr);
      }
      bank = unflatten_params(bank, params);
    } catch (const NumericError& e) {
      curve.flush();
      throw NumericError("training step " + std::to_string(step) + ": " + e.what());
    }
  }
  curve.flush();

  result.final_record = result.records.back();
  result.bank = bank;
  save_params(bank, config, config.output_dir / "params.json");
  write_summary(config.output_dir / "summary.json", config, bank, result.final_record);
  return result;
}

EvalResult evaluate_params(const RunConfig& config, const SubnetBank& bank, std::size_t samples,
                           std::uint64_t seed) {
  if (samples < 1) throw ConfigError("evaluation needs at least one sample");
  const ProblemSpec problem = get_problem(config.problem, config.d, config.problem_overrides);
  const TimeGrid grid = make_uniform_grid(problem.horizon, config.N);
  const RngStream base(seed);
  constexpr std::size_t kChunk = 1024;

  EvalResult out;
  out.samples = samples;
  RngStream u0_stream = base.substream(kEvalStreamBase, 0);
  const U0Estimate u0 = estimate_u0(bank, problem, samples, u0_stream);
  out.u0_mean = u0.mean;
  out.u0_stddev = u0.stddev;

  double weighted_loss = 0.0;
  for (std::size_t begin = 0, chunk = 0; begin < samples; begin += kChunk, ++chunk) {
    const std::size_t n = std::min(kChunk, samples - begin);
    const SimulatedBatch batch = simulate_paths(problem, grid, n, base, kEvalStreamBase + 1 + chunk, config.threads);
    ad::Tape tape;
    const RolloutResult rollout = rollout_loss(tape, problem, bank, grid, batch.paths, batch.increments);
    weighted_loss += tape.value(rollout.loss).item() * static_cast<double>(n);
  }
  out.loss = weighted_loss / static_cast<double>(samples);
  if (problem.exact && problem.xi.deterministic()) out.exact_u0 = problem.exact->value(0.0, problem.xi.point);
  return out;
}

}  // namespace dbsde
