// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dbsde/config.hpp"
#include "dbsde/metrics.hpp"
#include "dbsde/net.hpp"

namespace dbsde {

/// Stream ids used with RngStream::substream for training data and
/// evaluation draws. Step s of training uses kTrainStreamBase + s.
inline constexpr std::uint64_t kTrainStreamBase = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kEvalStreamBase = std::uint64_t{2} << 40;

struct TrainResult {
  MetricsRecord final_record;
  std::vector<MetricsRecord> records;
  SubnetBank bank;
  std::filesystem::path output_dir;
};

/// Trains the configured problem. Every step draws fresh paths, records the
/// rollout, back-propagates and applies one optimizer update. Writes
/// metrics.csv (every eval_every steps and at the end), loss_curve.csv
/// (every step), params.json and summary.json into the output directory.
/// A NumericError aborts the run, naming the step, after the metrics
/// already written have been flushed.
TrainResult run_train(const RunConfig& config);

struct EvalResult {
  double u0_mean = 0.0;
  double u0_stddev = 0.0;
  double loss = 0.0;  // mean terminal-matching loss over the evaluation paths
  std::size_t samples = 0;
  std::optional<double> exact_u0;  // u(0, x0) when the problem has a closed form and xi is a point
};

/// Evaluates a trained bank on `samples` fresh paths (processed in chunks of
/// at most 1024) drawn from streams disjoint from training.
EvalResult evaluate_params(const RunConfig& config, const SubnetBank& bank, std::size_t samples,
                           std::uint64_t seed);

}  // namespace dbsde
