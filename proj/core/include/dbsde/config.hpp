// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a flat UTF-8 file of `key = value` lines. `#` starts a
// comment, list values are comma-separated, unknown keys are rejected.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dbsde/net.hpp"
#include "dbsde/optim.hpp"
#include "dbsde/problems.hpp"

namespace dbsde {

enum class OptimizerKind { kAdam, kSgd };
enum class TimingMode { kWall, kOff };

struct RunConfig {
  std::string problem;
  std::size_t d = 0;
  std::size_t N = 0;
  std::size_t batch_size = 0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;

  /// Problem overrides (T, lambda, xi, xi0, box_low, box_high) as given.
  Overrides problem_overrides;

  OptimizerKind optimizer = OptimizerKind::kAdam;
  AdamHyper adam;
  LrSchedule lr_schedule = LrSchedule::constant(5e-3);
  double grad_clip = 0.0;  // 0 disables clipping

  std::vector<std::size_t> hidden_widths;  // empty means two layers of d + 10
  ad::Activation activation = ad::Activation::kTanh;
  Sharing sharing = Sharing::kIndependent;
  BankMode bank_mode = BankMode::kDeterministicXi;

  std::uint64_t eval_every = 100;
  std::size_t eval_samples = 1024;
  std::filesystem::path output_dir = "run";
  unsigned threads = 1;
  /// kOff writes elapsed_s = 0 so metrics files depend only on the config.
  TimingMode timing = TimingMode::kWall;

  BankLayout bank_layout() const;
  /// Canonical key/value form; parse_config_entries() inverts it.
  std::map<std::string, std::string> to_entries() const;
  /// Hash of the keys that determine the parameter layout.
  std::string architecture_fingerprint() const;
};

std::vector<std::string> accepted_config_keys();
std::vector<std::string> required_config_keys();

RunConfig parse_config(const std::filesystem::path& path);
/// Parses file contents; `source` names the origin in error messages.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config_entries(const std::map<std::string, std::string>& entries);

/// Formats a real with 17 significant digits.
std::string format_real(double value);

}  // namespace dbsde
