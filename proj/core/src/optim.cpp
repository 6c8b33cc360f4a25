// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/optim.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "dbsde/error.hpp"
#include "dbsde/problems.hpp"

namespace dbsde {

namespace {

void check_lengths(std::span<const double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("optimizer: " + std::to_string(params.size()) + " parameters but " +
                         std::to_string(grads.size()) + " gradients");
  }
}

}  // namespace

std::vector<double> sgd_step(std::span<const double> params, std::span<const double> grads, double lr) {
  check_lengths(params, grads);
  if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  std::vector<double> out(params.begin(), params.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lr * grads[i];
  return out;
}

AdamState AdamState::zeros(std::size_t n, AdamHyper hyper) {
  return AdamState{hyper, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0};
}

AdamUpdate adam_step(const AdamState& state, std::span<const double> params, std::span<const double> grads,
                     double lr) {
  check_lengths(params, grads);
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("adam: state sized for " + std::to_string(state.m.size()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  const auto& h = state.hyper;
  AdamUpdate out{std::vector<double>(params.begin(), params.end()), state};
  AdamState& s = out.state;
  s.step_count += 1;
  const double t = static_cast<double>(s.step_count);
  const double correction1 = 1.0 - std::pow(h.beta1, t);
  const double correction2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    s.m[i] = h.beta1 * s.m[i] + (1.0 - h.beta1) * g;
    s.v[i] = h.beta2 * s.v[i] + (1.0 - h.beta2) * g * g;
    const double m_hat = s.m[i] / correction1;
    const double v_hat = s.v[i] / correction2;
    out.params[i] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
  }
  return out;
}

LrSchedule LrSchedule::parse(const std::string& text) {
  LrSchedule s;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      if (!s.boundaries.empty()) throw ConfigError("lr_schedule: entries after the first need 'step:rate'");
      s.boundaries.emplace_back(0, parse_real("lr_schedule", item));
    } else {
      std::string step_text = item.substr(0, colon);
      step_text.erase(0, step_text.find_first_not_of(" \t"));
      step_text.erase(step_text.find_last_not_of(" \t") + 1);
      std::uint64_t step = 0;
      const auto [ptr, ec] = std::from_chars(step_text.data(), step_text.data() + step_text.size(), step);
      if (ec != std::errc() || ptr != step_text.data() + step_text.size()) {
        throw ConfigError("lr_schedule: bad step '" + step_text + "'");
      }
      s.boundaries.emplace_back(step, parse_real("lr_schedule", item.substr(colon + 1)));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  s.validate();
  return s;
}

std::string LrSchedule::to_string() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%llu:%.17g", i ? "," : "",
                  static_cast<unsigned long long>(boundaries[i].first), boundaries[i].second);
    out += buf;
  }
  return out;
}

void LrSchedule::validate() const {
  if (boundaries.empty()) throw ConfigError("learning-rate schedule is empty");
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!(boundaries[i].second > 0.0)) throw ConfigError("learning rates must be > 0");
    if (i > 0 && boundaries[i].first <= boundaries[i - 1].first) {
      throw ConfigError("learning-rate schedule thresholds must be strictly increasing");
    }
  }
}

double lr_at(const LrSchedule& schedule, std::uint64_t step) {
  if (schedule.boundaries.empty()) throw ConfigError("learning-rate schedule is empty");
  double rate = schedule.boundaries.front().second;
  for (const auto& [threshold, lr] : schedule.boundaries) {
    if (threshold <= step) rate = lr;
  }
  return rate;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double clip_by_norm(std::span<double> grads, double max_norm) {
  const double norm = l2_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
  return norm;
}

}  // namespace dbsde
