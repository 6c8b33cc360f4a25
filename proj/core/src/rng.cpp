// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/rng.hpp"

#include <cmath>
#include <numbers>

namespace dbsde {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double bits_to_unit_interval(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

NormalPair box_muller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

RngStream RngStream::derive(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index) {
  std::uint64_t key = splitmix64_mix(seed + kGolden);
  key = splitmix64_mix(key ^ (stream_id + kGolden));
  key = splitmix64_mix(key ^ (index * kGolden + 1));
  RngStream out(key);
  return out;
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return splitmix64_mix(state_);
}

double RngStream::uniform() { return bits_to_unit_interval(next_u64()); }

double RngStream::uniform(double low, double high) {
  // uniform() is in (0,1]; reflect so that the closed end lands on `low`.
  return low + (high - low) * (1.0 - uniform());
}

double RngStream::normal() {
  if (cached_normal_) {
    const double v = *cached_normal_;
    cached_normal_.reset();
    return v;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const NormalPair pair = box_muller(u1, u2);
  cached_normal_ = pair.second;
  return pair.first;
}

}  // namespace dbsde
