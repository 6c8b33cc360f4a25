// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

namespace dbsde {

/// splitmix64 output function applied to an already-advanced state.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Maps 64 random bits to a double in (0, 1] (53-bit resolution).
double bits_to_unit_interval(std::uint64_t bits);

/// Box-Muller transform of two uniforms in (0, 1]: returns (r cos, r sin)
/// with r = sqrt(-2 ln u1) and angle 2 pi u2.
struct NormalPair {
  double first;
  double second;
};
NormalPair box_muller(double u1, double u2);

/// Counter-based splitmix64 generator with Box-Muller normals.
///
/// The full output sequence is fixed by the constants of splitmix64, so any
/// implementation seeded identically produces the same numbers. Normals are
/// produced in pairs; the second of each pair is cached for the next call.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

  /// Independent stream keyed by (seed, stream_id, index). The key is hashed
  /// through splitmix64 twice so nearby ids give unrelated states.
  static RngStream derive(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index);

  /// Sub-stream of this stream's seed; does not touch this stream's state.
  RngStream substream(std::uint64_t stream_id, std::uint64_t index) const {
    return derive(seed_, stream_id, index);
  }

  std::uint64_t next_u64();
  double uniform();  // (0, 1]
  double uniform(double low, double high);
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  std::optional<double> cached_normal_;
};

}  // namespace dbsde
