// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Semilinear parabolic problem
//
//   du/dt + mu . grad u + 1/2 Tr(sigma sigma^T Hess u) + f(t, x, u, sigma^T grad u) = 0,
//   u(T, x) = g(x),
//
// together with the law of the starting point xi of the forward process.

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbsde/rng.hpp"
#include "dbsde/tensor.hpp"

namespace dbsde {

enum class DiffusionKind { kScalarIdentity, kDiagonal, kFull };

/// A d x d diffusion matrix stored according to its structure: one entry for
/// a multiple of the identity, d entries for a diagonal, d*d row-major
/// entries otherwise.
class DiffusionMatrix {
 public:
  DiffusionMatrix() = default;
  DiffusionMatrix(DiffusionKind kind, std::size_t dim, std::vector<double> entries);

  static DiffusionMatrix scalar(std::size_t dim, double s) {
    return {DiffusionKind::kScalarIdentity, dim, {s}};
  }

  DiffusionKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> entries() const { return entries_; }
  std::vector<double>& mutable_entries() { return entries_; }

  /// out = sigma * v
  void apply(std::span<const double> v, std::span<double> out) const;
  /// out = sigma^T * v
  void apply_transpose(std::span<const double> v, std::span<double> out) const;
  /// Row-major d x d copy.
  std::vector<double> dense() const;

 private:
  DiffusionKind kind_ = DiffusionKind::kScalarIdentity;
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

/// Law of the starting point: a point mass or independent uniforms on a box.
struct XiSampler {
  enum class Kind { kPointMass, kUniformBox };
  Kind kind = Kind::kPointMass;
  std::vector<double> point;  // point mass location
  std::vector<double> low;    // box corners
  std::vector<double> high;

  static XiSampler point_mass(std::vector<double> x0);
  static XiSampler uniform_box(std::vector<double> low, std::vector<double> high);

  bool deterministic() const { return kind == Kind::kPointMass; }
  void draw(RngStream& stream, std::span<double> out) const;
};

/// Optional partial derivatives requested from a driver evaluation.
struct DriverPartials {
  double dy = 0.0;
  std::span<double> dz;  // size d
};

using DriftFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
using DiffusionFn = std::function<void(double t, std::span<const double> x, DiffusionMatrix& out)>;
/// f(t, x, y, z); fills `partials` with (df/dy, df/dz) when non-null.
using DriverFn = std::function<double(double t, std::span<const double> x, double y,
                                      std::span<const double> z, DriverPartials* partials)>;
using TerminalFn = std::function<double(std::span<const double> x)>;

struct ExactSolution {
  std::function<double(double t, std::span<const double> x)> value;
  std::function<void(double t, std::span<const double> x, std::span<double> grad)> gradient;
};

struct ProblemSpec {
  std::string name;
  std::size_t dim = 1;
  double horizon = 1.0;
  DriftFn drift;
  DiffusionKind diffusion_kind = DiffusionKind::kScalarIdentity;
  DiffusionFn diffusion;
  DriverFn driver;
  bool driver_is_zero = false;
  TerminalFn terminal;
  XiSampler xi;
  std::optional<ExactSolution> exact;
  /// Named scalar parameters of the instance (lambda, ...), for reporting.
  std::map<std::string, double> parameters;

  /// Checks d >= 1, T > 0, all callables set and sampler dimensions.
  void validate() const;

  DiffusionMatrix diffusion_at(double t, std::span<const double> x) const;
  double driver_value(double t, std::span<const double> x, double y, std::span<const double> z) const {
    return driver(t, x, y, z, nullptr);
  }
};

struct ExactValue {
  double u;
  std::vector<double> grad;
};

/// Exact solution and spatial gradient; ConfigError when the problem has none.
ExactValue exact_eval(const ProblemSpec& problem, double t, std::span<const double> x);

/// Draws `batch` starting points sequentially from `stream`: [batch x d].
Tensor sample_xi(const ProblemSpec& problem, std::size_t batch, RngStream& stream);

}  // namespace dbsde
