// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/problem.hpp"

#include <algorithm>

#include "dbsde/error.hpp"

namespace dbsde {

DiffusionMatrix::DiffusionMatrix(DiffusionKind kind, std::size_t dim, std::vector<double> entries)
    : kind_(kind), dim_(dim), entries_(std::move(entries)) {
  const std::size_t expected = kind == DiffusionKind::kScalarIdentity ? 1
                               : kind == DiffusionKind::kDiagonal      ? dim
                                                                       : dim * dim;
  if (entries_.size() != expected) {
    throw DimensionError("diffusion matrix of dimension " + std::to_string(dim) + " needs " +
                         std::to_string(expected) + " entries, got " + std::to_string(entries_.size()));
  }
}

void DiffusionMatrix::apply(std::span<const double> v, std::span<double> out) const {
  if (v.size() != dim_ || out.size() != dim_) throw DimensionError("diffusion apply: dimension mismatch");
  switch (kind_) {
    case DiffusionKind::kScalarIdentity:
      for (std::size_t i = 0; i < dim_; ++i) out[i] = entries_[0] * v[i];
      return;
    case DiffusionKind::kDiagonal:
      for (std::size_t i = 0; i < dim_; ++i) out[i] = entries_[i] * v[i];
      return;
    case DiffusionKind::kFull:
      for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += entries_[i * dim_ + j] * v[j];
        out[i] = s;
      }
      return;
  }
}

void DiffusionMatrix::apply_transpose(std::span<const double> v, std::span<double> out) const {
  if (kind_ != DiffusionKind::kFull) {
    apply(v, out);
    return;
  }
  if (v.size() != dim_ || out.size() != dim_) throw DimensionError("diffusion apply: dimension mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += entries_[j * dim_ + i] * v[j];
    out[i] = s;
  }
}

std::vector<double> DiffusionMatrix::dense() const {
  std::vector<double> out(dim_ * dim_, 0.0);
  switch (kind_) {
    case DiffusionKind::kScalarIdentity:
      for (std::size_t i = 0; i < dim_; ++i) out[i * dim_ + i] = entries_[0];
      break;
    case DiffusionKind::kDiagonal:
      for (std::size_t i = 0; i < dim_; ++i) out[i * dim_ + i] = entries_[i];
      break;
    case DiffusionKind::kFull:
      out = entries_;
      break;
  }
  return out;
}

XiSampler XiSampler::point_mass(std::vector<double> x0) {
  XiSampler s;
  s.kind = Kind::kPointMass;
  s.point = std::move(x0);
  return s;
}

XiSampler XiSampler::uniform_box(std::vector<double> low, std::vector<double> high) {
  if (low.size() != high.size()) throw DimensionError("box corners differ in dimension");
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!(low[i] <= high[i])) throw ConfigError("box lower corner exceeds upper corner");
  }
  XiSampler s;
  s.kind = Kind::kUniformBox;
  s.low = std::move(low);
  s.high = std::move(high);
  return s;
}

void XiSampler::draw(RngStream& stream, std::span<double> out) const {
  if (kind == Kind::kPointMass) {
    if (out.size() != point.size()) throw DimensionError("xi point mass has wrong dimension");
    std::copy(point.begin(), point.end(), out.begin());
    return;
  }
  if (out.size() != low.size()) throw DimensionError("xi box has wrong dimension");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stream.uniform(low[i], high[i]);
}

void ProblemSpec::validate() const {
  if (dim < 1) throw ConfigError("problem dimension must be >= 1");
  if (!(horizon > 0.0)) throw ConfigError("problem horizon T must be > 0");
  if (!drift || !diffusion || !driver || !terminal) {
    throw ConfigError("problem '" + name + "' is missing one of drift, diffusion, driver, terminal");
  }
  const std::size_t xi_dim = xi.deterministic() ? xi.point.size() : xi.low.size();
  if (xi_dim != dim) {
    throw DimensionError("xi sampler dimension " + std::to_string(xi_dim) +
                         " does not match problem dimension " + std::to_string(dim));
  }
}

DiffusionMatrix ProblemSpec::diffusion_at(double t, std::span<const double> x) const {
  DiffusionMatrix m;
  diffusion(t, x, m);
  return m;
}

ExactValue exact_eval(const ProblemSpec& problem, double t, std::span<const double> x) {
  if (!problem.exact) throw ConfigError("problem '" + problem.name + "' has no exact solution");
  if (x.size() != problem.dim) throw DimensionError("exact_eval: point has wrong dimension");
  if (t < 0.0 || t > problem.horizon) throw ConfigError("exact_eval: t outside [0, T]");
  ExactValue out{problem.exact->value(t, x), std::vector<double>(problem.dim)};
  problem.exact->gradient(t, x, out.grad);
  return out;
}

Tensor sample_xi(const ProblemSpec& problem, std::size_t batch, RngStream& stream) {
  Tensor out = Tensor::zeros({batch, problem.dim});
  for (std::size_t i = 0; i < batch; ++i) problem.xi.draw(stream, out.row(i));
  return out;
}

}  // namespace dbsde
