// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Feedforward subnetworks. psi0 maps a starting point to the value u(0, x);
// phi_n maps X_{t_n} to sigma^T grad u at time t_n. With a deterministic
// starting point, psi0 and phi_0 collapse to trainable constants y0 and z0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dbsde/autodiff.hpp"
#include "dbsde/tensor.hpp"

namespace dbsde {

struct MLPConfig {
  /// Input width first, output width last; at least two entries.
  std::vector<std::size_t> widths;
  /// Hidden-layer activation. The output layer is always affine.
  ad::Activation activation = ad::Activation::kTanh;

  void validate() const;
  std::size_t layers() const { return widths.size() - 1; }
  bool operator==(const MLPConfig&) const = default;
};

struct MLPParams {
  MLPConfig config;
  std::vector<Tensor> weights;  // [in x out]
  std::vector<Tensor> biases;   // [out]

  std::size_t param_count() const;
  bool operator==(const MLPParams&) const = default;
};

/// Xavier/Glorot uniform bound sqrt(6 / (fan_in + fan_out)).
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

/// Weights ~ Uniform(-B, B) with the Xavier bound, biases zero. Draws come
/// from RngStream(seed) layer by layer in row-major order.
MLPParams init_params(const MLPConfig& config, std::uint64_t seed);

/// Parameter nodes of one MLP recorded on a tape.
struct MLPVars {
  ad::Activation activation = ad::Activation::kTanh;
  std::vector<ad::VarId> weights;
  std::vector<ad::VarId> biases;
};

MLPVars bind_mlp(ad::Tape& tape, const MLPParams& params);
ad::VarId mlp_forward(ad::Tape& tape, const MLPVars& vars, ad::VarId x);
/// Binds `params` as fresh parameter nodes and runs the forward pass.
ad::VarId mlp_forward(ad::Tape& tape, const MLPParams& params, ad::VarId x);

enum class BankMode { kGeneralXi, kDeterministicXi };
enum class Sharing { kIndependent, kShared };

BankMode parse_bank_mode(std::string_view name);
std::string_view bank_mode_name(BankMode mode);
Sharing parse_sharing(std::string_view name);
std::string_view sharing_name(Sharing sharing);

struct BankLayout {
  BankMode mode = BankMode::kGeneralXi;
  Sharing sharing = Sharing::kIndependent;
  std::size_t dim = 1;
  std::size_t steps = 1;
  std::vector<std::size_t> hidden_widths;
  ad::Activation activation = ad::Activation::kTanh;

  void validate() const;
  /// Number of time steps whose Z comes from a network.
  std::size_t network_steps() const;
  /// Number of stored phi parameter sets.
  std::size_t phi_count() const;
  MLPConfig psi_config() const;
  MLPConfig phi_config() const;
  bool operator==(const BankLayout&) const = default;
};

/// Default hidden layers: two of width d + 10.
std::vector<std::size_t> default_hidden_widths(std::size_t dim);

struct SubnetBank {
  BankLayout layout;
  MLPParams psi0;  // general mode only
  Tensor y0;       // deterministic mode only, shape [1]
  Tensor z0;       // deterministic mode only, shape [d]
  std::vector<MLPParams> phi;

  /// Builds a bank. Deterministic mode starts from y0 = 0, z0 = 0.
  static SubnetBank initialize(const BankLayout& layout, std::uint64_t seed);

  /// Index into `phi` of the network used at time step n; n must be a
  /// network step (n >= 1 in deterministic mode).
  std::size_t phi_index(std::size_t step) const;

  struct Entry {
    std::string name;
    const Tensor* tensor;
  };
  /// All tensors in flatten order: psi0 (or y0), z0, then phi in step order;
  /// within an MLP layer by layer, weight before bias.
  std::vector<Entry> entries() const;
  std::vector<Tensor*> mutable_tensors();

  bool operator==(const SubnetBank&) const = default;
};

std::size_t param_count(const SubnetBank& bank);
std::vector<double> flatten_params(const SubnetBank& bank);
SubnetBank unflatten_params(const SubnetBank& bank_template, std::span<const double> values);

/// Parameter nodes of a whole bank, in flatten order.
struct BankVars {
  MLPVars psi0;
  ad::VarId y0;
  ad::VarId z0;
  std::vector<MLPVars> phi;
  std::vector<ad::VarId> ordered;
};

BankVars bind_bank(ad::Tape& tape, const SubnetBank& bank);

/// Concatenates gradients of `ordered` parameter nodes; absent ids give zeros.
std::vector<double> flatten_gradients(const ad::Tape& tape, const ad::Gradients& grads,
                                      std::span<const ad::VarId> ordered);

}  // namespace dbsde
