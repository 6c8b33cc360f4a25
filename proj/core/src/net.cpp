// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/net.hpp"

#include <algorithm>
#include <cmath>

#include "dbsde/error.hpp"
#include "dbsde/rng.hpp"

namespace dbsde {

namespace {
constexpr std::uint64_t kInitStream = 0x696e6974;  // "init"
}

void MLPConfig::validate() const {
  if (widths.size() < 2) throw ConfigError("MLP needs at least an input and an output width");
  for (std::size_t w : widths) {
    if (w < 1) throw ConfigError("MLP widths must be >= 1");
  }
}

std::size_t MLPParams::param_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

MLPParams init_params(const MLPConfig& config, std::uint64_t seed) {
  config.validate();
  RngStream stream(seed);
  MLPParams p;
  p.config = config;
  for (std::size_t l = 0; l < config.layers(); ++l) {
    const std::size_t in = config.widths[l], out = config.widths[l + 1];
    const double bound = xavier_bound(in, out);
    Tensor w = Tensor::zeros({in, out});
    for (double& v : w.data()) v = stream.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Tensor::zeros({out}));
  }
  return p;
}

MLPVars bind_mlp(ad::Tape& tape, const MLPParams& params) {
  MLPVars vars;
  vars.activation = params.config.activation;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    vars.weights.push_back(tape.parameter(params.weights[l]));
    vars.biases.push_back(tape.parameter(params.biases[l]));
  }
  return vars;
}

ad::VarId mlp_forward(ad::Tape& tape, const MLPVars& vars, ad::VarId x) {
  ad::VarId h = x;
  const std::size_t layers = vars.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    h = ad::record_affine(tape, h, vars.weights[l], vars.biases[l]);
    if (l + 1 < layers) h = ad::record_activation(tape, h, vars.activation);
  }
  return h;
}

ad::VarId mlp_forward(ad::Tape& tape, const MLPParams& params, ad::VarId x) {
  return mlp_forward(tape, bind_mlp(tape, params), x);
}

BankMode parse_bank_mode(std::string_view name) {
  if (name == "general") return BankMode::kGeneralXi;
  if (name == "deterministic") return BankMode::kDeterministicXi;
  throw ConfigError("unknown bank mode '" + std::string(name) + "' (expected general, deterministic)");
}

std::string_view bank_mode_name(BankMode mode) {
  return mode == BankMode::kGeneralXi ? "general" : "deterministic";
}

Sharing parse_sharing(std::string_view name) {
  if (name == "independent") return Sharing::kIndependent;
  if (name == "shared") return Sharing::kShared;
  throw ConfigError("unknown sharing mode '" + std::string(name) + "' (expected independent, shared)");
}

std::string_view sharing_name(Sharing sharing) {
  return sharing == Sharing::kIndependent ? "independent" : "shared";
}

std::vector<std::size_t> default_hidden_widths(std::size_t dim) { return {dim + 10, dim + 10}; }

void BankLayout::validate() const {
  if (dim < 1) throw ConfigError("bank dimension must be >= 1");
  if (steps < 1) throw ConfigError("bank needs N >= 1 time steps");
  psi_config().validate();
  phi_config().validate();
}

std::size_t BankLayout::network_steps() const {
  return mode == BankMode::kGeneralXi ? steps : steps - 1;
}

std::size_t BankLayout::phi_count() const {
  const std::size_t n = network_steps();
  if (sharing == Sharing::kShared) return n > 0 ? 1 : 0;
  return n;
}

MLPConfig BankLayout::psi_config() const {
  MLPConfig c;
  c.widths.push_back(dim);
  c.widths.insert(c.widths.end(), hidden_widths.begin(), hidden_widths.end());
  c.widths.push_back(1);
  c.activation = activation;
  return c;
}

MLPConfig BankLayout::phi_config() const {
  MLPConfig c = psi_config();
  c.widths.back() = dim;
  return c;
}

SubnetBank SubnetBank::initialize(const BankLayout& layout, std::uint64_t seed) {
  layout.validate();
  SubnetBank bank;
  bank.layout = layout;
  auto subnet_seed = [seed](std::uint64_t k) { return RngStream::derive(seed, kInitStream, k).next_u64(); };
  if (layout.mode == BankMode::kGeneralXi) {
    bank.psi0 = init_params(layout.psi_config(), subnet_seed(0));
  } else {
    bank.y0 = Tensor::zeros({1});
    bank.z0 = Tensor::zeros({layout.dim});
  }
  for (std::size_t k = 0; k < layout.phi_count(); ++k) {
    bank.phi.push_back(init_params(layout.phi_config(), subnet_seed(k + 1)));
  }
  return bank;
}

std::size_t SubnetBank::phi_index(std::size_t step) const {
  const std::size_t first = layout.mode == BankMode::kGeneralXi ? 0 : 1;
  if (step < first || step >= layout.steps) {
    throw DimensionError("no phi network serves time step " + std::to_string(step));
  }
  return layout.sharing == Sharing::kShared ? 0 : step - first;
}

namespace {

template <typename Visit>
void visit_mlp(const std::string& prefix, const MLPParams& p, Visit&& visit) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    visit(prefix + ".layer_" + std::to_string(l) + ".weight", p.weights[l]);
    visit(prefix + ".layer_" + std::to_string(l) + ".bias", p.biases[l]);
  }
}

// Name of the stored phi set k: indexed by the time step it serves.
std::string phi_name(const BankLayout& layout, std::size_t k) {
  if (layout.sharing == Sharing::kShared) return "phi_shared";
  const std::size_t first = layout.mode == BankMode::kGeneralXi ? 0 : 1;
  return "phi_" + std::to_string(k + first);
}

}  // namespace

std::vector<SubnetBank::Entry> SubnetBank::entries() const {
  std::vector<Entry> out;
  auto add = [&out](std::string name, const Tensor& t) { out.push_back({std::move(name), &t}); };
  if (layout.mode == BankMode::kGeneralXi) {
    visit_mlp("psi0", psi0, add);
  } else {
    add("y0", y0);
    add("z0", z0);
  }
  for (std::size_t k = 0; k < phi.size(); ++k) visit_mlp(phi_name(layout, k), phi[k], add);
  return out;
}

std::vector<Tensor*> SubnetBank::mutable_tensors() {
  std::vector<Tensor*> out;
  for (const Entry& e : entries()) out.push_back(const_cast<Tensor*>(e.tensor));
  return out;
}

std::size_t param_count(const SubnetBank& bank) {
  std::size_t n = 0;
  for (const auto& e : bank.entries()) n += e.tensor->size();
  return n;
}

std::vector<double> flatten_params(const SubnetBank& bank) {
  std::vector<double> out;
  out.reserve(param_count(bank));
  for (const auto& e : bank.entries()) out.insert(out.end(), e.tensor->data().begin(), e.tensor->data().end());
  return out;
}

SubnetBank unflatten_params(const SubnetBank& bank_template, std::span<const double> values) {
  const std::size_t expected = param_count(bank_template);
  if (values.size() != expected) {
    throw DimensionError("unflatten_params: expected " + std::to_string(expected) + " values, got " +
                         std::to_string(values.size()));
  }
  SubnetBank bank = bank_template;
  std::size_t offset = 0;
  for (Tensor* t : bank.mutable_tensors()) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), t->size(), t->data().begin());
    offset += t->size();
  }
  return bank;
}

BankVars bind_bank(ad::Tape& tape, const SubnetBank& bank) {
  BankVars vars;
  auto record = [&](const MLPVars& m) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      vars.ordered.push_back(m.weights[l]);
      vars.ordered.push_back(m.biases[l]);
    }
  };
  if (bank.layout.mode == BankMode::kGeneralXi) {
    vars.psi0 = bind_mlp(tape, bank.psi0);
    record(vars.psi0);
  } else {
    vars.y0 = tape.parameter(bank.y0);
    vars.z0 = tape.parameter(bank.z0);
    vars.ordered.push_back(vars.y0);
    vars.ordered.push_back(vars.z0);
  }
  for (const auto& p : bank.phi) {
    vars.phi.push_back(bind_mlp(tape, p));
    record(vars.phi.back());
  }
  return vars;
}

std::vector<double> flatten_gradients(const ad::Tape& tape, const ad::Gradients& grads,
                                      std::span<const ad::VarId> ordered) {
  std::vector<double> out;
  for (ad::VarId id : ordered) {
    const auto it = grads.find(id);
    if (it == grads.end()) {
      out.insert(out.end(), tape.value(id).size(), 0.0);
    } else {
      out.insert(out.end(), it->second.data().begin(), it->second.data().end());
    }
  }
  return out;
}

}  // namespace dbsde
