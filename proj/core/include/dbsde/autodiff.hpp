// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode automatic differentiation over dense double tensors.
//
// A Tape is an append-only list of nodes. Every recording function computes
// the forward value eagerly and stores what the reverse sweep needs. Inputs of
// a node always precede it, so the reverse sweep is a plain descending loop.

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dbsde/tensor.hpp"

namespace dbsde::ad {

struct VarId {
  std::size_t index = 0;
  auto operator<=>(const VarId&) const = default;
};

enum class Activation { kTanh, kRelu, kIdentity };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation kind);

enum class OpKind {
  kConstant,
  kParameter,
  kAffine,
  kActivation,
  kLinearCombination,
  kDot,
  kPointwiseMul,
  kBroadcastRows,
  kRowwiseMap,
  kMeanSquaredError,
};

std::string_view op_name(OpKind kind);

class Tape {
 public:
  struct Node {
    OpKind op = OpKind::kConstant;
    std::vector<VarId> inputs;
    Tensor value;
    Tensor adjoint;
    // Op-specific payload: coefficients for linear combinations, local
    // partials for rowwise maps.
    std::vector<double> coefficients;
    std::vector<Tensor> partials;
    Activation activation = Activation::kIdentity;
  };

  VarId constant(Tensor value);
  VarId parameter(Tensor value);

  const Tensor& value(VarId id) const { return node(id).value; }
  const Tensor& adjoint(VarId id) const { return node(id).adjoint; }
  const Node& node(VarId id) const;
  std::size_t size() const { return nodes_.size(); }
  bool is_parameter(VarId id) const { return node(id).op == OpKind::kParameter; }

  /// Appends a node; the forward value must already be set. Throws
  /// NumericError if the value is not finite.
  VarId push(Node node);

  // Used by backward().
  Node& mutable_node(VarId id);

 private:
  std::vector<Node> nodes_;
};

/// x [batch x m] * W [m x k] + b [k], bias broadcast over rows.
VarId record_affine(Tape& tape, VarId x, VarId weight, VarId bias);

/// Elementwise activation. relu'(0) is taken as 0.
VarId record_activation(Tape& tape, VarId x, Activation kind);

/// sum_k c_k * v_k over equally shaped operands.
VarId record_linear_combination(Tape& tape, std::span<const std::pair<double, VarId>> terms);
VarId record_linear_combination(Tape& tape, std::initializer_list<std::pair<double, VarId>> terms);

/// Row-wise inner product: [batch x d], [batch x d] -> [batch x 1].
VarId record_dot(Tape& tape, VarId a, VarId b);

/// Elementwise product of equally shaped operands.
VarId record_pointwise_mul(Tape& tape, VarId a, VarId b);

/// Repeats a rank-1 tensor [k] as `rows` rows: -> [rows x k].
VarId record_broadcast_rows(Tape& tape, VarId v, std::size_t rows);

/// Records a row-wise scalar function h(row_i(in_0), row_i(in_1), ...) whose
/// values [batch x 1] and per-row partials (one tensor per input, same shape
/// as that input) the caller has already evaluated.
VarId record_rowwise_map(Tape& tape, std::span<const VarId> inputs, Tensor value,
                         std::vector<Tensor> partials);

/// Mean over the batch of squared differences; [batch x 1] operands -> scalar.
VarId loss_mse(Tape& tape, VarId pred, VarId target);

using Gradients = std::map<VarId, Tensor>;

/// Seeds d(loss)/d(loss) = 1, sweeps nodes in decreasing order and returns the
/// adjoint of every parameter node. Adjoints are reset first, so calling
/// backward twice gives the same result.
Gradients backward(Tape& tape, VarId loss);

}  // namespace dbsde::ad
