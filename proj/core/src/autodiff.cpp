// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/autodiff.hpp"

#include <cmath>

#include "dbsde/error.hpp"

namespace dbsde::ad {

namespace {

[[noreturn]] void shape_error(std::string_view op, const Tensor& a, const Tensor& b) {
  throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                       shape_string(b.shape()));
}

void require_rank(std::string_view op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         " operand, got " + shape_string(t.shape()));
  }
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(name) + "' (expected tanh, relu, identity)");
}

std::string_view activation_name(Activation kind) {
  switch (kind) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  throw ConfigError("unknown activation kind");
}

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kConstant: return "constant";
    case OpKind::kParameter: return "parameter";
    case OpKind::kAffine: return "affine";
    case OpKind::kActivation: return "activation";
    case OpKind::kLinearCombination: return "linear_combination";
    case OpKind::kDot: return "dot";
    case OpKind::kPointwiseMul: return "pointwise_mul";
    case OpKind::kBroadcastRows: return "broadcast_rows";
    case OpKind::kRowwiseMap: return "rowwise_map";
    case OpKind::kMeanSquaredError: return "mse";
  }
  return "unknown";
}

const Tape::Node& Tape::node(VarId id) const {
  if (id.index >= nodes_.size()) {
    throw DimensionError("invalid VarId " + std::to_string(id.index) + " (tape has " +
                         std::to_string(nodes_.size()) + " nodes)");
  }
  return nodes_[id.index];
}

Tape::Node& Tape::mutable_node(VarId id) {
  return const_cast<Node&>(static_cast<const Tape&>(*this).node(id));
}

VarId Tape::push(Node node) {
  const VarId id{nodes_.size()};
  for (VarId in : node.inputs) {
    if (in.index >= id.index) throw DimensionError("node input does not precede the node");
  }
  if (!node.value.all_finite()) {
    throw NumericError("non-finite value produced by node " + std::to_string(id.index) + " (" +
                       std::string(op_name(node.op)) + ")");
  }
  node.adjoint = Tensor::zeros(node.value.shape());
  nodes_.push_back(std::move(node));
  return id;
}

VarId Tape::constant(Tensor value) {
  Node n;
  n.op = OpKind::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

VarId Tape::parameter(Tensor value) {
  Node n;
  n.op = OpKind::kParameter;
  n.value = std::move(value);
  return push(std::move(n));
}

VarId record_affine(Tape& tape, VarId x, VarId weight, VarId bias) {
  const Tensor& xv = tape.value(x);
  const Tensor& wv = tape.value(weight);
  const Tensor& bv = tape.value(bias);
  require_rank("affine", xv, 2);
  require_rank("affine", wv, 2);
  require_rank("affine", bv, 1);
  if (xv.cols() != wv.rows()) shape_error("affine", xv, wv);
  if (bv.dim(0) != wv.cols()) shape_error("affine", wv, bv);

  const std::size_t batch = xv.rows(), m = wv.rows(), k = wv.cols();
  Tensor out = Tensor::zeros({batch, k});
  const double* xd = xv.data().data();
  const double* wd = wv.data().data();
  const double* bd = bv.data().data();
  double* od = out.data().data();
  for (std::size_t i = 0; i < batch; ++i) {
    double* orow = od + i * k;
    for (std::size_t j = 0; j < k; ++j) orow[j] = bd[j];
    for (std::size_t p = 0; p < m; ++p) {
      const double xip = xd[i * m + p];
      const double* wrow = wd + p * k;
      for (std::size_t j = 0; j < k; ++j) orow[j] += xip * wrow[j];
    }
  }
  Tape::Node n;
  n.op = OpKind::kAffine;
  n.inputs = {x, weight, bias};
  n.value = std::move(out);
  return tape.push(std::move(n));
}

VarId record_activation(Tape& tape, VarId x, Activation kind) {
  Tensor out = tape.value(x);
  switch (kind) {
    case Activation::kTanh:
      for (double& v : out.data()) v = std::tanh(v);
      break;
    case Activation::kRelu:
      for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::kIdentity:
      break;
    default:
      throw ConfigError("unsupported activation kind");
  }
  Tape::Node n;
  n.op = OpKind::kActivation;
  n.inputs = {x};
  n.activation = kind;
  n.value = std::move(out);
  return tape.push(std::move(n));
}

VarId record_linear_combination(Tape& tape, std::span<const std::pair<double, VarId>> terms) {
  if (terms.empty()) throw DimensionError("linear_combination: no terms");
  const Tensor& first = tape.value(terms[0].second);
  Tensor out = Tensor::zeros(first.shape());
  Tape::Node n;
  n.op = OpKind::kLinearCombination;
  for (const auto& [coef, id] : terms) {
    const Tensor& v = tape.value(id);
    if (v.shape() != first.shape()) shape_error("linear_combination", first, v);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += coef * v[i];
    n.inputs.push_back(id);
    n.coefficients.push_back(coef);
  }
  n.value = std::move(out);
  return tape.push(std::move(n));
}

VarId record_linear_combination(Tape& tape, std::initializer_list<std::pair<double, VarId>> terms) {
  return record_linear_combination(tape, std::span<const std::pair<double, VarId>>(terms.begin(), terms.size()));
}

VarId record_dot(Tape& tape, VarId a, VarId b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  require_rank("dot", av, 2);
  if (av.shape() != bv.shape()) shape_error("dot", av, bv);
  const std::size_t batch = av.rows(), d = av.cols();
  Tensor out = Tensor::zeros({batch, 1});
  for (std::size_t i = 0; i < batch; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += av[i * d + j] * bv[i * d + j];
    out[i] = s;
  }
  Tape::Node n;
  n.op = OpKind::kDot;
  n.inputs = {a, b};
  n.value = std::move(out);
  return tape.push(std::move(n));
}

VarId record_pointwise_mul(Tape& tape, VarId a, VarId b) {
  const Tensor& av = tape.value(a);
  const Tensor& bv = tape.value(b);
  if (av.shape() != bv.shape()) shape_error("pointwise_mul", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  Tape::Node n;
  n.op = OpKind::kPointwiseMul;
  n.inputs = {a, b};
  n.value = std::move(out);
  return tape.push(std::move(n));
}

VarId record_broadcast_rows(Tape& tape, VarId v, std::size_t rows) {
  const Tensor& vv = tape.value(v);
  require_rank("broadcast_rows", vv, 1);
  if (rows == 0) throw DimensionError("broadcast_rows: zero rows");
  const std::size_t k = vv.dim(0);
  Tensor out = Tensor::zeros({rows, k});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] = vv[j];
  }
  Tape::Node n;
  n.op = OpKind::kBroadcastRows;
  n.inputs = {v};
  n.value = std::move(out);
  return tape.push(std::move(n));
}

VarId record_rowwise_map(Tape& tape, std::span<const VarId> inputs, Tensor value,
                         std::vector<Tensor> partials) {
  require_rank("rowwise_map", value, 2);
  if (value.cols() != 1) throw DimensionError("rowwise_map: value must be [batch x 1], got " +
                                              shape_string(value.shape()));
  if (partials.size() != inputs.size()) {
    throw DimensionError("rowwise_map: one partial tensor per input is required");
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor& in = tape.value(inputs[k]);
    if (partials[k].shape() != in.shape()) shape_error("rowwise_map", in, partials[k]);
    require_rank("rowwise_map", in, 2);
    if (in.rows() != value.rows()) shape_error("rowwise_map", in, value);
    if (!partials[k].all_finite()) {
      throw NumericError("rowwise_map: non-finite partial derivative for input " + std::to_string(k));
    }
  }
  Tape::Node n;
  n.op = OpKind::kRowwiseMap;
  n.inputs.assign(inputs.begin(), inputs.end());
  n.value = std::move(value);
  n.partials = std::move(partials);
  return tape.push(std::move(n));
}

VarId loss_mse(Tape& tape, VarId pred, VarId target) {
  const Tensor& pv = tape.value(pred);
  const Tensor& tv = tape.value(target);
  require_rank("mse", pv, 2);
  if (pv.shape() != tv.shape() || pv.cols() != 1) shape_error("mse", pv, tv);
  const std::size_t batch = pv.rows();
  if (batch == 0) throw DimensionError("mse: empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double diff = pv[i] - tv[i];
    s += diff * diff;
  }
  Tape::Node n;
  n.op = OpKind::kMeanSquaredError;
  n.inputs = {pred, target};
  n.value = Tensor::scalar(s / static_cast<double>(batch));
  return tape.push(std::move(n));
}

namespace {

void propagate(Tape& tape, const Tape::Node& node) {
  const Tensor& adj = node.adjoint;
  switch (node.op) {
    case OpKind::kConstant:
    case OpKind::kParameter:
      return;
    case OpKind::kAffine: {
      const Tensor& xv = tape.value(node.inputs[0]);
      const Tensor& wv = tape.value(node.inputs[1]);
      const std::size_t batch = xv.rows(), m = wv.rows(), k = wv.cols();
      double* dx = tape.mutable_node(node.inputs[0]).adjoint.data().data();
      double* dw = tape.mutable_node(node.inputs[1]).adjoint.data().data();
      double* db = tape.mutable_node(node.inputs[2]).adjoint.data().data();
      const double* xd = xv.data().data();
      const double* wd = wv.data().data();
      const double* ad = adj.data().data();
      for (std::size_t i = 0; i < batch; ++i) {
        const double* arow = ad + i * k;
        for (std::size_t j = 0; j < k; ++j) db[j] += arow[j];
        for (std::size_t p = 0; p < m; ++p) {
          const double* wrow = wd + p * k;
          double* dwrow = dw + p * k;
          const double xip = xd[i * m + p];
          double s = 0.0;
          for (std::size_t j = 0; j < k; ++j) {
            s += arow[j] * wrow[j];
            dwrow[j] += xip * arow[j];
          }
          dx[i * m + p] += s;
        }
      }
      return;
    }
    case OpKind::kActivation: {
      Tensor& dx = tape.mutable_node(node.inputs[0]).adjoint;
      const Tensor& xv = tape.value(node.inputs[0]);
      for (std::size_t i = 0; i < adj.size(); ++i) {
        switch (node.activation) {
          case Activation::kTanh: dx[i] += adj[i] * (1.0 - node.value[i] * node.value[i]); break;
          case Activation::kRelu: dx[i] += xv[i] > 0.0 ? adj[i] : 0.0; break;
          case Activation::kIdentity: dx[i] += adj[i]; break;
        }
      }
      return;
    }
    case OpKind::kLinearCombination:
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        Tensor& dx = tape.mutable_node(node.inputs[k]).adjoint;
        const double c = node.coefficients[k];
        for (std::size_t i = 0; i < adj.size(); ++i) dx[i] += c * adj[i];
      }
      return;
    case OpKind::kDot: {
      const Tensor& av = tape.value(node.inputs[0]);
      const Tensor& bv = tape.value(node.inputs[1]);
      const std::size_t batch = av.rows(), d = av.cols();
      Tensor& da = tape.mutable_node(node.inputs[0]).adjoint;
      Tensor& dbv = tape.mutable_node(node.inputs[1]).adjoint;
      for (std::size_t i = 0; i < batch; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          da[i * d + j] += adj[i] * bv[i * d + j];
          dbv[i * d + j] += adj[i] * av[i * d + j];
        }
      }
      return;
    }
    case OpKind::kPointwiseMul: {
      const Tensor& av = tape.value(node.inputs[0]);
      const Tensor& bv = tape.value(node.inputs[1]);
      Tensor& da = tape.mutable_node(node.inputs[0]).adjoint;
      Tensor& dbv = tape.mutable_node(node.inputs[1]).adjoint;
      for (std::size_t i = 0; i < adj.size(); ++i) {
        da[i] += adj[i] * bv[i];
        dbv[i] += adj[i] * av[i];
      }
      return;
    }
    case OpKind::kBroadcastRows: {
      Tensor& dv = tape.mutable_node(node.inputs[0]).adjoint;
      const std::size_t rows = adj.rows(), k = adj.cols();
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < k; ++j) dv[j] += adj[i * k + j];
      }
      return;
    }
    case OpKind::kRowwiseMap:
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        Tensor& dx = tape.mutable_node(node.inputs[k]).adjoint;
        const Tensor& part = node.partials[k];
        const std::size_t cols = part.cols();
        for (std::size_t i = 0; i < part.rows(); ++i) {
          for (std::size_t j = 0; j < cols; ++j) dx[i * cols + j] += adj[i] * part[i * cols + j];
        }
      }
      return;
    case OpKind::kMeanSquaredError: {
      const Tensor& pv = tape.value(node.inputs[0]);
      const Tensor& tv = tape.value(node.inputs[1]);
      Tensor& dp = tape.mutable_node(node.inputs[0]).adjoint;
      Tensor& dt = tape.mutable_node(node.inputs[1]).adjoint;
      const double scale = 2.0 * adj.item() / static_cast<double>(pv.rows());
      for (std::size_t i = 0; i < pv.size(); ++i) {
        const double g = scale * (pv[i] - tv[i]);
        dp[i] += g;
        dt[i] -= g;
      }
      return;
    }
  }
}

}  // namespace

Gradients backward(Tape& tape, VarId loss) {
  if (tape.value(loss).size() != 1) {
    throw DimensionError("backward: loss must be scalar, got shape " +
                         shape_string(tape.value(loss).shape()));
  }
  for (std::size_t i = 0; i < tape.size(); ++i) tape.mutable_node(VarId{i}).adjoint.fill(0.0);
  tape.mutable_node(loss).adjoint[0] = 1.0;

  for (std::size_t i = loss.index + 1; i-- > 0;) {
    const Tape::Node& node = tape.node(VarId{i});
    if (!node.adjoint.all_finite()) {
      throw NumericError("non-finite adjoint at node " + std::to_string(i) + " (" +
                         std::string(op_name(node.op)) + ")");
    }
    propagate(tape, node);
  }

  Gradients grads;
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const VarId id{i};
    if (tape.is_parameter(id)) grads.emplace(id, tape.adjoint(id));
  }
  return grads;
}

}  // namespace dbsde::ad
