#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "auxst/tensor.h"

namespace auxst {

enum class Op : std::uint8_t {
  Input,
  Parameter,
  Lookup,       // row of a rank-2 table
  MatVec,       // [r x c] * [c] -> [r]
  Add,          // n-ary, identical shapes
  Tanh,
  Sigmoid,
  Hadamard,
  Concat,       // rank-1 inputs
  SoftmaxXent,  // logits [k], gold class -> scalar
  Mean,
  Sum,
  Scale,        // multiply by a constant
};

std::string_view op_name(Op op);

// Operators with a backward rule, i.e. everything except the leaves.
std::span<const Op> differentiable_ops();

struct NodeRef {
  std::uint32_t id = 0;
  bool operator==(const NodeRef&) const = default;
};

// Non-tensor operator arguments: the row for Lookup, gold class for
// SoftmaxXent, factor for Scale.
struct OpArgs {
  std::size_t index = 0;
  double factor = 1.0;
};

// Gradients of parameter tensors, in the order the parameters entered the
// graph. Keys are the addresses of the parameter tensors.
class GradientMap {
 public:
  void set(const Tensor* param, Tensor grad);
  const Tensor* find(const Tensor* param) const;
  const std::vector<std::pair<const Tensor*, Tensor>>& entries() const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }
  void scale(double factor);

 private:
  std::vector<std::pair<const Tensor*, Tensor>> entries_;
  std::unordered_map<const Tensor*, std::size_t> index_;
};

// Eager computation graph: each node's value is computed when it is
// appended, so node order is topological by construction. Parameters are
// referenced, not copied, and must outlive the graph.
class Graph {
 public:
  NodeRef apply(Op op, std::span<const NodeRef> inputs, OpArgs args = {});

  NodeRef input(Tensor value);
  // A parameter tensor enters a graph once; repeated calls return the same node.
  NodeRef parameter(const Tensor& param);

  NodeRef lookup(NodeRef table, std::size_t row);
  NodeRef matvec(NodeRef matrix, NodeRef vector);
  NodeRef add(std::initializer_list<NodeRef> terms);
  NodeRef add(std::span<const NodeRef> terms);
  NodeRef tanh(NodeRef x);
  NodeRef sigmoid(NodeRef x);
  NodeRef hadamard(NodeRef a, NodeRef b);
  NodeRef concat(std::initializer_list<NodeRef> parts);
  NodeRef concat(std::span<const NodeRef> parts);
  NodeRef softmax_xent(NodeRef logits, std::size_t gold);
  NodeRef mean(NodeRef x);
  NodeRef sum(NodeRef x);
  NodeRef scale(NodeRef x, double factor);

  const Tensor& value(NodeRef node) const;
  // Zero-shaped placeholder until backward() has run.
  const Tensor& gradient(NodeRef node) const;
  Op op(NodeRef node) const { return nodes_.at(node.id).op; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse-mode sweep from a scalar node. Every node receives a gradient
  // of its own shape; nodes not upstream of `loss` get zeros.
  GradientMap backward(NodeRef loss);

 private:
  struct Node {
    Op op;
    std::vector<NodeRef> inputs;
    OpArgs args;
    Tensor value;
    Tensor grad;
    const Tensor* param = nullptr;
  };

  const Node& node(NodeRef ref) const;
  NodeRef push(Node node);
  void backprop(const Node& node, std::span<Tensor> grads) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, NodeRef> params_;
};

namespace testing {
// Fault injection for negative-control tests: scales the backward
// contribution of `op` by `factor`. Pass std::nullopt to clear. Process-wide.
void set_backward_fault(std::optional<Op> op, double factor = 1.0);
}  // namespace testing

}  // namespace auxst
