#include "auxst/graph.h"

#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace auxst {

namespace {

struct Fault {
  std::atomic<int> op{-1};
  std::atomic<double> factor{1.0};
};

Fault& fault() {
  static Fault f;
  return f;
}

[[noreturn]] void shape_error(Op op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op_name(op)) + ": shape mismatch " +
                              a.shape_string() + " vs " + b.shape_string());
}

void require_rank(Op op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw std::invalid_argument(std::string(op_name(op)) + ": expected rank " +
                                std::to_string(rank) + " operand, got " +
                                t.shape_string());
  }
}

double sigmoid_of(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Parameter: return "parameter";
    case Op::Lookup: return "lookup";
    case Op::MatVec: return "matvec";
    case Op::Add: return "add";
    case Op::Tanh: return "tanh";
    case Op::Sigmoid: return "sigmoid";
    case Op::Hadamard: return "hadamard";
    case Op::Concat: return "concat";
    case Op::SoftmaxXent: return "softmax_xent";
    case Op::Mean: return "mean";
    case Op::Sum: return "sum";
    case Op::Scale: return "scale";
  }
  return "unknown";
}

std::span<const Op> differentiable_ops() {
  static constexpr std::array ops = {
      Op::Lookup, Op::MatVec,      Op::Add,  Op::Tanh, Op::Sigmoid, Op::Hadamard,
      Op::Concat, Op::SoftmaxXent, Op::Mean, Op::Sum,  Op::Scale};
  return ops;
}

void GradientMap::set(const Tensor* param, Tensor grad) {
  auto it = index_.find(param);
  if (it != index_.end()) {
    entries_[it->second].second = std::move(grad);
    return;
  }
  index_.emplace(param, entries_.size());
  entries_.emplace_back(param, std::move(grad));
}

void GradientMap::scale(double factor) {
  for (auto& [param, g] : entries_) {
    for (double& v : g.values()) v *= factor;
  }
}

const Tensor* GradientMap::find(const Tensor* param) const {
  auto it = index_.find(param);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

const Graph::Node& Graph::node(NodeRef ref) const {
  if (ref.id >= nodes_.size()) {
    throw std::out_of_range("node ref " + std::to_string(ref.id) +
                            " not in graph of size " +
                            std::to_string(nodes_.size()));
  }
  return nodes_[ref.id];
}

NodeRef Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return NodeRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor& Graph::value(NodeRef ref) const {
  const Node& n = node(ref);
  return n.param ? *n.param : n.value;
}

const Tensor& Graph::gradient(NodeRef ref) const { return node(ref).grad; }

NodeRef Graph::input(Tensor value) {
  Node n{Op::Input, {}, {}, std::move(value), {}, nullptr};
  return push(std::move(n));
}

NodeRef Graph::parameter(const Tensor& param) {
  auto it = params_.find(&param);
  if (it != params_.end()) return it->second;
  Node n{Op::Parameter, {}, {}, {}, {}, &param};
  NodeRef ref = push(std::move(n));
  params_.emplace(&param, ref);
  return ref;
}

NodeRef Graph::apply(Op op, std::span<const NodeRef> inputs, OpArgs args) {
  for (NodeRef in : inputs) node(in);
  auto arity = [&](std::size_t n) {
    if (inputs.size() != n) {
      throw std::invalid_argument(std::string(op_name(op)) + ": expected " +
                                  std::to_string(n) + " inputs, got " +
                                  std::to_string(inputs.size()));
    }
  };

  Node out{op, {inputs.begin(), inputs.end()}, args, {}, {}, nullptr};
  switch (op) {
    case Op::Input:
    case Op::Parameter:
      throw std::invalid_argument("apply: leaves are created with input()/parameter()");

    case Op::Lookup: {
      arity(1);
      const Tensor& table = value(inputs[0]);
      require_rank(op, table, 2);
      if (args.index >= table.rows()) {
        throw std::out_of_range("lookup: row " + std::to_string(args.index) +
                                " outside table " + table.shape_string());
      }
      const std::size_t d = table.cols();
      std::vector<double> row(table.data() + args.index * d,
                              table.data() + (args.index + 1) * d);
      out.value = Tensor::vector(std::move(row));
      break;
    }
    case Op::MatVec: {
      arity(2);
      const Tensor& m = value(inputs[0]);
      const Tensor& v = value(inputs[1]);
      if (m.rank() != 2 || v.rank() != 1 || m.cols() != v.size()) shape_error(op, m, v);
      const std::size_t r = m.rows(), c = m.cols();
      Tensor y({r});
      const double* md = m.data();
      const double* vd = v.data();
      for (std::size_t i = 0; i < r; ++i) {
        const double* row = md + i * c;
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += row[j] * vd[j];
        y[i] = acc;
      }
      out.value = std::move(y);
      break;
    }
    case Op::Add: {
      if (inputs.empty()) throw std::invalid_argument("add: no inputs");
      Tensor y = value(inputs[0]);
      for (std::size_t k = 1; k < inputs.size(); ++k) {
        const Tensor& t = value(inputs[k]);
        if (!t.same_shape(y)) shape_error(op, y, t);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += t[i];
      }
      out.value = std::move(y);
      break;
    }
    case Op::Tanh:
    case Op::Sigmoid:
    case Op::Scale: {
      arity(1);
      Tensor y = value(inputs[0]);
      for (double& v : y.values()) {
        v = op == Op::Tanh ? std::tanh(v)
            : op == Op::Sigmoid ? sigmoid_of(v)
                                : v * args.factor;
      }
      out.value = std::move(y);
      break;
    }
    case Op::Hadamard: {
      arity(2);
      const Tensor& a = value(inputs[0]);
      const Tensor& b = value(inputs[1]);
      if (!a.same_shape(b)) shape_error(op, a, b);
      Tensor y = a;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] *= b[i];
      out.value = std::move(y);
      break;
    }
    case Op::Concat: {
      if (inputs.empty()) throw std::invalid_argument("concat: no inputs");
      std::vector<double> joined;
      for (NodeRef in : inputs) {
        const Tensor& t = value(in);
        require_rank(op, t, 1);
        joined.insert(joined.end(), t.values().begin(), t.values().end());
      }
      out.value = Tensor::vector(std::move(joined));
      break;
    }
    case Op::SoftmaxXent: {
      arity(1);
      const Tensor& logits = value(inputs[0]);
      require_rank(op, logits, 1);
      if (args.index >= logits.size()) {
        throw std::out_of_range("softmax_xent: gold class " +
                                std::to_string(args.index) + " outside logits " +
                                logits.shape_string());
      }
      double max = logits[0];
      for (double v : logits.values()) max = std::max(max, v);
      double total = 0.0;
      for (double v : logits.values()) total += std::exp(v - max);
      out.value = Tensor::scalar(max + std::log(total) - logits[args.index]);
      break;
    }
    case Op::Mean:
    case Op::Sum: {
      arity(1);
      const Tensor& x = value(inputs[0]);
      double acc = 0.0;
      for (double v : x.values()) acc += v;
      if (op == Op::Mean) acc /= static_cast<double>(x.size());
      out.value = Tensor::scalar(acc);
      break;
    }
  }
  return push(std::move(out));
}

NodeRef Graph::lookup(NodeRef table, std::size_t row) {
  return apply(Op::Lookup, {&table, 1}, {row, 1.0});
}
NodeRef Graph::matvec(NodeRef matrix, NodeRef vector) {
  const NodeRef in[] = {matrix, vector};
  return apply(Op::MatVec, in);
}
NodeRef Graph::add(std::initializer_list<NodeRef> terms) {
  return apply(Op::Add, {terms.begin(), terms.size()});
}
NodeRef Graph::add(std::span<const NodeRef> terms) { return apply(Op::Add, terms); }
NodeRef Graph::tanh(NodeRef x) { return apply(Op::Tanh, {&x, 1}); }
NodeRef Graph::sigmoid(NodeRef x) { return apply(Op::Sigmoid, {&x, 1}); }
NodeRef Graph::hadamard(NodeRef a, NodeRef b) {
  const NodeRef in[] = {a, b};
  return apply(Op::Hadamard, in);
}
NodeRef Graph::concat(std::initializer_list<NodeRef> parts) {
  return apply(Op::Concat, {parts.begin(), parts.size()});
}
NodeRef Graph::concat(std::span<const NodeRef> parts) {
  return apply(Op::Concat, parts);
}
NodeRef Graph::softmax_xent(NodeRef logits, std::size_t gold) {
  return apply(Op::SoftmaxXent, {&logits, 1}, {gold, 1.0});
}
NodeRef Graph::mean(NodeRef x) { return apply(Op::Mean, {&x, 1}); }
NodeRef Graph::sum(NodeRef x) { return apply(Op::Sum, {&x, 1}); }
NodeRef Graph::scale(NodeRef x, double factor) {
  return apply(Op::Scale, {&x, 1}, {0, factor});
}

GradientMap Graph::backward(NodeRef loss) {
  const Tensor& lv = value(loss);
  if (!lv.is_scalar()) {
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                lv.shape_string());
  }
  std::vector<Tensor> grads;
  grads.reserve(nodes_.size());
  for (const Node& n : nodes_) grads.emplace_back((n.param ? *n.param : n.value).shape());
  grads[loss.id][0] = 1.0;

  for (std::size_t i = loss.id + 1; i-- > 0;) backprop(nodes_[i], grads);

  GradientMap out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    nodes_[i].grad = std::move(grads[i]);
    if (nodes_[i].param) out.set(nodes_[i].param, nodes_[i].grad);
  }
  return out;
}

void Graph::backprop(const Node& n, std::span<Tensor> grads) const {
  if (n.op == Op::Input || n.op == Op::Parameter) return;
  const std::size_t self = static_cast<std::size_t>(&n - nodes_.data());
  const Tensor& g = grads[self];

  // Negative-control hook; factor 1 in normal operation.
  double k = 1.0;
  if (fault().op.load(std::memory_order_relaxed) == static_cast<int>(n.op)) {
    k = fault().factor.load(std::memory_order_relaxed);
  }
  const Tensor& y = n.value;

  switch (n.op) {
    case Op::Input:
    case Op::Parameter:
      break;
    case Op::Lookup: {
      Tensor& gt = grads[n.inputs[0].id];
      const std::size_t d = gt.cols();
      double* row = gt.data() + n.args.index * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += k * g[j];
      break;
    }
    case Op::MatVec: {
      const Tensor& m = value(n.inputs[0]);
      const Tensor& v = value(n.inputs[1]);
      Tensor& gm = grads[n.inputs[0].id];
      Tensor& gv = grads[n.inputs[1].id];
      const std::size_t r = m.rows(), c = m.cols();
      for (std::size_t i = 0; i < r; ++i) {
        const double gi = k * g[i];
        if (gi == 0.0) continue;
        double* gm_row = gm.data() + i * c;
        const double* m_row = m.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) {
          gm_row[j] += gi * v[j];
          gv[j] += gi * m_row[j];
        }
      }
      break;
    }
    case Op::Add:
      for (NodeRef in : n.inputs) {
        Tensor& gi = grads[in.id];
        for (std::size_t i = 0; i < g.size(); ++i) gi[i] += k * g[i];
      }
      break;
    case Op::Tanh: {
      Tensor& gx = grads[n.inputs[0].id];
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += k * g[i] * (1.0 - y[i] * y[i]);
      break;
    }
    case Op::Sigmoid: {
      Tensor& gx = grads[n.inputs[0].id];
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += k * g[i] * y[i] * (1.0 - y[i]);
      break;
    }
    case Op::Scale: {
      Tensor& gx = grads[n.inputs[0].id];
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += k * g[i] * n.args.factor;
      break;
    }
    case Op::Hadamard: {
      const Tensor& a = value(n.inputs[0]);
      const Tensor& b = value(n.inputs[1]);
      Tensor& ga = grads[n.inputs[0].id];
      Tensor& gb = grads[n.inputs[1].id];
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += k * g[i] * b[i];
        gb[i] += k * g[i] * a[i];
      }
      break;
    }
    case Op::Concat: {
      std::size_t offset = 0;
      for (NodeRef in : n.inputs) {
        Tensor& gi = grads[in.id];
        for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += k * g[offset + i];
        offset += gi.size();
      }
      break;
    }
    case Op::SoftmaxXent: {
      const Tensor& logits = value(n.inputs[0]);
      Tensor& gl = grads[n.inputs[0].id];
      const std::vector<double> p = softmax(logits.values());
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double target = i == n.args.index ? 1.0 : 0.0;
        gl[i] += k * g[0] * (p[i] - target);
      }
      break;
    }
    case Op::Mean:
    case Op::Sum: {
      Tensor& gx = grads[n.inputs[0].id];
      const double scale =
          n.op == Op::Mean ? 1.0 / static_cast<double>(gx.size()) : 1.0;
      for (double& v : gx.values()) v += k * g[0] * scale;
      break;
    }
  }
}

namespace testing {

void set_backward_fault(std::optional<Op> op, double factor) {
  fault().op.store(op ? static_cast<int>(*op) : -1);
  fault().factor.store(factor);
}

}  // namespace testing

}  // namespace auxst
