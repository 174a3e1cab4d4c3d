#include "auxst/gradcheck_suite.h"

#include <cstdio>
#include <functional>

#include "auxst/graph.h"
#include "auxst/model.h"
#include "auxst/random.h"

namespace auxst {

namespace {

Tensor random_tensor(Tensor::Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = uniform_real(rng, -1.0, 1.0);
  return t;
}

// Builds a scalar from the graph and the given parameter nodes.
using Builder = std::function<NodeRef(Graph&, const std::vector<NodeRef>&)>;

OperatorCheck check(std::string name, std::vector<Tensor> params, const Builder& build) {
  std::vector<Tensor*> ptrs;
  for (auto& p : params) ptrs.push_back(&p);

  auto forward = [&](Graph& g) {
    std::vector<NodeRef> nodes;
    for (Tensor* p : ptrs) nodes.push_back(g.parameter(*p));
    return build(g, nodes);
  };

  Graph graph;
  const NodeRef loss = forward(graph);
  const GradientMap grads = graph.backward(loss);
  const auto numeric = finite_difference_gradient(
      [&] {
        Graph g;
        return g.value(forward(g)).item();
      },
      ptrs, kGradcheckEpsilon);

  OperatorCheck out{std::move(name), {}, 0};
  for (std::size_t i = 0; i < ptrs.size(); ++i) {
    const Tensor* analytic = grads.find(ptrs[i]);
    const Tensor zeros(ptrs[i]->shape());
    merge(out.agreement, compare_gradients(analytic ? *analytic : zeros, numeric[i]));
    out.parameters += ptrs[i]->size();
  }
  return out;
}

// Projects a vector node onto fixed random weights so every output
// coordinate influences the scalar.
NodeRef project(Graph& g, NodeRef x, const Tensor& weights) {
  return g.sum(g.hadamard(x, g.input(weights)));
}

}  // namespace

bool GradcheckReport::ok() const {
  for (const auto& c : checks) {
    if (!c.agreement.ok) return false;
  }
  return !checks.empty();
}

GradcheckReport run_gradient_checks(std::uint64_t seed) {
  Rng rng(seed);
  GradcheckReport report;
  const std::size_t n = 5;
  const Tensor proj = random_tensor({n}, rng);
  const Tensor proj3 = random_tensor({3}, rng);

  report.checks.push_back(check("lookup", {random_tensor({4, n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return project(g, g.lookup(p[0], 2), proj);
                                }));
  report.checks.push_back(check("matvec", {random_tensor({3, n}, rng), random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return project(g, g.matvec(p[0], p[1]), proj3);
                                }));
  report.checks.push_back(check("add",
                                {random_tensor({n}, rng), random_tensor({n}, rng),
                                 random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return project(g, g.add({p[0], p[1], p[2]}), proj);
                                }));
  report.checks.push_back(check("tanh", {random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return project(g, g.tanh(p[0]), proj);
                                }));
  report.checks.push_back(check("sigmoid", {random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return project(g, g.sigmoid(p[0]), proj);
                                }));
  report.checks.push_back(check("hadamard", {random_tensor({n}, rng), random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return g.sum(g.hadamard(g.hadamard(p[0], p[1]), g.input(proj)));
                                }));
  {
    Tensor joined = random_tensor({n + 3}, rng);
    report.checks.push_back(check("concat", {random_tensor({n}, rng), random_tensor({3}, rng)},
                                  [&](Graph& g, const auto& p) {
                                    return project(g, g.concat({p[0], p[1]}), joined);
                                  }));
  }
  report.checks.push_back(check("softmax_xent", {random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) { return g.softmax_xent(p[0], 1); }));
  report.checks.push_back(check("mean", {random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return g.mean(g.hadamard(p[0], p[0]));
                                }));
  report.checks.push_back(check("sum", {random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return g.sum(g.hadamard(p[0], p[0]));
                                }));
  report.checks.push_back(check("scale", {random_tensor({n}, rng)},
                                [&](Graph& g, const auto& p) {
                                  return project(g, g.scale(p[0], -1.7), proj);
                                }));

  // x -> tanh(W2 tanh(W1 x + b1) + b2), softmax cross-entropy on top.
  report.checks.push_back(check(
      "two_layer_tanh",
      {random_tensor({6, n}, rng), random_tensor({6}, rng), random_tensor({3, 6}, rng),
       random_tensor({3}, rng), random_tensor({n}, rng)},
      [&](Graph& g, const auto& p) {
        const NodeRef h = g.tanh(g.add({g.matvec(p[0], p[4]), p[1]}));
        const NodeRef o = g.tanh(g.add({g.matvec(p[2], h), p[3]}));
        return g.softmax_xent(o, 2);
      }));

  {
    // Full tagger: every parameter tensor, two task heads, loss on one.
    const ModelDims dims{4, 3, 3, 4};
    const Vocabulary vocab({"ab", "ba", "c"}, {"a", "b", "c"});
    std::vector<TaskSpec> tasks = {TaskSpec("main", {"X", "Y", "Z"}, TaskRole::Main),
                                   TaskSpec("aux", {"P", "Q"}, TaskRole::Auxiliary)};
    ModelParams model(dims, vocab, tasks, rng());
    // Random values in [-1, 1] everywhere, biases included.
    for (auto& [name, t] : model.tensors()) {
      for (double& v : t.values()) v = uniform_real(rng, -1.0, 1.0);
    }
    const std::vector<std::string> tokens = {"ab", "cab", "d"};
    const std::vector<std::string> gold = {"Y", "X", "Z"};

    std::vector<Tensor*> ptrs;
    for (auto& [name, t] : model.tensors()) ptrs.push_back(&t);
    Graph graph;
    const GradientMap grads = graph.backward(sentence_loss(graph, model, tokens, gold, "main"));
    const auto numeric = finite_difference_gradient(
        [&] { return sentence_loss(model, tokens, gold, "main"); }, ptrs, kGradcheckEpsilon);
    OperatorCheck full{"full_model", {}, 0};
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      const Tensor* analytic = grads.find(ptrs[i]);
      const Tensor zeros(ptrs[i]->shape());
      merge(full.agreement, compare_gradients(analytic ? *analytic : zeros, numeric[i]));
      full.parameters += ptrs[i]->size();
    }
    report.checks.push_back(full);
  }
  return report;
}

std::string format_gradcheck(const GradcheckReport& report) {
  std::string out = "check\tparameters\tmax_rel_error\tmax_abs_error\tstatus\n";
  char buf[160];
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%s\t%zu\t%.3e\t%.3e\t%s\n", c.name.c_str(), c.parameters,
                  c.agreement.max_relative_error, c.agreement.max_absolute_error,
                  c.agreement.ok ? "PASS" : "FAIL");
    out += buf;
  }
  out += report.ok() ? "all checks passed\n" : "gradient check FAILED\n";
  return out;
}

}  // namespace auxst
