#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "auxst/errors.h"
#include "auxst/gradcheck.h"
#include "auxst/gradcheck_suite.h"
#include "auxst/graph.h"
#include "auxst/random.h"
#include "auxst/tensor.h"

using namespace auxst;

namespace {

Tensor random_tensor(Tensor::Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = uniform_real(rng, -1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("tensor shape and value count must agree") {
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor({0}), std::invalid_argument);
  const Tensor m = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.at(1, 2) == 6.0);
  CHECK(m.shape_string() == "[2x3]");
}

TEST_CASE("identity matrix times v returns v") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g;
    const Tensor v = random_tensor({3}, rng);
    const auto y = g.matvec(g.input(Tensor::matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})),
                            g.input(v));
    CHECK(g.value(y) == v);
  }
}

TEST_CASE("sigmoid of zeros is one half") {
  Graph g;
  const auto y = g.sigmoid(g.input(Tensor({4})));
  for (double v : g.value(y).values()) CHECK(v == 0.5);
}

TEST_CASE("softmax cross-entropy of equal logits is ln 2") {
  Graph g;
  const auto loss = g.softmax_xent(g.input(Tensor::vector({0.0, 0.0})), 0);
  CHECK(g.value(loss).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("softmax cross-entropy is stable for large logits") {
  Graph g;
  const auto loss = g.softmax_xent(g.input(Tensor::vector({1000.0, 1000.0})), 1);
  CHECK(g.value(loss).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("shape mismatch names the operator and both shapes") {
  Graph g;
  const auto a = g.input(Tensor({3}));
  const auto b = g.input(Tensor({2}));
  try {
    g.hadamard(a, b);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hadamard") != std::string::npos);
    CHECK(msg.find("[3]") != std::string::npos);
    CHECK(msg.find("[2]") != std::string::npos);
  }
  const auto m = g.input(Tensor({2, 3}));
  CHECK_THROWS_WITH_AS(g.matvec(m, b), doctest::Contains("matvec"), std::invalid_argument);
}

TEST_CASE("nodes are appended in topological order") {
  Graph g;
  const auto x = g.input(Tensor::vector({1, 2}));
  const auto y = g.tanh(x);
  const auto z = g.add({x, y});
  CHECK(x.id < y.id);
  CHECK(y.id < z.id);
  CHECK(g.size() == 3);
}

TEST_CASE("gradient of x.y with respect to x is y") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor x = random_tensor({4}, rng);
    const Tensor y = random_tensor({4}, rng);
    Graph g;
    const auto px = g.parameter(x);
    const auto loss = g.sum(g.hadamard(px, g.input(y)));
    const GradientMap grads = g.backward(loss);
    REQUIRE(grads.find(&x));
    for (std::size_t i = 0; i < 4; ++i) CHECK((*grads.find(&x))[i] == y[i]);
  }
}

TEST_CASE("mean of a constant node gives zero parameter gradients") {
  const Tensor p = Tensor::vector({0.3, -0.2});
  Graph g;
  g.parameter(p);
  const auto loss = g.mean(g.input(Tensor::vector({1.0, 2.0, 3.0})));
  const GradientMap grads = g.backward(loss);
  for (double v : grads.find(&p)->values()) CHECK(v == 0.0);
}

TEST_CASE("every node gets a gradient of its own shape; nodes off the path get zeros") {
  const Tensor w = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  Graph g;
  const auto pw = g.parameter(w);
  const auto x = g.input(Tensor::vector({1, -1, 0.5}));
  const auto off = g.tanh(x);
  const auto loss = g.mean(g.matvec(pw, x));
  g.backward(loss);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    CHECK(g.gradient(NodeRef{i}).shape() == g.value(NodeRef{i}).shape());
  }
  for (double v : g.gradient(off).values()) CHECK(v == 0.0);
}

TEST_CASE("non-scalar loss is rejected") {
  Graph g;
  const auto x = g.input(Tensor::vector({1, 2}));
  CHECK_THROWS_AS(g.backward(x), std::invalid_argument);
}

TEST_CASE("parameters enter a graph once") {
  const Tensor p = Tensor::vector({1.0});
  Graph g;
  CHECK(g.parameter(p) == g.parameter(p));
  CHECK(g.size() == 1);
}

TEST_CASE("finite differences of x^2 at 3 give 6") {
  Tensor x = Tensor::scalar(3.0);
  Tensor* params[] = {&x};
  const auto grad =
      finite_difference_gradient([&] { return x[0] * x[0]; }, params, 1e-5);
  CHECK(std::abs(grad[0][0] - 6.0) < 1e-6);
  CHECK(x[0] == 3.0);
}

TEST_CASE("finite differences of a constant are zero") {
  Tensor x = Tensor::vector({1, 2, 3});
  Tensor* params[] = {&x};
  const auto grad = finite_difference_gradient([] { return 4.2; }, params, 1e-5);
  for (double v : grad[0].values()) CHECK(v == 0.0);
}

TEST_CASE("finite differences reject non-finite objectives and bad epsilon") {
  Tensor x = Tensor::scalar(0.0);
  Tensor* params[] = {&x};
  CHECK_THROWS_AS(finite_difference_gradient([&] { return std::log(x[0]); },
                                             params, 1e-5),
                  NumericalError);
  CHECK_THROWS_AS(finite_difference_gradient([] { return 0.0; }, params, 0.0),
                  std::invalid_argument);
}

TEST_CASE("compare_gradients applies relative and absolute tolerances") {
  CHECK(compare_gradients(Tensor::vector({1.0}), Tensor::vector({1.00005})).ok);
  CHECK_FALSE(compare_gradients(Tensor::vector({1.0}), Tensor::vector({1.001})).ok);
  CHECK(compare_gradients(Tensor::vector({1e-9}), Tensor::vector({2e-9})).ok);
  CHECK_FALSE(compare_gradients(Tensor::vector({0.0}), Tensor::vector({5e-5})).ok);
}

TEST_CASE("property: random compositions agree with finite differences") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Rng rng(seed);
    const std::size_t n = 2 + uniform_index(rng, 4);
    Tensor w = random_tensor({n, n}, rng);
    Tensor b = random_tensor({n}, rng);
    Tensor x = random_tensor({n}, rng);
    const std::size_t gold = uniform_index(rng, 2 * n);
    const double k = uniform_real(rng, -2.0, 2.0);
    auto build = [&](Graph& g) {
      const auto pw = g.parameter(w);
      const auto px = g.parameter(x);
      const auto h = g.tanh(g.add({g.matvec(pw, px), g.parameter(b)}));
      const auto s = g.sigmoid(g.matvec(pw, h));
      const auto joined = g.concat({g.hadamard(h, s), g.scale(px, k)});
      return g.add({g.softmax_xent(joined, gold), g.mean(s)});
    };
    Graph g;
    const GradientMap grads = g.backward(build(g));
    Tensor* params[] = {&w, &b, &x};
    const auto numeric = finite_difference_gradient(
        [&] {
          Graph f;
          return f.value(build(f)).item();
        },
        params, 1e-5);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(compare_gradients(*grads.find(params[i]), numeric[i]).ok);
    }
  }
}

TEST_CASE("property: backward is linear in the loss") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    Tensor w = random_tensor({3, 3}, rng);
    Tensor x = random_tensor({3}, rng);
    const double a = uniform_real(rng, -2, 2), c = uniform_real(rng, -2, 2);
    auto loss1 = [&](Graph& g) { return g.sum(g.tanh(g.matvec(g.parameter(w), g.parameter(x)))); };
    auto loss2 = [&](Graph& g) { return g.softmax_xent(g.matvec(g.parameter(w), g.parameter(x)), 1); };
    Graph g1, g2, g12;
    const auto grad1 = g1.backward(loss1(g1));
    const auto grad2 = g2.backward(loss2(g2));
    const auto combined = g12.backward(g12.add({g12.scale(loss1(g12), a), g12.scale(loss2(g12), c)}));
    for (const Tensor* p : {static_cast<const Tensor*>(&w), static_cast<const Tensor*>(&x)}) {
      for (std::size_t i = 0; i < p->size(); ++i) {
        const double expect = a * (*grad1.find(p))[i] + c * (*grad2.find(p))[i];
        CHECK(std::abs((*combined.find(p))[i] - expect) < 1e-9);
      }
    }
  }
}

TEST_CASE("property: identical graphs give bit-identical values and gradients") {
  Rng rng(9);
  Tensor w = random_tensor({4, 4}, rng);
  Tensor x = random_tensor({4}, rng);
  auto run = [&] {
    Graph g;
    const auto loss = g.softmax_xent(g.tanh(g.matvec(g.parameter(w), g.parameter(x))), 2);
    auto grads = g.backward(loss);
    return std::pair{g.value(loss).item(), *grads.find(&w)};
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("property: softmax is a probability distribution") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> logits(2 + uniform_index(rng, 19));
    for (double& v : logits) v = uniform_real(rng, -10.0, 10.0);
    const auto p = softmax(logits);
    double total = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("gradient check suite passes and detects an injected fault") {
  const GradcheckReport report = run_gradient_checks(1);
  CHECK(report.ok());
  CHECK(report.checks.size() == differentiable_ops().size() + 2);
  CHECK(format_gradcheck(report) == format_gradcheck(run_gradient_checks(1)));

  testing::set_backward_fault(Op::Sigmoid, 1.5);
  const GradcheckReport broken = run_gradient_checks(1);
  testing::set_backward_fault(std::nullopt);
  CHECK_FALSE(broken.ok());
  for (const auto& c : broken.checks) {
    if (c.name == "sigmoid") CHECK_FALSE(c.agreement.ok);
    if (c.name == "tanh") CHECK(c.agreement.ok);
  }
}
