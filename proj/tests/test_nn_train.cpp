#include <doctest.h>

#include <cmath>

#include "autolabel/nn/checks.hpp"
#include "autolabel/nn/loss.hpp"
#include "autolabel/nn/optimizer.hpp"

using namespace autolabel;
using namespace autolabel::nn;

TEST_SUITE("nn.train") {

TEST_CASE("cross entropy of a perfect prediction is near zero") {
  Tensor<double> probs({2, 3}), targets({2, 3});
  probs(0, 0) = 1.0;
  probs(1, 2) = 1.0;
  targets(0, 0) = 1.0;
  targets(1, 2) = 1.0;
  CHECK(cross_entropy(probs, targets) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cross entropy of the uniform prediction is ln 3") {
  Tensor<double> probs({4, 3}), targets({4, 3});
  for (auto& v : probs.data) v = 1.0 / 3.0;
  for (std::size_t b = 0; b < 4; ++b) targets(b, b % 3) = 1.0;
  CHECK(cross_entropy(probs, targets) == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("cross entropy is non-negative and zero only at the one-hot optimum") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor<double> logits({1, 3}), targets({1, 3});
    for (auto& v : logits.data) v = rng.uniform(-6.0, 6.0);
    targets(0, rng.below(3)) = 1.0;
    softmax_rows(logits);
    const double loss = cross_entropy(logits, targets);
    CHECK(loss >= 0.0);
  }
}

TEST_CASE("loss gradient is (p - t) / batch") {
  Rng rng(9);
  Tensor<double> logits({5, 3}), targets({5, 3});
  for (auto& v : logits.data) v = rng.uniform(-3.0, 3.0);
  for (std::size_t b = 0; b < 5; ++b) targets(b, rng.below(3)) = 1.0;
  softmax_rows(logits);
  const auto [loss, grad] = loss_and_grad(logits, targets);
  CHECK(loss > 0.0);
  for (std::size_t i = 0; i < grad.data.size(); ++i)
    CHECK(grad.data[i] ==
          doctest::Approx((logits.data[i] - targets.data[i]) / 5.0).epsilon(1e-12));
}

TEST_CASE("loss rejects mismatched shapes") {
  Tensor<double> probs({2, 3}), targets({3, 3});
  CHECK_THROWS_AS(cross_entropy(probs, targets), ShapeMismatch);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ParamTensor<double> p;
  p.name = "p";
  p.init_shape({4});
  for (std::size_t i = 0; i < 4; ++i) p.value(i) = 1.0 + static_cast<double>(i);
  p.has_grad = true;  // populated with zeros
  const auto before = p.value.data;

  Adam<double> opt(0.1);
  opt.step({&p});
  CHECK(p.value.data == before);
}

TEST_CASE("adam: first step with unit gradient is one bias-corrected learning rate") {
  ParamTensor<double> p;
  p.name = "p";
  p.init_shape({1});
  p.value(0) = 0.0;
  p.grad(0) = 1.0;
  p.has_grad = true;

  const double lr = 0.001;
  Adam<double> opt(lr);
  opt.step({&p});
  CHECK(std::fabs(p.value(0) + lr) <= 1e-6 * lr);
}

TEST_CASE("adam refuses unpopulated gradients") {
  ParamTensor<double> p;
  p.name = "p";
  p.init_shape({2});
  Adam<double> opt(0.01);
  CHECK_THROWS_AS(opt.step({&p}), MissingGradients);
}

TEST_CASE("adam trajectories are bit-identical across runs") {
  auto run = [] {
    ParamTensor<float> p;
    p.name = "p";
    p.init_shape({16});
    Rng rng(33);
    for (auto& v : p.value.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    Adam<float> opt(0.01f);
    for (int step = 0; step < 50; ++step) {
      for (std::size_t i = 0; i < 16; ++i)
        p.grad(i) = static_cast<float>(std::sin(0.1 * step + static_cast<double>(i)));
      p.has_grad = true;
      opt.step({&p});
    }
    return p.value.data;
  };
  CHECK(run() == run());
}

TEST_CASE("full architectures pass finite-difference gradient checks") {
  for (const auto& check : architecture_gradient_checks(1e-5, 40, 5)) {
    CAPTURE(check.name);
    CHECK(check.max_rel_error < check.threshold);
  }
}

TEST_CASE("halving eps does not worsen the central difference (smooth case)") {
  // quadratic convergence away from kinks: a linear layer is kink-free
  Rng rng(21);
  Dense<double> dense(6, 4, /*relu=*/false);
  dense.init(rng);
  Tensor<double> x({3, 6});
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  Tensor<double> readout({3, 4});
  for (auto& v : readout.data) v = rng.uniform(-1.0, 1.0);

  auto loss = [&]() {
    Rng r(0);
    const auto out = dense.forward(x, Mode::Eval, r);
    double s = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * readout.data[i];
    return s;
  };

  Rng r(0);
  (void)dense.forward(x, Mode::Eval, r);
  dense.weights().zero_grad();
  dense.bias().zero_grad();
  (void)dense.backward(readout);

  double& theta = dense.weights().value(0, 0);
  const double analytic = dense.weights().grad(0, 0);
  const double saved = theta;
  auto fd = [&](double h) {
    theta = saved + h;
    const double up = loss();
    theta = saved - h;
    const double down = loss();
    theta = saved;
    return (up - down) / (2.0 * h);
  };
  const double err1 = std::fabs(fd(1e-4) - analytic);
  const double err2 = std::fabs(fd(5e-5) - analytic);
  CHECK(err2 <= err1 + 1e-12);
}

}  // TEST_SUITE
