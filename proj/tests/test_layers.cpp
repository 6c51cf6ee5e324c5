#include <doctest.h>

#include <cmath>

#include "autolabel/nn/checks.hpp"
#include "autolabel/nn/layers.hpp"
#include "autolabel/rng.hpp"

using namespace autolabel;
using namespace autolabel::nn;

TEST_SUITE("nn.layers") {

TEST_CASE("softmax of a zero row is uniform") {
  Tensor<double> z({2, 3});
  z(1, 0) = 5.0;
  z(1, 1) = 5.0;
  z(1, 2) = 5.0;
  softmax_rows(z);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(z(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(z(1, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("softmax rows sum to one with probabilities in (0,1)") {
  Rng rng(4);
  Tensor<double> z({16, 3});
  for (auto& v : z.data) v = rng.uniform(-8.0, 8.0);
  softmax_rows(z);
  for (std::size_t r = 0; r < 16; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(z(r, j) > 0.0);
      CHECK(z(r, j) < 1.0);
      sum += z(r, j);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("global max pool of a constant sequence returns the constant") {
  GlobalMaxPool<double> pool;
  Tensor<double> x({2, 5, 3});
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t t = 0; t < 5; ++t)
      for (std::size_t c = 0; c < 3; ++c) x(b, t, c) = 0.5 * static_cast<double>(c + b);
  Rng rng(0);
  const auto out = pool.forward(x, Mode::Eval, rng);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(out(b, c) == 0.5 * static_cast<double>(c + b));
}

TEST_CASE("global max pool routes gradient to the (first) argmax") {
  GlobalMaxPool<double> pool;
  Tensor<double> x({1, 4, 2});
  x(0, 2, 0) = 3.0;             // unique max for channel 0
  x(0, 1, 1) = 1.0;
  x(0, 3, 1) = 1.0;             // tie: the first occurrence wins
  Rng rng(0);
  (void)pool.forward(x, Mode::Eval, rng);

  Tensor<double> up({1, 2});
  up(0, 0) = 1.0;
  up(0, 1) = 2.0;
  const auto dx = pool.backward(up);
  CHECK(dx(0, 2, 0) == 1.0);
  CHECK(dx(0, 1, 1) == 2.0);
  CHECK(dx(0, 3, 1) == 0.0);
}

TEST_CASE("spatial dropout zeroes whole channels and rescales the rest") {
  SpatialDropout<double> drop(0.5);
  Tensor<double> x({3, 6, 8});
  for (auto& v : x.data) v = 1.0;
  Rng rng(9);
  const auto out = drop.forward(x, Mode::Train, rng);
  std::size_t dropped = 0, kept = 0;
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t d = 0; d < 8; ++d) {
      const double first = out(b, 0, d);
      for (std::size_t t = 1; t < 6; ++t) CHECK(out(b, t, d) == first);  // whole channel
      if (first == 0.0)
        ++dropped;
      else {
        CHECK(first == doctest::Approx(2.0));  // inverted scaling 1/(1-p)
        ++kept;
      }
    }
  }
  CHECK(dropped > 0);
  CHECK(kept > 0);
}

TEST_CASE("dropout layers are the identity in eval mode") {
  Rng rng(10);
  Tensor<double> x({4, 5, 6});
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);

  SpatialDropout<double> sdrop(0.7);
  const auto a = sdrop.forward(x, Mode::Eval, rng);
  CHECK(a.data == x.data);

  Dropout<double> drop(0.7);
  Tensor<double> y({4, 30});
  for (auto& v : y.data) v = rng.uniform(-1.0, 1.0);
  const auto b1 = drop.forward(y, Mode::Eval, rng);
  const auto b2 = drop.forward(y, Mode::Eval, rng);
  CHECK(b1.data == y.data);
  CHECK(b1.data == b2.data);  // eval is deterministic
}

TEST_CASE("backward before forward throws") {
  Dense<double> dense(3, 2, false);
  Tensor<double> up({1, 2});
  CHECK_THROWS_AS(dense.backward(up), NoCachedForward);

  BiLSTM<double> lstm(3, 2);
  CHECK_THROWS_AS(lstm.backward(up), NoCachedForward);

  Dropout<double> drop(0.1);
  CHECK_THROWS_AS(drop.backward(up), NoCachedForward);
}

TEST_CASE("dense with identity activation: input grad is upstream times W^T") {
  Rng rng(12);
  Dense<double> dense(4, 3, /*relu=*/false);
  dense.init(rng);
  Tensor<double> x({2, 4});
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  (void)dense.forward(x, Mode::Eval, rng);

  Tensor<double> up({2, 3});
  for (auto& v : up.data) v = rng.uniform(-1.0, 1.0);
  dense.weights().zero_grad();
  dense.bias().zero_grad();
  const auto dx = dense.backward(up);

  const auto& w = dense.weights().value;  // (4,3)
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t i = 0; i < 4; ++i) {
      double want = 0.0;
      for (std::size_t j = 0; j < 3; ++j) want += up(b, j) * w(i, j);
      CHECK(dx(b, i) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("relu blocks gradient at negative pre-activations") {
  Dense<double> dense(1, 1, /*relu=*/true);
  dense.weights().value(0, 0) = 1.0;
  dense.bias().value(0) = 0.0;

  Tensor<double> x({1, 1});
  x(0, 0) = -2.0;  // pre-activation -2 -> ReLU kills it
  Rng rng(0);
  const auto out = dense.forward(x, Mode::Eval, rng);
  CHECK(out(0, 0) == 0.0);

  Tensor<double> up({1, 1});
  up(0, 0) = 5.0;
  dense.weights().zero_grad();
  dense.bias().zero_grad();
  const auto dx = dense.backward(up);
  CHECK(dx(0, 0) == 0.0);
  CHECK(dense.weights().grad(0, 0) == 0.0);
}

TEST_CASE("one-step bilstm equals a hand-computed LSTM cell") {
  // H = 1, D = 2, both directions share the same tiny weights, one timestep:
  // forward and backward passes then compute the identical cell update.
  BiLSTM<double> lstm(2, 1);
  const double wx_i = 0.3, wx_f = -0.2, wx_g = 0.5, wx_o = 0.1;  // per input dim scale
  for (int dir = 0; dir < 2; ++dir) {
    auto& wx = lstm.wx(dir).value;  // (2, 4)
    wx(0, 0) = wx_i;
    wx(1, 0) = 2.0 * wx_i;
    wx(0, 1) = wx_f;
    wx(1, 1) = 2.0 * wx_f;
    wx(0, 2) = wx_g;
    wx(1, 2) = 2.0 * wx_g;
    wx(0, 3) = wx_o;
    wx(1, 3) = 2.0 * wx_o;
    auto& wh = lstm.wh(dir).value;  // (1, 4) — irrelevant at t=0 (h=0) but set anyway
    wh(0, 0) = 0.7;
    wh(0, 1) = -0.4;
    wh(0, 2) = 0.2;
    wh(0, 3) = 0.9;
    auto& b = lstm.bias(dir).value;
    b(0) = 0.05;
    b(1) = 1.0;  // forget bias
    b(2) = -0.1;
    b(3) = 0.2;
  }

  Tensor<double> x({1, 1, 2});
  x(0, 0, 0) = 0.4;
  x(0, 0, 1) = -0.3;
  Rng rng(0);
  const auto out = lstm.forward(x, Mode::Eval, rng);
  REQUIRE(out.shape == std::vector<std::size_t>{1, 2});

  // hand computation (h_prev = c_prev = 0)
  const double zx0 = 0.4, zx1 = -0.3;
  const auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double zi = zx0 * wx_i + zx1 * 2.0 * wx_i + 0.05;
  const double zf = zx0 * wx_f + zx1 * 2.0 * wx_f + 1.0;
  const double zg = zx0 * wx_g + zx1 * 2.0 * wx_g - 0.1;
  const double zo = zx0 * wx_o + zx1 * 2.0 * wx_o + 0.2;
  const double c = sig(zf) * 0.0 + sig(zi) * std::tanh(zg);
  const double h = sig(zo) * std::tanh(c);

  CHECK(out(0, 0) == doctest::Approx(h).epsilon(1e-12));
  CHECK(out(0, 1) == doctest::Approx(h).epsilon(1e-12));  // same weights, same single step
}

TEST_CASE("bilstm output width is twice the hidden size") {
  BiLSTM<double> lstm(3, 5);
  Rng rng(3);
  lstm.init(rng);
  Tensor<double> x({2, 4, 3});
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  const auto out = lstm.forward(x, Mode::Eval, rng);
  CHECK(out.shape == std::vector<std::size_t>{2, 10});
}

TEST_CASE("layer types pass finite-difference gradient checks") {
  for (const auto& check : layer_gradient_checks(1e-5, 60, 5)) {
    CAPTURE(check.name);
    CHECK(check.max_rel_error < check.threshold);
  }
}

TEST_CASE("shape violations throw") {
  Rng rng(0);
  Dense<double> dense(4, 2, false);
  Tensor<double> wrong({2, 3});
  CHECK_THROWS_AS(dense.forward(wrong, Mode::Eval, rng), ShapeMismatch);

  Conv1D<double> conv(4, 2, 5);
  Tensor<double> short_seq({1, 3, 4});  // shorter than the kernel
  CHECK_THROWS_AS(conv.forward(short_seq, Mode::Eval, rng), ShapeMismatch);
}

}  // TEST_SUITE
