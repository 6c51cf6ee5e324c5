#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "autolabel/nn/kernels.hpp"
#include "autolabel/rng.hpp"

using namespace autolabel;
namespace kernels = autolabel::nn::kernels;

namespace {

template <class T>
std::vector<T> random_vec(std::size_t n, Rng& rng, double scale = 2.0) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(rng.uniform(-scale, scale));
  return v;
}

/// RAII backend switch so a failing CHECK cannot leak a forced backend.
struct BackendGuard {
  kernels::Backend saved;
  explicit BackendGuard(kernels::Backend b) : saved(kernels::active_backend()) {
    kernels::set_backend(b);
  }
  ~BackendGuard() { kernels::set_backend(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("matmul matches a dot-product oracle") {
  Rng rng(1);
  for (const auto [m, k, n] : {std::array<std::size_t, 3>{3, 4, 5},
                               std::array<std::size_t, 3>{1, 7, 1},
                               std::array<std::size_t, 3>{8, 16, 24},
                               std::array<std::size_t, 3>{5, 3, 9}}) {
    const auto a = random_vec<double>(m * k, rng);
    const auto b = random_vec<double>(k * n, rng);
    std::vector<double> c(m * n);
    kernels::matmul(a.data(), b.data(), c.data(), m, k, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double want = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) want += a[i * k + kk] * b[kk * n + j];
        CHECK(c[i * n + j] == doctest::Approx(want).epsilon(1e-12));
      }
  }
}

TEST_CASE("transposed matmul variants match direct computation") {
  Rng rng(2);
  const std::size_t m = 6, k = 5, n = 7;
  const auto a = random_vec<double>(m * k, rng);
  const auto b = random_vec<double>(m * n, rng);

  std::vector<double> c(k * n, 0.5);
  kernels::matmul_at_b_acc(a.data(), b.data(), c.data(), m, k, n);
  for (std::size_t kk = 0; kk < k; ++kk)
    for (std::size_t j = 0; j < n; ++j) {
      double want = 0.5;
      for (std::size_t i = 0; i < m; ++i) want += a[i * k + kk] * b[i * n + j];
      CHECK(c[kk * n + j] == doctest::Approx(want).epsilon(1e-12));
    }

  const auto w = random_vec<double>(k * n, rng);  // (k x n)
  const auto up = random_vec<double>(m * n, rng);
  std::vector<double> dx(m * k, 0.0);
  kernels::matmul_a_bt_acc(up.data(), w.data(), dx.data(), m, n, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t kk = 0; kk < k; ++kk) {
      double want = 0.0;
      for (std::size_t j = 0; j < n; ++j) want += up[i * n + j] * w[kk * n + j];
      CHECK(dx[i * k + kk] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("adam first step with constant unit gradient is -lr") {
  const double lr = 0.25;
  double p = 1.0, g = 1.0, m = 0.0, v = 0.0;
  const double bc1 = 1.0 - 0.9, bc2 = 1.0 - 0.999;
  kernels::adam_update(&p, &g, &m, &v, 1, lr, 0.9, 0.999, 1e-8, bc1, bc2);
  CHECK(p == doctest::Approx(1.0 - lr).epsilon(1e-6));
}

template <class T>
void check_backend_equivalence() {
  if (!kernels::cpu_has_avx2()) return;

  Rng rng(42);
  // sizes straddle the vector width, including tails
  for (const std::size_t n : {1u, 3u, 7u, 8u, 9u, 16u, 31u, 64u, 100u}) {
    const std::size_t m = 5, k = 7;
    const auto a = random_vec<T>(m * k, rng);
    const auto b = random_vec<T>(k * n, rng);

    std::vector<T> c_scalar(m * n), c_avx(m * n);
    {
      BackendGuard g(kernels::Backend::Scalar);
      kernels::matmul(a.data(), b.data(), c_scalar.data(), m, k, n);
    }
    {
      BackendGuard g(kernels::Backend::Avx2);
      kernels::matmul(a.data(), b.data(), c_avx.data(), m, k, n);
    }
    CHECK(std::memcmp(c_scalar.data(), c_avx.data(), c_scalar.size() * sizeof(T)) == 0);

    const auto up = random_vec<T>(m * n, rng);
    std::vector<T> w_scalar(k * n, T{0}), w_avx(k * n, T{0});
    {
      BackendGuard g(kernels::Backend::Scalar);
      kernels::matmul_at_b_acc(a.data(), up.data(), w_scalar.data(), m, k, n);
    }
    {
      BackendGuard g(kernels::Backend::Avx2);
      kernels::matmul_at_b_acc(a.data(), up.data(), w_avx.data(), m, k, n);
    }
    CHECK(std::memcmp(w_scalar.data(), w_avx.data(), w_scalar.size() * sizeof(T)) == 0);

    auto x_scalar = random_vec<T>(n * 4, rng);
    auto x_avx = x_scalar;
    const auto bias = random_vec<T>(n, rng);
    {
      BackendGuard g(kernels::Backend::Scalar);
      kernels::add_bias(x_scalar.data(), bias.data(), 4, n);
      kernels::relu(x_scalar.data(), x_scalar.size());
    }
    {
      BackendGuard g(kernels::Backend::Avx2);
      kernels::add_bias(x_avx.data(), bias.data(), 4, n);
      kernels::relu(x_avx.data(), x_avx.size());
    }
    CHECK(std::memcmp(x_scalar.data(), x_avx.data(), x_scalar.size() * sizeof(T)) == 0);

    auto p_scalar = random_vec<T>(n, rng);
    auto p_avx = p_scalar;
    const auto grad = random_vec<T>(n, rng);
    std::vector<T> m1(n, T{0}), v1(n, T{0}), m2(n, T{0}), v2(n, T{0});
    const T bc1 = T{1} - T{0.9}, bc2 = T{1} - T{0.999};
    {
      BackendGuard g(kernels::Backend::Scalar);
      kernels::adam_update(p_scalar.data(), grad.data(), m1.data(), v1.data(), n, T{0.001},
                           T{0.9}, T{0.999}, T{1e-8}, bc1, bc2);
    }
    {
      BackendGuard g(kernels::Backend::Avx2);
      kernels::adam_update(p_avx.data(), grad.data(), m2.data(), v2.data(), n, T{0.001}, T{0.9},
                           T{0.999}, T{1e-8}, bc1, bc2);
    }
    CHECK(std::memcmp(p_scalar.data(), p_avx.data(), n * sizeof(T)) == 0);
    CHECK(std::memcmp(m1.data(), m2.data(), n * sizeof(T)) == 0);
    CHECK(std::memcmp(v1.data(), v2.data(), n * sizeof(T)) == 0);

    auto g_scalar = random_vec<T>(n, rng);
    auto g_avx = g_scalar;
    const auto pre = random_vec<T>(n, rng);
    {
      BackendGuard g(kernels::Backend::Scalar);
      kernels::relu_backward(pre.data(), g_scalar.data(), n);
    }
    {
      BackendGuard g(kernels::Backend::Avx2);
      kernels::relu_backward(pre.data(), g_avx.data(), n);
    }
    CHECK(std::memcmp(g_scalar.data(), g_avx.data(), n * sizeof(T)) == 0);

    auto y_scalar = random_vec<T>(n, rng);
    auto y_avx = y_scalar;
    const auto xs = random_vec<T>(n, rng);
    {
      BackendGuard g(kernels::Backend::Scalar);
      kernels::axpy(xs.data(), T{1.5}, y_scalar.data(), n);
    }
    {
      BackendGuard g(kernels::Backend::Avx2);
      kernels::axpy(xs.data(), T{1.5}, y_avx.data(), n);
    }
    CHECK(std::memcmp(y_scalar.data(), y_avx.data(), n * sizeof(T)) == 0);
  }
}

TEST_CASE("scalar and AVX2 backends are bit-identical (float)") {
  check_backend_equivalence<float>();
}

TEST_CASE("scalar and AVX2 backends are bit-identical (double)") {
  check_backend_equivalence<double>();
}

}  // TEST_SUITE
