#include "autolabel/nn/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <vector>

#include "autolabel/errors.hpp"
#include "kernels_detail.hpp"

namespace autolabel::nn::kernels {

namespace {

Backend pick_default() {
  if (const char* env = std::getenv("AUTOLABEL_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::Avx2;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

Backend& backend_slot() {
  static Backend b = pick_default();
  return b;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active_backend() { return backend_slot(); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !cpu_has_avx2())
    throw NumericError("AVX2 backend requested but the CPU lacks AVX2");
  backend_slot() = b;
}

const char* to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::matmul(a, b, c, m, k, n, false);
  else
    scalar_impl::matmul(a, b, c, m, k, n, false);
}

template <class T>
void matmul_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::matmul(a, b, c, m, k, n, true);
  else
    scalar_impl::matmul(a, b, c, m, k, n, true);
}

template <class T>
void matmul_at_b_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::matmul_at_b_acc(a, b, c, m, k, n);
  else
    scalar_impl::matmul_at_b_acc(a, b, c, m, k, n);
}

template <class T>
void matmul_a_bt_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k) {
  // c (m x k) += a (m x n) * b^T, b is (k x n). Transposing b once keeps the
  // per-element accumulation order identical to a plain matmul on both
  // backends.
  std::vector<T> bt(n * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + r] = b[r * n + j];
  matmul_acc(a, bt.data(), c, m, n, k);
}

template <class T>
void add_bias(T* x, const T* bias, std::size_t rows, std::size_t cols) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::add_bias(x, bias, rows, cols);
  else
    scalar_impl::add_bias(x, bias, rows, cols);
}

template <class T>
void relu(T* x, std::size_t n) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::relu(x, n);
  else
    scalar_impl::relu(x, n);
}

template <class T>
void relu_backward(const T* pre, T* grad, std::size_t n) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::relu_backward(pre, grad, n);
  else
    scalar_impl::relu_backward(pre, grad, n);
}

template <class T>
void axpy(const T* x, T s, T* y, std::size_t n) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::axpy(x, s, y, n);
  else
    scalar_impl::axpy(x, s, y, n);
}

template <class T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,
                 T eps, T bc1, T bc2) {
  if (active_backend() == Backend::Avx2)
    avx2_impl::adam_update(param, grad, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
  else
    scalar_impl::adam_update(param, grad, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

#define AUTOLABEL_INSTANTIATE(T)                                                               \
  template void matmul<T>(const T*, const T*, T*, std::size_t, std::size_t, std::size_t);     \
  template void matmul_acc<T>(const T*, const T*, T*, std::size_t, std::size_t, std::size_t); \
  template void matmul_at_b_acc<T>(const T*, const T*, T*, std::size_t, std::size_t,          \
                                   std::size_t);                                              \
  template void matmul_a_bt_acc<T>(const T*, const T*, T*, std::size_t, std::size_t,          \
                                   std::size_t);                                              \
  template void add_bias<T>(T*, const T*, std::size_t, std::size_t);                          \
  template void relu<T>(T*, std::size_t);                                                     \
  template void relu_backward<T>(const T*, T*, std::size_t);                                  \
  template void axpy<T>(const T*, T, T*, std::size_t);                                        \
  template void adam_update<T>(T*, const T*, T*, T*, std::size_t, T, T, T, T, T, T);

AUTOLABEL_INSTANTIATE(float)
AUTOLABEL_INSTANTIATE(double)
#undef AUTOLABEL_INSTANTIATE

}  // namespace autolabel::nn::kernels
