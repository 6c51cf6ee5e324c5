#include <cmath>

#include "kernels_detail.hpp"

// Reference kernels. Inner loops run j fastest with k ascending per output
// element; the AVX2 variants replay the same per-element operation order, so
// keep these loops as they are.

namespace autolabel::nn::kernels::scalar_impl {

template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
            bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) crow[j] = T{0};
    const T* arow = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T av = arow[kk];
      const T* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class T>
void matmul_at_b_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  // c (k x n) += a^T (m x k) * b (m x n)
  for (std::size_t kk = 0; kk < k; ++kk) {
    T* crow = c + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      const T av = a[i * k + kk];
      const T* brow = b + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class T>
void add_bias(T* x, const T* bias, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    T* row = x + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += bias[j];
  }
}

template <class T>
void relu(T* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > T{0} ? x[i] : T{0};
}

template <class T>
void relu_backward(const T* pre, T* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(pre[i] > T{0})) grad[i] = T{0};
}

template <class T>
void axpy(const T* x, T s, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i] * s;
}

template <class T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,
                 T eps, T bc1, T bc2) {
  const T one_minus_b1 = T{1} - beta1;
  const T one_minus_b2 = T{1} - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const T g = grad[i];
    m[i] = beta1 * m[i] + one_minus_b1 * g;
    v[i] = beta2 * v[i] + one_minus_b2 * (g * g);
    const T mhat = m[i] / bc1;
    const T vhat = v[i] / bc2;
    param[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
  }
}

template void matmul<float>(const float*, const float*, float*, std::size_t, std::size_t,
                            std::size_t, bool);
template void matmul<double>(const double*, const double*, double*, std::size_t, std::size_t,
                             std::size_t, bool);
template void matmul_at_b_acc<float>(const float*, const float*, float*, std::size_t,
                                     std::size_t, std::size_t);
template void matmul_at_b_acc<double>(const double*, const double*, double*, std::size_t,
                                      std::size_t, std::size_t);
template void add_bias<float>(float*, const float*, std::size_t, std::size_t);
template void add_bias<double>(double*, const double*, std::size_t, std::size_t);
template void relu<float>(float*, std::size_t);
template void relu<double>(double*, std::size_t);
template void relu_backward<float>(const float*, float*, std::size_t);
template void relu_backward<double>(const double*, double*, std::size_t);
template void axpy<float>(const float*, float, float*, std::size_t);
template void axpy<double>(const double*, double, double*, std::size_t);
template void adam_update<float>(float*, const float*, float*, float*, std::size_t, float, float,
                                 float, float, float, float);
template void adam_update<double>(double*, const double*, double*, double*, std::size_t, double,
                                  double, double, double, double, double);

}  // namespace autolabel::nn::kernels::scalar_impl
