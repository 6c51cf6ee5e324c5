#include <cmath>

#include "kernels_detail.hpp"

#ifdef AUTOLABEL_NO_AVX2

// Non-x86 build: the dispatcher never selects this backend, but the symbols
// must exist.
namespace autolabel::nn::kernels::avx2_impl {

template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
            bool accumulate) {
  scalar_impl::matmul(a, b, c, m, k, n, accumulate);
}
template <class T>
void matmul_at_b_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  scalar_impl::matmul_at_b_acc(a, b, c, m, k, n);
}
template <class T>
void add_bias(T* x, const T* bias, std::size_t rows, std::size_t cols) {
  scalar_impl::add_bias(x, bias, rows, cols);
}
template <class T>
void relu(T* x, std::size_t n) {
  scalar_impl::relu(x, n);
}
template <class T>
void relu_backward(const T* pre, T* grad, std::size_t n) {
  scalar_impl::relu_backward(pre, grad, n);
}
template <class T>
void axpy(const T* x, T s, T* y, std::size_t n) {
  scalar_impl::axpy(x, s, y, n);
}
template <class T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,
                 T eps, T bc1, T bc2) {
  scalar_impl::adam_update(param, grad, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

#define AUTOLABEL_INSTANTIATE(T)                                                              \
  template void matmul<T>(const T*, const T*, T*, std::size_t, std::size_t, std::size_t,     \
                          bool);                                                              \
  template void matmul_at_b_acc<T>(const T*, const T*, T*, std::size_t, std::size_t,         \
                                   std::size_t);                                             \
  template void add_bias<T>(T*, const T*, std::size_t, std::size_t);                         \
  template void relu<T>(T*, std::size_t);                                                    \
  template void relu_backward<T>(const T*, T*, std::size_t);                                 \
  template void axpy<T>(const T*, T, T*, std::size_t);                                       \
  template void adam_update<T>(T*, const T*, T*, T*, std::size_t, T, T, T, T, T, T);
AUTOLABEL_INSTANTIATE(float)
AUTOLABEL_INSTANTIATE(double)
#undef AUTOLABEL_INSTANTIATE

}  // namespace autolabel::nn::kernels::avx2_impl

#else  // AVX2 build

#include <immintrin.h>

// AVX2 variants. Vector lanes always map to independent output elements and
// every multiply/add stays a separate rounded operation (no FMA), so each
// element sees exactly the scalar kernel's operation sequence and results are
// bit-identical to the reference. Tails fall through to scalar code with the
// same per-element order.

namespace autolabel::nn::kernels::avx2_impl {

namespace {

inline __m256 load8(const float* p) { return _mm256_loadu_ps(p); }
inline __m256d load4(const double* p) { return _mm256_loadu_pd(p); }

}  // namespace

// ---- matmul ---------------------------------------------------------------

template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
            bool accumulate);

template <>
void matmul<float>(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                   std::size_t n, bool accumulate) {
  const std::size_t n8 = n - n % 8;
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * n;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0f;
    const float* arow = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const __m256 av = _mm256_set1_ps(arow[kk]);
      const float* brow = b + kk * n;
      const float avs = arow[kk];
      for (std::size_t j = 0; j < n8; j += 8) {
        const __m256 prod = _mm256_mul_ps(av, load8(brow + j));
        _mm256_storeu_ps(crow + j, _mm256_add_ps(load8(crow + j), prod));
      }
      for (std::size_t j = n8; j < n; ++j) crow[j] += avs * brow[j];
    }
  }
}

template <>
void matmul<double>(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n, bool accumulate) {
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    const double* arow = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const __m256d av = _mm256_set1_pd(arow[kk]);
      const double* brow = b + kk * n;
      const double avs = arow[kk];
      for (std::size_t j = 0; j < n4; j += 4) {
        const __m256d prod = _mm256_mul_pd(av, load4(brow + j));
        _mm256_storeu_pd(crow + j, _mm256_add_pd(load4(crow + j), prod));
      }
      for (std::size_t j = n4; j < n; ++j) crow[j] += avs * brow[j];
    }
  }
}

// ---- matmul_at_b_acc --------------------------------------------------------

template <>
void matmul_at_b_acc<float>(const float* a, const float* b, float* c, std::size_t m,
                            std::size_t k, std::size_t n) {
  const std::size_t n8 = n - n % 8;
  for (std::size_t kk = 0; kk < k; ++kk) {
    float* crow = c + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      const float avs = a[i * k + kk];
      const __m256 av = _mm256_set1_ps(avs);
      const float* brow = b + i * n;
      for (std::size_t j = 0; j < n8; j += 8) {
        const __m256 prod = _mm256_mul_ps(av, load8(brow + j));
        _mm256_storeu_ps(crow + j, _mm256_add_ps(load8(crow + j), prod));
      }
      for (std::size_t j = n8; j < n; ++j) crow[j] += avs * brow[j];
    }
  }
}

template <>
void matmul_at_b_acc<double>(const double* a, const double* b, double* c, std::size_t m,
                             std::size_t k, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  for (std::size_t kk = 0; kk < k; ++kk) {
    double* crow = c + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double avs = a[i * k + kk];
      const __m256d av = _mm256_set1_pd(avs);
      const double* brow = b + i * n;
      for (std::size_t j = 0; j < n4; j += 4) {
        const __m256d prod = _mm256_mul_pd(av, load4(brow + j));
        _mm256_storeu_pd(crow + j, _mm256_add_pd(load4(crow + j), prod));
      }
      for (std::size_t j = n4; j < n; ++j) crow[j] += avs * brow[j];
    }
  }
}

// ---- elementwise ------------------------------------------------------------

template <>
void add_bias<float>(float* x, const float* bias, std::size_t rows, std::size_t cols) {
  const std::size_t c8 = cols - cols % 8;
  for (std::size_t i = 0; i < rows; ++i) {
    float* row = x + i * cols;
    for (std::size_t j = 0; j < c8; j += 8)
      _mm256_storeu_ps(row + j, _mm256_add_ps(load8(row + j), load8(bias + j)));
    for (std::size_t j = c8; j < cols; ++j) row[j] += bias[j];
  }
}

template <>
void add_bias<double>(double* x, const double* bias, std::size_t rows, std::size_t cols) {
  const std::size_t c4 = cols - cols % 4;
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = x + i * cols;
    for (std::size_t j = 0; j < c4; j += 4)
      _mm256_storeu_pd(row + j, _mm256_add_pd(load4(row + j), load4(bias + j)));
    for (std::size_t j = c4; j < cols; ++j) row[j] += bias[j];
  }
}

template <>
void relu<float>(float* x, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  const std::size_t n8 = n - n % 8;
  for (std::size_t i = 0; i < n8; i += 8)
    _mm256_storeu_ps(x + i, _mm256_max_ps(load8(x + i), zero));
  for (std::size_t i = n8; i < n; ++i) x[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

template <>
void relu<double>(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4)
    _mm256_storeu_pd(x + i, _mm256_max_pd(load4(x + i), zero));
  for (std::size_t i = n4; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

template <>
void relu_backward<float>(const float* pre, float* grad, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  const std::size_t n8 = n - n % 8;
  for (std::size_t i = 0; i < n8; i += 8) {
    const __m256 keep = _mm256_cmp_ps(load8(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_ps(grad + i, _mm256_and_ps(load8(grad + i), keep));
  }
  for (std::size_t i = n8; i < n; ++i)
    if (!(pre[i] > 0.0f)) grad[i] = 0.0f;
}

template <>
void relu_backward<double>(const double* pre, double* grad, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d keep = _mm256_cmp_pd(load4(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_and_pd(load4(grad + i), keep));
  }
  for (std::size_t i = n4; i < n; ++i)
    if (!(pre[i] > 0.0)) grad[i] = 0.0;
}

template <>
void axpy<float>(const float* x, float s, float* y, std::size_t n) {
  const __m256 sv = _mm256_set1_ps(s);
  const std::size_t n8 = n - n % 8;
  for (std::size_t i = 0; i < n8; i += 8) {
    const __m256 prod = _mm256_mul_ps(load8(x + i), sv);
    _mm256_storeu_ps(y + i, _mm256_add_ps(load8(y + i), prod));
  }
  for (std::size_t i = n8; i < n; ++i) y[i] += x[i] * s;
}

template <>
void axpy<double>(const double* x, double s, double* y, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d prod = _mm256_mul_pd(load4(x + i), sv);
    _mm256_storeu_pd(y + i, _mm256_add_pd(load4(y + i), prod));
  }
  for (std::size_t i = n4; i < n; ++i) y[i] += x[i] * s;
}

template <>
void adam_update<float>(float* param, const float* grad, float* m, float* v, std::size_t n,
                        float lr, float beta1, float beta2, float eps, float bc1, float bc2) {
  const float omb1 = 1.0f - beta1;
  const float omb2 = 1.0f - beta2;
  const __m256 vb1 = _mm256_set1_ps(beta1), vb2 = _mm256_set1_ps(beta2);
  const __m256 vomb1 = _mm256_set1_ps(omb1), vomb2 = _mm256_set1_ps(omb2);
  const __m256 vlr = _mm256_set1_ps(lr), veps = _mm256_set1_ps(eps);
  const __m256 vbc1 = _mm256_set1_ps(bc1), vbc2 = _mm256_set1_ps(bc2);
  const std::size_t n8 = n - n % 8;
  for (std::size_t i = 0; i < n8; i += 8) {
    const __m256 g = load8(grad + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(vb1, load8(m + i)), _mm256_mul_ps(vomb1, g));
    const __m256 vi = _mm256_add_ps(_mm256_mul_ps(vb2, load8(v + i)),
                                    _mm256_mul_ps(vomb2, _mm256_mul_ps(g, g)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 mhat = _mm256_div_ps(mi, vbc1);
    const __m256 vhat = _mm256_div_ps(vi, vbc2);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), veps);
    const __m256 step = _mm256_mul_ps(vlr, _mm256_div_ps(mhat, denom));
    _mm256_storeu_ps(param + i, _mm256_sub_ps(load8(param + i), step));
  }
  if (n8 < n)
    scalar_impl::adam_update(param + n8, grad + n8, m + n8, v + n8, n - n8, lr, beta1, beta2,
                             eps, bc1, bc2);
}

template <>
void adam_update<double>(double* param, const double* grad, double* m, double* v, std::size_t n,
                         double lr, double beta1, double beta2, double eps, double bc1,
                         double bc2) {
  const double omb1 = 1.0 - beta1;
  const double omb2 = 1.0 - beta2;
  const __m256d vb1 = _mm256_set1_pd(beta1), vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(omb1), vomb2 = _mm256_set1_pd(omb2);
  const __m256d vlr = _mm256_set1_pd(lr), veps = _mm256_set1_pd(eps);
  const __m256d vbc1 = _mm256_set1_pd(bc1), vbc2 = _mm256_set1_pd(bc2);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d g = load4(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, load4(m + i)), _mm256_mul_pd(vomb1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(vb2, load4(v + i)),
                                     _mm256_mul_pd(vomb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_div_pd(mi, vbc1);
    const __m256d vhat = _mm256_div_pd(vi, vbc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(mhat, denom));
    _mm256_storeu_pd(param + i, _mm256_sub_pd(load4(param + i), step));
  }
  if (n4 < n)
    scalar_impl::adam_update(param + n4, grad + n4, m + n4, v + n4, n - n4, lr, beta1, beta2,
                             eps, bc1, bc2);
}

}  // namespace autolabel::nn::kernels::avx2_impl

#endif  // AUTOLABEL_NO_AVX2
