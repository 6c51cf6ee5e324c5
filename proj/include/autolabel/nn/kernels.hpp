#pragma once

#include <cstddef>
#include <string>

namespace autolabel::nn::kernels {

// Scalar reference kernels plus an AVX2 variant chosen at runtime. Both paths
// perform the identical sequence of rounded operations per output element
// (the AVX2 code vectorizes across independent outputs and never uses FMA),
// so results are bit-identical regardless of the selected backend; the unit
// tests assert exact equality. Everything transcendental stays scalar.

enum class Backend { Scalar, Avx2 };

/// Backend picked at startup: AVX2 when the CPU supports it, unless the
/// AUTOLABEL_KERNELS environment variable ("scalar"/"avx2") overrides it.
Backend active_backend();

/// Force a backend (tests). Throws NumericError if AVX2 is requested on a CPU
/// without it.
void set_backend(Backend b);

bool cpu_has_avx2();

const char* to_string(Backend b);

// C (M x N) = A (M x K) * B (K x N); accumulate variant adds into C.
template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);
template <class T>
void matmul_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);

// C (K x N) += A^T (M x K) * B (M x N) — weight gradients.
template <class T>
void matmul_at_b_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);

// C (M x K) += A (M x N) * B^T (K x N) — input gradients.
template <class T>
void matmul_a_bt_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k);

/// Adds bias[j] to every row of X (rows x cols).
template <class T>
void add_bias(T* x, const T* bias, std::size_t rows, std::size_t cols);

/// In-place max(x, 0).
template <class T>
void relu(T* x, std::size_t n);

/// grad[i] = pre[i] > 0 ? grad[i] : 0.
template <class T>
void relu_backward(const T* pre, T* grad, std::size_t n);

/// y[i] += x[i] * s.
template <class T>
void axpy(const T* x, T s, T* y, std::size_t n);

/// One Adam update over a parameter block. bc1/bc2 are the bias corrections
/// 1 - beta^t for the current step.
template <class T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,
                 T eps, T bc1, T bc2);

}  // namespace autolabel::nn::kernels
