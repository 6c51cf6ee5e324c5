#pragma once

#include <cstddef>

// Internal: per-backend kernel entry points. The public dispatch lives in
// kernels.cpp.

namespace autolabel::nn::kernels::scalar_impl {

template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
            bool accumulate);
template <class T>
void matmul_at_b_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);
template <class T>
void add_bias(T* x, const T* bias, std::size_t rows, std::size_t cols);
template <class T>
void relu(T* x, std::size_t n);
template <class T>
void relu_backward(const T* pre, T* grad, std::size_t n);
template <class T>
void axpy(const T* x, T s, T* y, std::size_t n);
template <class T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,
                 T eps, T bc1, T bc2);

}  // namespace autolabel::nn::kernels::scalar_impl

namespace autolabel::nn::kernels::avx2_impl {

template <class T>
void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
            bool accumulate);
template <class T>
void matmul_at_b_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);
template <class T>
void add_bias(T* x, const T* bias, std::size_t rows, std::size_t cols);
template <class T>
void relu(T* x, std::size_t n);
template <class T>
void relu_backward(const T* pre, T* grad, std::size_t n);
template <class T>
void axpy(const T* x, T s, T* y, std::size_t n);
template <class T>
void adam_update(T* param, const T* grad, T* m, T* v, std::size_t n, T lr, T beta1, T beta2,
                 T eps, T bc1, T bc2);

}  // namespace autolabel::nn::kernels::avx2_impl
