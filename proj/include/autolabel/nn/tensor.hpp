#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "autolabel/errors.hpp"

namespace autolabel::nn {

/// Dense row-major tensor. double for gradient checks, float for training.
template <class T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;

  explicit Tensor(std::initializer_list<std::size_t> dims) : shape(dims) {
    data.assign(numel(), T{0});
  }

  explicit Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
    data.assign(numel(), T{0});
  }

  std::size_t numel() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  std::size_t dim(std::size_t i) const { return shape.at(i); }

  T& operator()(std::size_t i) { return data[i]; }
  const T& operator()(std::size_t i) const { return data[i]; }

  T& operator()(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }

  void zero() { std::fill(data.begin(), data.end(), T{0}); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

/// A named parameter with its gradient accumulator.
template <class T>
struct ParamTensor {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  bool has_grad = false;

  void init_shape(std::vector<std::size_t> dims) {
    value = Tensor<T>(dims);
    grad = Tensor<T>(std::move(dims));
  }

  void zero_grad() {
    grad.zero();
    has_grad = false;
  }
};

}  // namespace autolabel::nn
