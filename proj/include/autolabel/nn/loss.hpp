#pragma once

#include <utility>

#include "autolabel/nn/tensor.hpp"

namespace autolabel::nn {

/// Mean categorical cross-entropy over the batch. `probs` are post-softmax
/// rows; the returned gradient is with respect to the pre-softmax logits
/// (softmax fusion), i.e. (p - t) / batch.
template <class T>
std::pair<T, Tensor<T>> loss_and_grad(const Tensor<T>& probs, const Tensor<T>& targets);

/// Loss only (used by the finite-difference checker).
template <class T>
T cross_entropy(const Tensor<T>& probs, const Tensor<T>& targets);

}  // namespace autolabel::nn
