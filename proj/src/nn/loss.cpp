#include "autolabel/nn/loss.hpp"

#include <cmath>

namespace autolabel::nn {

namespace {
constexpr double kLogEps = 1e-12;
}

template <class T>
T cross_entropy(const Tensor<T>& probs, const Tensor<T>& targets) {
  if (!probs.same_shape(targets)) throw ShapeMismatch("cross entropy probs vs targets");
  const std::size_t batch = probs.dim(0), classes = probs.dim(1);
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < classes; ++c) {
      const double t = static_cast<double>(targets(b, c));
      if (t != 0.0) total -= t * std::log(static_cast<double>(probs(b, c)) + kLogEps);
    }
  return static_cast<T>(total / static_cast<double>(batch));
}

template <class T>
std::pair<T, Tensor<T>> loss_and_grad(const Tensor<T>& probs, const Tensor<T>& targets) {
  const T loss = cross_entropy(probs, targets);
  const std::size_t batch = probs.dim(0);
  Tensor<T> grad(probs.shape);
  const T inv_batch = T{1} / static_cast<T>(batch);
  for (std::size_t i = 0; i < grad.data.size(); ++i)
    grad.data[i] = (probs.data[i] - targets.data[i]) * inv_batch;
  return {loss, std::move(grad)};
}

template float cross_entropy<float>(const Tensor<float>&, const Tensor<float>&);
template double cross_entropy<double>(const Tensor<double>&, const Tensor<double>&);
template std::pair<float, Tensor<float>> loss_and_grad<float>(const Tensor<float>&,
                                                              const Tensor<float>&);
template std::pair<double, Tensor<double>> loss_and_grad<double>(const Tensor<double>&,
                                                                 const Tensor<double>&);

}  // namespace autolabel::nn
