#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "autolabel/nn/kernels.hpp"
#include "autolabel/nn/tensor.hpp"

namespace autolabel::nn {

/// Adam with the standard constants. State is keyed by parameter identity, so
/// one optimizer instance must own a fixed parameter set for its lifetime.
template <class T>
class Adam {
 public:
  explicit Adam(T lr, T beta1 = T{0.9}, T beta2 = T{0.999}, T eps = T{1e-8})
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<ParamTensor<T>*>& params) {
    ++t_;
    const T bc1 = T{1} - static_cast<T>(std::pow(static_cast<double>(beta1_), t_));
    const T bc2 = T{1} - static_cast<T>(std::pow(static_cast<double>(beta2_), t_));
    for (ParamTensor<T>* p : params) {
      if (!p->has_grad) throw MissingGradients(p->name);
      auto& slot = state_[p];
      if (slot.m.data.empty()) {
        slot.m = Tensor<T>(p->value.shape);
        slot.v = Tensor<T>(p->value.shape);
      }
      kernels::adam_update(p->value.data.data(), p->grad.data.data(), slot.m.data.data(),
                           slot.v.data.data(), p->value.data.size(), lr_, beta1_, beta2_, eps_,
                           bc1, bc2);
    }
  }

  std::int64_t steps_taken() const { return t_; }
  T learning_rate() const { return lr_; }

 private:
  struct Slot {
    Tensor<T> m, v;
  };
  T lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::unordered_map<const ParamTensor<T>*, Slot> state_;
};

}  // namespace autolabel::nn
