#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autolabel/models.hpp"

namespace autolabel::nn {

struct NamedCheck {
  std::string name;
  double max_rel_error = 0.0;
  double threshold = 0.0;
  bool passed() const { return max_rel_error < threshold; }
};

/// Central-difference verification of every layer type in double precision
/// (dense / dense+ReLU / conv / pooling / dropouts with frozen masks / bilstm
/// / fused softmax cross-entropy). Thresholds: 1e-7 for the purely linear
/// cases, 1e-5 elsewhere.
std::vector<NamedCheck> layer_gradient_checks(double eps = 1e-5,
                                              std::size_t sample_per_param = 200,
                                              std::uint64_t seed = 7);

/// Full-architecture check on a batch of 4 at reduced tensor sizes (the layer
/// wiring and the published 64-filter/64-hidden widths are kept). Threshold
/// 1e-4; the dense-only stub is checked at 1e-7.
std::vector<NamedCheck> architecture_gradient_checks(double eps = 1e-5,
                                                     std::size_t sample_per_param = 200,
                                                     std::uint64_t seed = 7);

}  // namespace autolabel::nn
