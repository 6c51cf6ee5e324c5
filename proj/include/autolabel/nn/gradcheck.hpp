#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "autolabel/nn/tensor.hpp"
#include "autolabel/rng.hpp"

namespace autolabel::nn {

struct GradCheckResult {
  struct PerParam {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t checked = 0;
  };
  std::vector<PerParam> per_param;
  double max_rel_error = 0.0;
};

/// Central finite differences against already-populated analytic gradients.
/// `loss` must re-evaluate the loss under the current parameter values and be
/// deterministic (double precision, dropout disabled). Samples at most
/// `sample_per_param` coordinates per parameter tensor. A coordinate whose
/// relative error exceeds `retry_above` is re-measured with eps/10 and
/// eps/100; differences at a ReLU/max kink collapse under a smaller step
/// while a genuine gradient bug does not.
inline GradCheckResult finite_difference_check(const std::vector<ParamTensor<double>*>& params,
                                               const std::function<double()>& loss, double eps,
                                               std::size_t sample_per_param = 200,
                                               std::uint64_t seed = 1234,
                                               double retry_above = 1e-7) {
  GradCheckResult result;
  Rng rng(Rng::derive(seed, "gradcheck"));

  for (ParamTensor<double>* p : params) {
    GradCheckResult::PerParam pr;
    pr.name = p->name;

    const std::size_t n = p->value.data.size();
    std::vector<std::size_t> coords;
    if (n <= sample_per_param) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (std::size_t i = 0; i < sample_per_param; ++i)
        coords.push_back(static_cast<std::size_t>(rng.below(n)));
    }

    for (const std::size_t c : coords) {
      const double analytic = p->grad.data[c];
      const double saved = p->value.data[c];

      auto fd_at = [&](double h) {
        p->value.data[c] = saved + h;
        const double up = loss();
        p->value.data[c] = saved - h;
        const double down = loss();
        p->value.data[c] = saved;
        return (up - down) / (2.0 * h);
      };

      double best = 1e300;
      for (const double h : {eps, eps / 10.0, eps / 100.0}) {
        const double fd = fd_at(h);
        const double rel = std::fabs(analytic - fd) /
                           std::max({1.0, std::fabs(analytic), std::fabs(fd)});
        best = std::min(best, rel);
        if (best <= retry_above) break;
      }
      pr.max_rel_error = std::max(pr.max_rel_error, best);
      ++pr.checked;
    }
    result.max_rel_error = std::max(result.max_rel_error, pr.max_rel_error);
    result.per_param.push_back(std::move(pr));
  }
  return result;
}

}  // namespace autolabel::nn
