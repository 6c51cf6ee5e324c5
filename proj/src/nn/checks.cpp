#include "autolabel/nn/checks.hpp"

#include <cmath>

#include "autolabel/nn/gradcheck.hpp"
#include "autolabel/nn/layers.hpp"
#include "autolabel/nn/loss.hpp"

namespace autolabel::nn {

namespace {

Tensor<double> random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(-scale, scale);
  return t;
}

/// Smooth scalar readout: sum of outputs weighted by fixed random
/// coefficients. Differentiable everywhere, so kinks can only come from the
/// layer under test.
struct Readout {
  Tensor<double> weights;

  explicit Readout(const Tensor<double>& like, Rng& rng) {
    weights = Tensor<double>(like.shape);
    for (auto& v : weights.data) v = rng.uniform(-1.0, 1.0);
  }

  double value(const Tensor<double>& out) const {
    double s = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * weights.data[i];
    return s;
  }
};

/// Runs one layer through the finite-difference checker, covering both its
/// parameters and its input gradient.
NamedCheck check_layer(const std::string& name, Layer<double>& layer, Tensor<double> input,
                       double eps, std::size_t sample, std::uint64_t seed, double threshold,
                       Mode mode = Mode::Eval) {
  Rng rng(Rng::derive(seed, name));

  // prime the layer (draws dropout masks which stay frozen afterwards)
  Tensor<double> out = layer.forward(input, mode, rng);
  Readout readout(out, rng);

  ParamTensor<double> input_param;
  input_param.name = name + ".input";
  input_param.value = input;
  input_param.grad = Tensor<double>(input.shape);

  auto all_params = layer.params();
  for (auto* p : all_params) p->zero_grad();

  out = layer.forward(input_param.value, mode, rng);
  input_param.grad = layer.backward(readout.weights);
  input_param.has_grad = true;

  std::vector<ParamTensor<double>*> to_check = all_params;
  to_check.push_back(&input_param);

  const auto loss = [&]() {
    return readout.value(layer.forward(input_param.value, mode, rng));
  };

  const auto result =
      finite_difference_check(to_check, loss, eps, sample, Rng::derive(seed, name + ".fd"));
  return NamedCheck{name, result.max_rel_error, threshold};
}

}  // namespace

std::vector<NamedCheck> layer_gradient_checks(double eps, std::size_t sample,
                                              std::uint64_t seed) {
  std::vector<NamedCheck> checks;
  Rng rng(Rng::derive(seed, "layer-inputs"));
  constexpr std::size_t B = 4;

  {
    Dense<double> dense(10, 7, /*relu=*/false);
    dense.init(rng);
    checks.push_back(check_layer("dense_linear", dense, random_tensor({B, 10}, rng), eps,
                                 sample, seed, 1e-7));
  }
  {
    Dense<double> dense(10, 7, /*relu=*/true);
    dense.init(rng);
    checks.push_back(check_layer("dense_relu", dense, random_tensor({B, 10}, rng), eps, sample,
                                 seed, 1e-5));
  }
  {
    Conv1D<double> conv(6, 8, 5);
    conv.init(rng);
    checks.push_back(check_layer("conv1d_relu", conv, random_tensor({B, 12, 6}, rng), eps,
                                 sample, seed, 1e-5));
  }
  {
    GlobalMaxPool<double> pool;
    checks.push_back(check_layer("global_max_pool", pool, random_tensor({B, 9, 5}, rng), eps,
                                 sample, seed, 1e-5));
  }
  {
    SpatialDropout<double> drop(0.4);
    drop.freeze_mask(true);
    checks.push_back(check_layer("spatial_dropout", drop, random_tensor({B, 9, 5}, rng), eps,
                                 sample, seed, 1e-7, Mode::Train));
  }
  {
    Dropout<double> drop(0.3);
    drop.freeze_mask(true);
    checks.push_back(check_layer("dropout", drop, random_tensor({B, 11}, rng), eps, sample,
                                 seed, 1e-7, Mode::Train));
  }
  {
    BiLSTM<double> lstm(6, 5);
    lstm.init(rng);
    checks.push_back(check_layer("bilstm", lstm, random_tensor({B, 7, 6}, rng), eps, sample,
                                 seed, 1e-5));
  }
  {
    BiLSTM<double> lstm(6, 5, /*input_dropout=*/0.25);
    lstm.init(rng);
    lstm.freeze_mask(true);
    checks.push_back(check_layer("bilstm_input_dropout", lstm, random_tensor({B, 7, 6}, rng),
                                 eps, sample, seed, 1e-5, Mode::Train));
  }
  {
    // fused softmax + cross-entropy: gradient wrt logits is (p - t) / batch
    Rng local(Rng::derive(seed, "softmax-ce"));
    ParamTensor<double> logits;
    logits.name = "softmax_ce.logits";
    logits.value = random_tensor({B, 3}, local, 2.0);
    logits.grad = Tensor<double>({B, 3});

    Tensor<double> targets({B, 3});
    for (std::size_t b = 0; b < B; ++b) targets(b, local.below(3)) = 1.0;

    const auto loss = [&]() {
      Tensor<double> probs = logits.value;
      softmax_rows(probs);
      return static_cast<double>(cross_entropy(probs, targets));
    };
    Tensor<double> probs = logits.value;
    softmax_rows(probs);
    logits.grad = loss_and_grad(probs, targets).second;
    logits.has_grad = true;

    const auto result = finite_difference_check({&logits}, loss, eps, sample,
                                                Rng::derive(seed, "softmax-ce.fd"));
    checks.push_back(NamedCheck{"softmax_cross_entropy", result.max_rel_error, 1e-7});
  }
  return checks;
}

namespace {

NamedCheck check_architecture(models::Architecture arch, double eps, std::size_t sample,
                              std::uint64_t seed, double threshold) {
  constexpr std::size_t B = 4;
  constexpr std::size_t kMaxLen = 12;
  constexpr std::size_t kDim = 16;
  constexpr std::size_t kVocabRows = 40;

  Rng rng(Rng::derive(seed, std::string("arch-") + models::to_string(arch)));

  encode::EmbeddingMatrix emb;
  emb.rows = kVocabRows;
  emb.dim = kDim;
  emb.data.assign(emb.rows * emb.dim, 0.0f);
  for (std::size_t i = kDim; i < emb.data.size(); ++i)  // row 0 stays zero
    emb.data[i] = static_cast<float>(rng.uniform(-0.5, 0.5));

  models::TrainConfig cfg;
  cfg.max_len = kMaxLen;
  cfg.seed = seed;
  cfg.dropout.clear();  // all-zero schedule: checks need a deterministic path

  auto model = models::build_model<double>(arch, emb, cfg);

  std::vector<std::int32_t> indices(B * kMaxLen);
  for (auto& idx : indices) idx = static_cast<std::int32_t>(rng.below(kVocabRows));
  Tensor<double> targets({B, 3});
  for (std::size_t b = 0; b < B; ++b) targets(b, rng.below(3)) = 1.0;

  Rng fwd_rng(0);  // no dropout sites active, never draws
  model.zero_grads();
  auto probs = model.forward(indices.data(), B, Mode::Train, fwd_rng);
  auto [l0, dlogits] = loss_and_grad(probs, targets);
  (void)l0;
  model.backward(dlogits);

  const auto loss = [&]() {
    Rng r(0);
    auto p = model.forward(indices.data(), B, Mode::Train, r);
    return static_cast<double>(cross_entropy(p, targets));
  };

  const auto result = finite_difference_check(model.params(), loss, eps, sample,
                                              Rng::derive(seed, "arch.fd"));
  return NamedCheck{models::to_string(arch), result.max_rel_error, threshold};
}

}  // namespace

std::vector<NamedCheck> architecture_gradient_checks(double eps, std::size_t sample,
                                                     std::uint64_t seed) {
  std::vector<NamedCheck> checks;
  checks.push_back(check_architecture(models::Architecture::CNN, eps, sample, seed, 1e-4));
  checks.push_back(check_architecture(models::Architecture::BiLSTM, eps, sample, seed, 1e-4));
  checks.push_back(
      check_architecture(models::Architecture::CNN_BiLSTM, eps, sample, seed, 1e-4));
  return checks;
}

}  // namespace autolabel::nn
