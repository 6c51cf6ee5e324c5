#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autolabel/encode.hpp"
#include "autolabel/label.hpp"
#include "autolabel/nn/layers.hpp"
#include "autolabel/nn/optimizer.hpp"

namespace autolabel::models {

enum class Architecture { CNN, BiLSTM, CNN_BiLSTM };

const char* to_string(Architecture a);
Architecture parse_architecture(std::string_view name);  // throws ConfigViolation

/// Number of dropout sites: 2 for CNN, 4 for the recurrent architectures.
std::size_t dropout_sites(Architecture a);

/// Per-experiment hyperparameter defaults (experiment is 1, 2 or 3).
std::vector<double> default_dropout(Architecture a, int experiment);
double default_learning_rate(int experiment);

struct TrainConfig {
  double learning_rate = 0.0001;
  std::size_t batch_size = 100;
  std::size_t epochs = 10;
  std::vector<double> dropout;  // empty -> all-zero schedule of the right length
  std::uint64_t seed = 42;
  std::size_t max_len = 30;
};

struct EpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

/// Fixed stack: embedding -> spatial dropout -> {arch block} ->
/// dense(64, ReLU) -> dropout -> dense(3) -> softmax. Filter count, kernel
/// size and hidden width are the published constants (64 / 5 / 64).
template <class T>
class Model {
 public:
  static constexpr std::size_t kFilters = 64;
  static constexpr std::size_t kKernel = 5;
  static constexpr std::size_t kHidden = 64;
  static constexpr std::size_t kDenseUnits = 64;
  static constexpr std::size_t kClasses = 3;

  Model(Architecture arch, const encode::EmbeddingMatrix& emb, const TrainConfig& cfg);

  /// indices is row-major (batch, max_len).
  nn::Tensor<T> forward(const std::int32_t* indices, std::size_t batch, nn::Mode mode,
                        Rng& rng);

  /// Backprop from the fused softmax/cross-entropy logit gradient.
  void backward(const nn::Tensor<T>& dlogits);

  std::vector<nn::ParamTensor<T>*> params();
  void zero_grads();

  Architecture arch() const { return arch_; }
  const TrainConfig& config() const { return cfg_; }
  std::size_t embed_dim() const { return embedding_.dim(); }
  std::size_t vocab_rows() const { return embedding_.table().dim(0); }
  const nn::Embedding<T>& embedding() const { return embedding_; }
  nn::Embedding<T>& embedding() { return embedding_; }

  /// Test hook: freeze all dropout masks after the next draw.
  void freeze_dropout_masks(bool f);

 private:
  Architecture arch_;
  TrainConfig cfg_;
  nn::Embedding<T> embedding_;
  nn::SpatialDropout<T> spatial_dropout_;
  std::optional<nn::Conv1D<T>> conv_;
  std::optional<nn::GlobalMaxPool<T>> pool_;
  std::optional<nn::BiLSTM<T>> bilstm_;
  std::optional<nn::Dropout<T>> block_dropout_;
  nn::Dense<T> dense_hidden_;
  nn::Dropout<T> dense_dropout_;
  nn::Dense<T> dense_out_;
};

using ModelF = Model<float>;
using ModelD = Model<double>;

/// Throws BadDropoutScheduleLength on a schedule/architecture mismatch;
/// parameters are seeded from cfg.seed.
template <class T>
Model<T> build_model(Architecture arch, const encode::EmbeddingMatrix& emb,
                     const TrainConfig& cfg);

/// Seeded-shuffle mini-batch training with one Adam step per batch.
/// on_epoch_end (optional) runs after each epoch, e.g. to collect test
/// metrics.
TrainHistory train(ModelF& model, const std::vector<encode::EncodedInstance>& train_set,
                   const TrainConfig& cfg,
                   const std::function<void(std::size_t epoch)>& on_epoch_end = {});

struct PredictResult {
  std::vector<SentimentLabel> labels;
  std::vector<std::array<double, 3>> probs;
};

/// Eval-mode batched prediction; argmax ties resolve in column order
/// (Positive > Negative > Neutral).
PredictResult predict(ModelF& model, const std::vector<encode::EncodedInstance>& instances);

/// Versioned binary checkpoint (shapes + parameters + config echo); loading
/// restores bit-identical parameters.
void save_model(ModelF& model, const std::filesystem::path& path);
ModelF load_model(const std::filesystem::path& path);

}  // namespace autolabel::models
