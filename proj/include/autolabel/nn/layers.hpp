#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "autolabel/nn/tensor.hpp"
#include "autolabel/rng.hpp"

namespace autolabel::nn {

enum class Mode { Train, Eval };

/// Numerically stable row softmax, in place.
template <class T>
void softmax_rows(Tensor<T>& z);

template <class T>
inline T sigmoid(T x) {
  return T{1} / (T{1} + std::exp(-x));
}

/// Common layer surface. forward caches whatever backward needs; backward
/// accumulates parameter gradients and returns the input gradient.
template <class T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) = 0;
  virtual Tensor<T> backward(const Tensor<T>& upstream) = 0;
  virtual std::vector<ParamTensor<T>*> params() { return {}; }
  virtual void init(Rng& rng) {}
  virtual const char* name() const = 0;

 protected:
  bool has_forward_ = false;
};

/// Frozen lookup table: (batch, len) indices -> (batch, len, dim). Row 0 is
/// the all-zero padding row; no gradients flow into the table.
template <class T>
class Embedding {
 public:
  Embedding(std::size_t vocab, std::size_t dim) : table_({vocab, dim}) {}

  Tensor<T>& table() { return table_; }
  const Tensor<T>& table() const { return table_; }
  std::size_t dim() const { return table_.dim(1); }

  Tensor<T> forward(const std::int32_t* indices, std::size_t batch, std::size_t len) const;

 private:
  Tensor<T> table_;
};

/// Zeroes whole embedding channels for a sample (same mask across timesteps),
/// inverted scaling so eval is the identity.
template <class T>
class SpatialDropout final : public Layer<T> {
 public:
  explicit SpatialDropout(double rate) : rate_(rate) {}

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  const char* name() const override { return "spatial_dropout"; }

  void freeze_mask(bool f) { frozen_ = f; }

 private:
  double rate_;
  bool frozen_ = false;
  bool active_ = false;  // dropped anything in the last forward
  Tensor<T> mask_;       // (batch, dim)
};

/// Element-wise inverted dropout on (batch, features).
template <class T>
class Dropout final : public Layer<T> {
 public:
  explicit Dropout(double rate) : rate_(rate) {}

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  const char* name() const override { return "dropout"; }

  void freeze_mask(bool f) { frozen_ = f; }

 private:
  double rate_;
  bool frozen_ = false;
  bool active_ = false;
  Tensor<T> mask_;
};

/// Valid 1-D convolution over time with fused ReLU:
/// (batch, len, in) -> (batch, len - kernel + 1, filters).
template <class T>
class Conv1D final : public Layer<T> {
 public:
  Conv1D(std::size_t in_dim, std::size_t filters, std::size_t kernel);

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  std::vector<ParamTensor<T>*> params() override { return {&w_, &b_}; }
  void init(Rng& rng) override;
  const char* name() const override { return "conv1d"; }

  ParamTensor<T>& weights() { return w_; }
  ParamTensor<T>& bias() { return b_; }

 private:
  std::size_t in_dim_, filters_, kernel_;
  ParamTensor<T> w_;  // (kernel * in_dim, filters)
  ParamTensor<T> b_;  // (filters)
  Tensor<T> col_;     // (batch * out_len, kernel * in_dim)
  Tensor<T> pre_;     // pre-ReLU activations
  std::size_t batch_ = 0, len_ = 0;
};

/// Max over the time axis: (batch, len, ch) -> (batch, ch).
template <class T>
class GlobalMaxPool final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  const char* name() const override { return "global_max_pool"; }

 private:
  std::vector<std::size_t> argmax_;
  std::size_t batch_ = 0, len_ = 0, ch_ = 0;
};

/// Affine map with optional fused ReLU.
template <class T>
class Dense final : public Layer<T> {
 public:
  Dense(std::size_t in, std::size_t out, bool relu_activation);

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  std::vector<ParamTensor<T>*> params() override { return {&w_, &b_}; }
  void init(Rng& rng) override;
  const char* name() const override { return relu_ ? "dense_relu" : "dense"; }

  ParamTensor<T>& weights() { return w_; }
  ParamTensor<T>& bias() { return b_; }

 private:
  std::size_t in_, out_;
  bool relu_;
  ParamTensor<T> w_;  // (in, out)
  ParamTensor<T> b_;  // (out)
  Tensor<T> x_, pre_;
};

/// Bidirectional LSTM returning the concatenated final hidden states of the
/// forward and backward passes: (batch, len, in) -> (batch, 2 * hidden).
/// Optional variational dropout on the step inputs (one mask per sample and
/// direction, shared across timesteps).
template <class T>
class BiLSTM final : public Layer<T> {
 public:
  BiLSTM(std::size_t in_dim, std::size_t hidden, double input_dropout = 0.0);

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng& rng) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  std::vector<ParamTensor<T>*> params() override;
  void init(Rng& rng) override;
  const char* name() const override { return "bilstm"; }

  std::size_t hidden() const { return hidden_; }
  void freeze_mask(bool f) { frozen_ = f; }

  /// Test hook: direct access to one direction's parameters
  /// (0 = forward, 1 = backward). Gate column order is [i, f, g, o].
  ParamTensor<T>& wx(int dir) { return dir_[dir].wx; }
  ParamTensor<T>& wh(int dir) { return dir_[dir].wh; }
  ParamTensor<T>& bias(int dir) { return dir_[dir].b; }

 private:
  struct StepCache {
    Tensor<T> x;  // input after mask, (batch, in)
    Tensor<T> h_prev, c_prev;
    Tensor<T> i, f, g, o, tanh_c;
  };
  struct Direction {
    ParamTensor<T> wx;  // (in, 4H)
    ParamTensor<T> wh;  // (H, 4H)
    ParamTensor<T> b;   // (4H)
    Tensor<T> mask;     // (batch, in) when input dropout is active
    std::vector<StepCache> steps;
    Tensor<T> h_final;
  };

  void run_direction(Direction& dir, const Tensor<T>& input, bool reversed, Mode mode, Rng& rng);
  void backward_direction(Direction& dir, const Tensor<T>& dh_final, bool reversed,
                          Tensor<T>& dx);

  std::size_t in_dim_, hidden_;
  double input_dropout_;
  bool frozen_ = false;
  bool mask_active_ = false;
  std::array<Direction, 2> dir_;
  std::size_t batch_ = 0, len_ = 0;
};

}  // namespace autolabel::nn
