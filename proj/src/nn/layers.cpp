#include "autolabel/nn/layers.hpp"

#include <cmath>
#include <cstring>

#include "autolabel/nn/kernels.hpp"

namespace autolabel::nn {

template <class T>
void softmax_rows(Tensor<T>& z) {
  const std::size_t rows = z.dim(0), cols = z.shape.back();
  for (std::size_t r = 0; r < rows; ++r) {
    T* row = z.data.data() + r * cols;
    T mx = row[0];
    for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
    T sum = T{0};
    for (std::size_t j = 0; j < cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < cols; ++j) row[j] /= sum;
  }
}

template void softmax_rows<float>(Tensor<float>&);
template void softmax_rows<double>(Tensor<double>&);

// ---- Embedding --------------------------------------------------------------

template <class T>
Tensor<T> Embedding<T>::forward(const std::int32_t* indices, std::size_t batch,
                                std::size_t len) const {
  const std::size_t dim = table_.dim(1);
  Tensor<T> out({batch, len, dim});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < len; ++t) {
      const std::int32_t idx = indices[b * len + t];
      if (idx < 0 || static_cast<std::size_t>(idx) >= table_.dim(0))
        throw ShapeMismatch("embedding index " + std::to_string(idx) + " out of range");
      std::memcpy(&out(b, t, 0), &table_.data[static_cast<std::size_t>(idx) * dim],
                  dim * sizeof(T));
    }
  }
  return out;
}

template class Embedding<float>;
template class Embedding<double>;

// ---- SpatialDropout ---------------------------------------------------------

template <class T>
Tensor<T> SpatialDropout<T>::forward(const Tensor<T>& input, Mode mode, Rng& rng) {
  if (input.shape.size() != 3) throw ShapeMismatch("spatial dropout wants (batch, len, dim)");
  this->has_forward_ = true;
  if (mode == Mode::Eval || rate_ <= 0.0) {
    active_ = false;
    return input;
  }
  const std::size_t batch = input.dim(0), len = input.dim(1), dim = input.dim(2);
  if (!frozen_ || mask_.numel() != batch * dim) {
    mask_ = Tensor<T>({batch, dim});
    const T scale = static_cast<T>(1.0 / (1.0 - rate_));
    for (auto& m : mask_.data) m = rng.uniform() < rate_ ? T{0} : scale;
  }
  active_ = true;
  Tensor<T> out({batch, len, dim});
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < len; ++t)
      for (std::size_t d = 0; d < dim; ++d) out(b, t, d) = input(b, t, d) * mask_(b, d);
  return out;
}

template <class T>
Tensor<T> SpatialDropout<T>::backward(const Tensor<T>& upstream) {
  if (!this->has_forward_) throw NoCachedForward(name());
  if (!active_) return upstream;
  const std::size_t batch = upstream.dim(0), len = upstream.dim(1), dim = upstream.dim(2);
  Tensor<T> out({batch, len, dim});
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < len; ++t)
      for (std::size_t d = 0; d < dim; ++d) out(b, t, d) = upstream(b, t, d) * mask_(b, d);
  return out;
}

template class SpatialDropout<float>;
template class SpatialDropout<double>;

// ---- Dropout ----------------------------------------------------------------

template <class T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& input, Mode mode, Rng& rng) {
  this->has_forward_ = true;
  if (mode == Mode::Eval || rate_ <= 0.0) {
    active_ = false;
    return input;
  }
  if (!frozen_ || !mask_.same_shape(input)) {
    mask_ = Tensor<T>(input.shape);
    const T scale = static_cast<T>(1.0 / (1.0 - rate_));
    for (auto& m : mask_.data) m = rng.uniform() < rate_ ? T{0} : scale;
  }
  active_ = true;
  Tensor<T> out(input.shape);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = input.data[i] * mask_.data[i];
  return out;
}

template <class T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& upstream) {
  if (!this->has_forward_) throw NoCachedForward(name());
  if (!active_) return upstream;
  Tensor<T> out(upstream.shape);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = upstream.data[i] * mask_.data[i];
  return out;
}

template class Dropout<float>;
template class Dropout<double>;

// ---- Conv1D -----------------------------------------------------------------

template <class T>
Conv1D<T>::Conv1D(std::size_t in_dim, std::size_t filters, std::size_t kernel)
    : in_dim_(in_dim), filters_(filters), kernel_(kernel) {
  w_.name = "conv1d.w";
  w_.init_shape({kernel * in_dim, filters});
  b_.name = "conv1d.b";
  b_.init_shape({filters});
}

template <class T>
void Conv1D<T>::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(kernel_ * in_dim_ + filters_));
  for (auto& v : w_.value.data) v = static_cast<T>(rng.uniform(-limit, limit));
  b_.value.zero();
}

template <class T>
Tensor<T> Conv1D<T>::forward(const Tensor<T>& input, Mode /*mode*/, Rng& /*rng*/) {
  if (input.shape.size() != 3 || input.dim(2) != in_dim_)
    throw ShapeMismatch("conv1d wants (batch, len, " + std::to_string(in_dim_) + ")");
  if (input.dim(1) < kernel_) throw ShapeMismatch("conv1d input shorter than kernel");
  this->has_forward_ = true;
  batch_ = input.dim(0);
  len_ = input.dim(1);
  const std::size_t out_len = len_ - kernel_ + 1;
  const std::size_t patch = kernel_ * in_dim_;

  col_ = Tensor<T>({batch_ * out_len, patch});
  for (std::size_t b = 0; b < batch_; ++b)
    for (std::size_t t = 0; t < out_len; ++t)
      std::memcpy(&col_(b * out_len + t, 0), &input(b, t, 0), patch * sizeof(T));

  pre_ = Tensor<T>({batch_ * out_len, filters_});
  kernels::matmul(col_.data.data(), w_.value.data.data(), pre_.data.data(), batch_ * out_len,
                  patch, filters_);
  kernels::add_bias(pre_.data.data(), b_.value.data.data(), batch_ * out_len, filters_);

  Tensor<T> out({batch_, out_len, filters_});
  out.data = pre_.data;
  kernels::relu(out.data.data(), out.data.size());
  return out;
}

template <class T>
Tensor<T> Conv1D<T>::backward(const Tensor<T>& upstream) {
  if (!this->has_forward_) throw NoCachedForward(name());
  const std::size_t out_len = len_ - kernel_ + 1;
  const std::size_t patch = kernel_ * in_dim_;
  const std::size_t rows = batch_ * out_len;
  if (upstream.numel() != rows * filters_) throw ShapeMismatch("conv1d upstream");

  Tensor<T> dz(upstream.shape);
  dz.data = upstream.data;
  kernels::relu_backward(pre_.data.data(), dz.data.data(), dz.data.size());

  kernels::matmul_at_b_acc(col_.data.data(), dz.data.data(), w_.grad.data.data(), rows, patch,
                           filters_);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t f = 0; f < filters_; ++f) b_.grad(f) += dz.data[r * filters_ + f];
  w_.has_grad = b_.has_grad = true;

  Tensor<T> dcol({rows, patch});
  kernels::matmul_a_bt_acc(dz.data.data(), w_.value.data.data(), dcol.data.data(), rows,
                           filters_, patch);

  Tensor<T> dx({batch_, len_, in_dim_});
  for (std::size_t b = 0; b < batch_; ++b)
    for (std::size_t t = 0; t < out_len; ++t)
      kernels::axpy(&dcol(b * out_len + t, 0), T{1}, &dx(b, t, 0), patch);
  return dx;
}

template class Conv1D<float>;
template class Conv1D<double>;

// ---- GlobalMaxPool ----------------------------------------------------------

template <class T>
Tensor<T> GlobalMaxPool<T>::forward(const Tensor<T>& input, Mode /*mode*/, Rng& /*rng*/) {
  if (input.shape.size() != 3) throw ShapeMismatch("global max pool wants (batch, len, ch)");
  this->has_forward_ = true;
  batch_ = input.dim(0);
  len_ = input.dim(1);
  ch_ = input.dim(2);
  Tensor<T> out({batch_, ch_});
  argmax_.assign(batch_ * ch_, 0);
  for (std::size_t b = 0; b < batch_; ++b) {
    for (std::size_t c = 0; c < ch_; ++c) {
      T best = input(b, 0, c);
      std::size_t best_t = 0;
      for (std::size_t t = 1; t < len_; ++t) {
        if (input(b, t, c) > best) {  // strict: ties keep the first timestep
          best = input(b, t, c);
          best_t = t;
        }
      }
      out(b, c) = best;
      argmax_[b * ch_ + c] = best_t;
    }
  }
  return out;
}

template <class T>
Tensor<T> GlobalMaxPool<T>::backward(const Tensor<T>& upstream) {
  if (!this->has_forward_) throw NoCachedForward(name());
  if (upstream.numel() != batch_ * ch_) throw ShapeMismatch("global max pool upstream");
  Tensor<T> dx({batch_, len_, ch_});
  for (std::size_t b = 0; b < batch_; ++b)
    for (std::size_t c = 0; c < ch_; ++c)
      dx(b, argmax_[b * ch_ + c], c) += upstream(b, c);
  return dx;
}

template class GlobalMaxPool<float>;
template class GlobalMaxPool<double>;

// ---- Dense ------------------------------------------------------------------

template <class T>
Dense<T>::Dense(std::size_t in, std::size_t out, bool relu_activation)
    : in_(in), out_(out), relu_(relu_activation) {
  w_.name = relu_ ? "dense_relu.w" : "dense.w";
  w_.init_shape({in, out});
  b_.name = relu_ ? "dense_relu.b" : "dense.b";
  b_.init_shape({out});
}

template <class T>
void Dense<T>::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_ + out_));
  for (auto& v : w_.value.data) v = static_cast<T>(rng.uniform(-limit, limit));
  b_.value.zero();
}

template <class T>
Tensor<T> Dense<T>::forward(const Tensor<T>& input, Mode /*mode*/, Rng& /*rng*/) {
  if (input.shape.size() != 2 || input.dim(1) != in_)
    throw ShapeMismatch("dense wants (batch, " + std::to_string(in_) + ")");
  this->has_forward_ = true;
  x_ = input;
  const std::size_t batch = input.dim(0);
  pre_ = Tensor<T>({batch, out_});
  kernels::matmul(input.data.data(), w_.value.data.data(), pre_.data.data(), batch, in_, out_);
  kernels::add_bias(pre_.data.data(), b_.value.data.data(), batch, out_);
  Tensor<T> out = pre_;
  if (relu_) kernels::relu(out.data.data(), out.data.size());
  return out;
}

template <class T>
Tensor<T> Dense<T>::backward(const Tensor<T>& upstream) {
  if (!this->has_forward_) throw NoCachedForward(name());
  const std::size_t batch = x_.dim(0);
  if (upstream.numel() != batch * out_) throw ShapeMismatch("dense upstream");

  Tensor<T> dz = upstream;
  if (relu_) kernels::relu_backward(pre_.data.data(), dz.data.data(), dz.data.size());

  kernels::matmul_at_b_acc(x_.data.data(), dz.data.data(), w_.grad.data.data(), batch, in_,
                           out_);
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t j = 0; j < out_; ++j) b_.grad(j) += dz.data[r * out_ + j];
  w_.has_grad = b_.has_grad = true;

  Tensor<T> dx({batch, in_});
  kernels::matmul_a_bt_acc(dz.data.data(), w_.value.data.data(), dx.data.data(), batch, out_,
                           in_);
  return dx;
}

template class Dense<float>;
template class Dense<double>;

// ---- BiLSTM -----------------------------------------------------------------

template <class T>
BiLSTM<T>::BiLSTM(std::size_t in_dim, std::size_t hidden, double input_dropout)
    : in_dim_(in_dim), hidden_(hidden), input_dropout_(input_dropout) {
  const char* tags[2] = {"fwd", "bwd"};
  for (int d = 0; d < 2; ++d) {
    dir_[d].wx.name = std::string("bilstm.wx.") + tags[d];
    dir_[d].wx.init_shape({in_dim, 4 * hidden});
    dir_[d].wh.name = std::string("bilstm.wh.") + tags[d];
    dir_[d].wh.init_shape({hidden, 4 * hidden});
    dir_[d].b.name = std::string("bilstm.b.") + tags[d];
    dir_[d].b.init_shape({4 * hidden});
  }
}

namespace {

/// Orthogonalizes an h x h gaussian draw with modified Gram-Schmidt (double
/// precision regardless of T).
template <class T>
void orthogonal_block(T* dst, std::size_t h, std::size_t stride, Rng& rng) {
  std::vector<double> m(h * h);
  for (auto& v : m) v = rng.gaussian();
  for (std::size_t r = 0; r < h; ++r) {
    double* row = m.data() + r * h;
    for (std::size_t p = 0; p < r; ++p) {
      const double* prev = m.data() + p * h;
      double dot = 0.0;
      for (std::size_t j = 0; j < h; ++j) dot += row[j] * prev[j];
      for (std::size_t j = 0; j < h; ++j) row[j] -= dot * prev[j];
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < h; ++j) norm += row[j] * row[j];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {  // essentially impossible with gaussian draws
      for (std::size_t j = 0; j < h; ++j) row[j] = j == r ? 1.0 : 0.0;
      norm = 1.0;
    }
    for (std::size_t j = 0; j < h; ++j) row[j] /= norm;
  }
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t j = 0; j < h; ++j) dst[r * stride + j] = static_cast<T>(m[r * h + j]);
}

}  // namespace

template <class T>
void BiLSTM<T>::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim_ + 4 * hidden_));
  for (auto& dir : dir_) {
    for (auto& v : dir.wx.value.data) v = static_cast<T>(rng.uniform(-limit, limit));
    // orthogonal recurrent block per gate
    for (int gate = 0; gate < 4; ++gate)
      orthogonal_block(dir.wh.value.data.data() + gate * hidden_, hidden_, 4 * hidden_, rng);
    dir.b.value.zero();
    for (std::size_t j = 0; j < hidden_; ++j) dir.b.value(hidden_ + j) = T{1};  // forget gate
  }
}

template <class T>
std::vector<ParamTensor<T>*> BiLSTM<T>::params() {
  return {&dir_[0].wx, &dir_[0].wh, &dir_[0].b, &dir_[1].wx, &dir_[1].wh, &dir_[1].b};
}

template <class T>
void BiLSTM<T>::run_direction(Direction& dir, const Tensor<T>& input, bool reversed, Mode mode,
                              Rng& rng) {
  const std::size_t B = batch_, L = len_, H = hidden_, D = in_dim_;
  dir.steps.clear();
  dir.steps.reserve(L);

  if (mode == Mode::Train && input_dropout_ > 0.0) {
    if (!frozen_ || dir.mask.numel() != B * D) {
      dir.mask = Tensor<T>({B, D});
      const T scale = static_cast<T>(1.0 / (1.0 - input_dropout_));
      for (auto& m : dir.mask.data) m = rng.uniform() < input_dropout_ ? T{0} : scale;
    }
  }
  const bool masked = mode == Mode::Train && input_dropout_ > 0.0;

  Tensor<T> h({B, H}), c({B, H});
  Tensor<T> z({B, 4 * H});
  for (std::size_t s = 0; s < L; ++s) {
    const std::size_t t = reversed ? L - 1 - s : s;
    StepCache sc;
    sc.x = Tensor<T>({B, D});
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t d = 0; d < D; ++d)
        sc.x(b, d) = masked ? input(b, t, d) * dir.mask(b, d) : input(b, t, d);

    kernels::matmul(sc.x.data.data(), dir.wx.value.data.data(), z.data.data(), B, D, 4 * H);
    kernels::matmul_acc(h.data.data(), dir.wh.value.data.data(), z.data.data(), B, H, 4 * H);
    kernels::add_bias(z.data.data(), dir.b.value.data.data(), B, 4 * H);

    sc.h_prev = h;
    sc.c_prev = c;
    sc.i = Tensor<T>({B, H});
    sc.f = Tensor<T>({B, H});
    sc.g = Tensor<T>({B, H});
    sc.o = Tensor<T>({B, H});
    sc.tanh_c = Tensor<T>({B, H});
    for (std::size_t b = 0; b < B; ++b) {
      const T* zr = &z(b, 0);
      for (std::size_t j = 0; j < H; ++j) {
        const T iv = sigmoid(zr[j]);
        const T fv = sigmoid(zr[H + j]);
        const T gv = std::tanh(zr[2 * H + j]);
        const T ov = sigmoid(zr[3 * H + j]);
        const T cv = fv * c(b, j) + iv * gv;
        sc.i(b, j) = iv;
        sc.f(b, j) = fv;
        sc.g(b, j) = gv;
        sc.o(b, j) = ov;
        c(b, j) = cv;
        sc.tanh_c(b, j) = std::tanh(cv);
        h(b, j) = ov * sc.tanh_c(b, j);
      }
    }
    dir.steps.push_back(std::move(sc));
  }
  dir.h_final = h;
}

template <class T>
Tensor<T> BiLSTM<T>::forward(const Tensor<T>& input, Mode mode, Rng& rng) {
  if (input.shape.size() != 3 || input.dim(2) != in_dim_)
    throw ShapeMismatch("bilstm wants (batch, len, " + std::to_string(in_dim_) + ")");
  this->has_forward_ = true;
  batch_ = input.dim(0);
  len_ = input.dim(1);
  mask_active_ = mode == Mode::Train && input_dropout_ > 0.0;

  run_direction(dir_[0], input, /*reversed=*/false, mode, rng);
  run_direction(dir_[1], input, /*reversed=*/true, mode, rng);

  Tensor<T> out({batch_, 2 * hidden_});
  for (std::size_t b = 0; b < batch_; ++b) {
    for (std::size_t j = 0; j < hidden_; ++j) {
      out(b, j) = dir_[0].h_final(b, j);
      out(b, hidden_ + j) = dir_[1].h_final(b, j);
    }
  }
  return out;
}

template <class T>
void BiLSTM<T>::backward_direction(Direction& dir, const Tensor<T>& dh_final, bool reversed,
                                   Tensor<T>& dx) {
  const std::size_t B = batch_, L = len_, H = hidden_, D = in_dim_;
  Tensor<T> dh = dh_final;
  Tensor<T> dc({B, H});
  Tensor<T> dz({B, 4 * H});
  Tensor<T> dxt({B, D});

  for (std::size_t s = L; s-- > 0;) {
    const std::size_t t = reversed ? L - 1 - s : s;
    StepCache& sc = dir.steps[s];

    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t j = 0; j < H; ++j) {
        const T tc = sc.tanh_c(b, j);
        const T dov = dh(b, j) * tc;
        const T dcv = dc(b, j) + dh(b, j) * sc.o(b, j) * (T{1} - tc * tc);
        const T iv = sc.i(b, j), fv = sc.f(b, j), gv = sc.g(b, j), ov = sc.o(b, j);
        dz(b, j) = dcv * gv * iv * (T{1} - iv);
        dz(b, H + j) = dcv * sc.c_prev(b, j) * fv * (T{1} - fv);
        dz(b, 2 * H + j) = dcv * iv * (T{1} - gv * gv);
        dz(b, 3 * H + j) = dov * ov * (T{1} - ov);
        dc(b, j) = dcv * fv;  // flows to c_{t-1}
      }
    }

    kernels::matmul_at_b_acc(sc.x.data.data(), dz.data.data(), dir.wx.grad.data.data(), B, D,
                             4 * H);
    kernels::matmul_at_b_acc(sc.h_prev.data.data(), dz.data.data(), dir.wh.grad.data.data(), B,
                             H, 4 * H);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t j = 0; j < 4 * H; ++j) dir.b.grad(j) += dz(b, j);

    dh.zero();
    kernels::matmul_a_bt_acc(dz.data.data(), dir.wh.value.data.data(), dh.data.data(), B, 4 * H,
                             H);

    dxt.zero();
    kernels::matmul_a_bt_acc(dz.data.data(), dir.wx.value.data.data(), dxt.data.data(), B, 4 * H,
                             D);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t d = 0; d < D; ++d) {
        const T m = mask_active_ ? dir.mask(b, d) : T{1};
        dx(b, t, d) += dxt(b, d) * m;
      }
  }
  dir.wx.has_grad = dir.wh.has_grad = dir.b.has_grad = true;
}

template <class T>
Tensor<T> BiLSTM<T>::backward(const Tensor<T>& upstream) {
  if (!this->has_forward_) throw NoCachedForward(name());
  if (upstream.numel() != batch_ * 2 * hidden_) throw ShapeMismatch("bilstm upstream");

  Tensor<T> dh_f({batch_, hidden_}), dh_b({batch_, hidden_});
  for (std::size_t b = 0; b < batch_; ++b)
    for (std::size_t j = 0; j < hidden_; ++j) {
      dh_f(b, j) = upstream(b, j);
      dh_b(b, j) = upstream(b, hidden_ + j);
    }

  Tensor<T> dx({batch_, len_, in_dim_});
  backward_direction(dir_[0], dh_f, /*reversed=*/false, dx);
  backward_direction(dir_[1], dh_b, /*reversed=*/true, dx);
  return dx;
}

template class BiLSTM<float>;
template class BiLSTM<double>;

}  // namespace autolabel::nn
