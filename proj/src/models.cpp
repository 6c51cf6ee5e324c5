#include "autolabel/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "autolabel/nn/loss.hpp"

namespace autolabel::models {

using nlohmann::json;

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::CNN: return "cnn";
    case Architecture::BiLSTM: return "bilstm";
    default: return "cnn-bilstm";
  }
}

Architecture parse_architecture(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (n == "cnn") return Architecture::CNN;
  if (n == "bilstm") return Architecture::BiLSTM;
  if (n == "cnn-bilstm" || n == "cnn_bilstm") return Architecture::CNN_BiLSTM;
  throw ConfigViolation("unknown architecture '" + std::string(name) + "'");
}

std::size_t dropout_sites(Architecture a) { return a == Architecture::CNN ? 2 : 4; }

std::vector<double> default_dropout(Architecture a, int experiment) {
  if (experiment < 1 || experiment > 3) throw ConfigViolation("experiment must be 1, 2 or 3");
  if (a == Architecture::CNN) {
    switch (experiment) {
      case 1: return {0.2, 0.2};
      case 2: return {0.4, 0.5};
      default: return {0.3, 0.5};
    }
  }
  switch (experiment) {
    case 1: return {0.3, 0.3, 0.3, 0.4};
    case 2: return {0.2, 0.2, 0.2, 0.5};
    default: return {0.3, 0.3, 0.3, 0.5};
  }
}

double default_learning_rate(int experiment) {
  if (experiment < 1 || experiment > 3) throw ConfigViolation("experiment must be 1, 2 or 3");
  return experiment == 1 ? 0.0001 : 0.001;
}

namespace {

std::vector<double> effective_schedule(Architecture arch, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate < 1.0))
    throw ConfigViolation("learning rate must be in (0,1)");
  if (cfg.batch_size < 1) throw ConfigViolation("batch size must be >= 1");
  if (cfg.max_len < 1) throw ConfigViolation("max_len must be >= 1");
  const std::size_t want = dropout_sites(arch);
  if (cfg.dropout.empty()) return std::vector<double>(want, 0.0);
  if (cfg.dropout.size() != want) throw BadDropoutScheduleLength(cfg.dropout.size(), want);
  for (const double r : cfg.dropout)
    if (r < 0.0 || r >= 1.0) throw ConfigViolation("dropout rate outside [0,1)");
  return cfg.dropout;
}

}  // namespace

template <class T>
Model<T>::Model(Architecture arch, const encode::EmbeddingMatrix& emb, const TrainConfig& cfg)
    : arch_(arch),
      cfg_(cfg),
      embedding_(emb.rows, emb.dim),
      spatial_dropout_(effective_schedule(arch, cfg)[0]),
      dense_hidden_(arch == Architecture::CNN ? kFilters : 2 * kHidden, kDenseUnits,
                    /*relu=*/true),
      dense_dropout_(effective_schedule(arch, cfg)[arch == Architecture::CNN ? 1 : 3]),
      dense_out_(kDenseUnits, kClasses, /*relu=*/false) {
  const auto rates = effective_schedule(arch, cfg);

  auto& table = embedding_.table();
  for (std::size_t i = 0; i < table.data.size(); ++i)
    table.data[i] = static_cast<T>(emb.data[i]);

  if (arch == Architecture::CNN || arch == Architecture::CNN_BiLSTM)
    conv_.emplace(emb.dim, kFilters, kKernel);
  if (arch == Architecture::CNN) pool_.emplace();
  if (arch == Architecture::BiLSTM)
    bilstm_.emplace(emb.dim, kHidden, /*input_dropout=*/rates[1]);
  if (arch == Architecture::CNN_BiLSTM)
    bilstm_.emplace(kFilters, kHidden, /*input_dropout=*/rates[1]);
  if (arch != Architecture::CNN) block_dropout_.emplace(rates[2]);

  Rng rng(Rng::derive(cfg.seed, "init"));
  if (conv_) conv_->init(rng);
  if (bilstm_) bilstm_->init(rng);
  dense_hidden_.init(rng);
  dense_out_.init(rng);
}

template <class T>
nn::Tensor<T> Model<T>::forward(const std::int32_t* indices, std::size_t batch, nn::Mode mode,
                                Rng& rng) {
  nn::Tensor<T> x = embedding_.forward(indices, batch, cfg_.max_len);
  x = spatial_dropout_.forward(x, mode, rng);
  if (conv_) x = conv_->forward(x, mode, rng);
  if (pool_) x = pool_->forward(x, mode, rng);
  if (bilstm_) x = bilstm_->forward(x, mode, rng);
  if (block_dropout_) x = block_dropout_->forward(x, mode, rng);
  x = dense_hidden_.forward(x, mode, rng);
  x = dense_dropout_.forward(x, mode, rng);
  x = dense_out_.forward(x, mode, rng);
  nn::softmax_rows(x);
  return x;
}

template <class T>
void Model<T>::backward(const nn::Tensor<T>& dlogits) {
  nn::Tensor<T> g = dense_out_.backward(dlogits);
  g = dense_dropout_.backward(g);
  g = dense_hidden_.backward(g);
  if (block_dropout_) g = block_dropout_->backward(g);
  if (bilstm_) g = bilstm_->backward(g);
  if (pool_) g = pool_->backward(g);
  if (conv_) g = conv_->backward(g);
  g = spatial_dropout_.backward(g);
  // embedding is frozen; gradient stops here
}

template <class T>
std::vector<nn::ParamTensor<T>*> Model<T>::params() {
  std::vector<nn::ParamTensor<T>*> out;
  if (conv_)
    for (auto* p : conv_->params()) out.push_back(p);
  if (bilstm_)
    for (auto* p : bilstm_->params()) out.push_back(p);
  for (auto* p : dense_hidden_.params()) out.push_back(p);
  for (auto* p : dense_out_.params()) out.push_back(p);
  return out;
}

template <class T>
void Model<T>::zero_grads() {
  for (auto* p : params()) p->zero_grad();
}

template <class T>
void Model<T>::freeze_dropout_masks(bool f) {
  spatial_dropout_.freeze_mask(f);
  if (bilstm_) bilstm_->freeze_mask(f);
  if (block_dropout_) block_dropout_->freeze_mask(f);
  dense_dropout_.freeze_mask(f);
}

template class Model<float>;
template class Model<double>;

template <class T>
Model<T> build_model(Architecture arch, const encode::EmbeddingMatrix& emb,
                     const TrainConfig& cfg) {
  return Model<T>(arch, emb, cfg);
}

template Model<float> build_model<float>(Architecture, const encode::EmbeddingMatrix&,
                                         const TrainConfig&);
template Model<double> build_model<double>(Architecture, const encode::EmbeddingMatrix&,
                                           const TrainConfig&);

namespace {

void assemble_batch(const std::vector<encode::EncodedInstance>& set,
                    const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                    std::size_t max_len, std::vector<std::int32_t>& indices,
                    nn::Tensor<float>& targets) {
  const std::size_t batch = end - begin;
  indices.resize(batch * max_len);
  targets = nn::Tensor<float>({batch, 3});
  for (std::size_t r = 0; r < batch; ++r) {
    const auto& inst = set[order[begin + r]];
    if (inst.indices.size() != max_len) throw ShapeMismatch("encoded instance length");
    std::memcpy(indices.data() + r * max_len, inst.indices.data(),
                max_len * sizeof(std::int32_t));
    for (std::size_t c = 0; c < 3; ++c) targets(r, c) = inst.target[c];
  }
}

std::size_t argmax_row(const float* row, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (row[j] > row[best]) best = j;
  return best;
}

}  // namespace

TrainHistory train(ModelF& model, const std::vector<encode::EncodedInstance>& train_set,
                   const TrainConfig& cfg,
                   const std::function<void(std::size_t epoch)>& on_epoch_end) {
  if (train_set.empty()) throw EmptyTrainSet();
  if (cfg.batch_size < 1) throw ConfigViolation("batch size must be >= 1");

  Rng shuffle_rng(Rng::derive(cfg.seed, "train.shuffle"));
  Rng dropout_rng(Rng::derive(cfg.seed, "train.dropout"));
  nn::Adam<float> optimizer(static_cast<float>(cfg.learning_rate));
  auto params = model.params();

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  std::vector<std::int32_t> indices;
  nn::Tensor<float> targets;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;

    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, n);
      assemble_batch(train_set, order, begin, end, cfg.max_len, indices, targets);
      const std::size_t batch = end - begin;

      auto probs = model.forward(indices.data(), batch, nn::Mode::Train, dropout_rng);
      auto [loss, dlogits] = nn::loss_and_grad(probs, targets);
      if (!std::isfinite(loss)) throw NonFiniteValue("training loss");

      model.zero_grads();
      model.backward(dlogits);
      optimizer.step(params);

      loss_sum += static_cast<double>(loss) * static_cast<double>(batch);
      for (std::size_t r = 0; r < batch; ++r) {
        const std::size_t pred = argmax_row(&probs(r, 0), 3);
        const std::size_t truth = argmax_row(&targets(r, 0), 3);
        if (pred == truth) ++correct;
      }
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    history.epochs.push_back(stats);
    if (on_epoch_end) on_epoch_end(epoch);
  }
  return history;
}

PredictResult predict(ModelF& model, const std::vector<encode::EncodedInstance>& instances) {
  PredictResult result;
  result.labels.reserve(instances.size());
  result.probs.reserve(instances.size());

  Rng unused_rng(0);  // eval mode draws nothing
  const std::size_t max_len = model.config().max_len;
  constexpr std::size_t kChunk = 256;

  std::vector<std::int32_t> indices;
  for (std::size_t begin = 0; begin < instances.size(); begin += kChunk) {
    const std::size_t end = std::min(begin + kChunk, instances.size());
    const std::size_t batch = end - begin;
    indices.resize(batch * max_len);
    for (std::size_t r = 0; r < batch; ++r) {
      if (instances[begin + r].indices.size() != max_len)
        throw ShapeMismatch("encoded instance length");
      std::memcpy(indices.data() + r * max_len, instances[begin + r].indices.data(),
                  max_len * sizeof(std::int32_t));
    }
    auto probs = model.forward(indices.data(), batch, nn::Mode::Eval, unused_rng);
    for (std::size_t r = 0; r < batch; ++r) {
      std::array<double, 3> row{};
      for (std::size_t c = 0; c < 3; ++c) row[c] = static_cast<double>(probs(r, c));
      // strict > keeps the earliest column on ties: Positive > Negative > Neutral
      result.labels.push_back(static_cast<SentimentLabel>(argmax_row(&probs(r, 0), 3)));
      result.probs.push_back(row);
    }
  }
  return result;
}

// ---- checkpoint ---------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'A', 'L', 'N', 'N'};
constexpr std::uint32_t kFormatVersion = 1;
}  // namespace

void save_model(ModelF& model, const std::filesystem::path& path) {
  json header;
  header["format_version"] = kFormatVersion;
  header["arch"] = to_string(model.arch());
  const auto& cfg = model.config();
  header["config"] = {{"learning_rate", cfg.learning_rate}, {"batch_size", cfg.batch_size},
                      {"epochs", cfg.epochs},               {"dropout", cfg.dropout},
                      {"seed", cfg.seed},                   {"max_len", cfg.max_len}};
  header["embedding"] = {{"rows", model.vocab_rows()}, {"dim", model.embed_dim()}};

  std::vector<std::pair<std::string, const nn::Tensor<float>*>> tensors;
  tensors.emplace_back("embedding.table", &model.embedding().table());
  for (auto* p : model.params()) tensors.emplace_back(p->name, &p->value);

  json tensor_list = json::array();
  for (const auto& [name, t] : tensors)
    tensor_list.push_back({{"name", name}, {"shape", t->shape}});
  header["tensors"] = tensor_list;

  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());
  out.write(kMagic, 4);
  const std::uint32_t version = kFormatVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t header_len = header_str.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const auto& [name, t] : tensors)
    out.write(reinterpret_cast<const char*>(t->data.data()),
              static_cast<std::streamsize>(t->data.size() * sizeof(float)));
  if (!out) throw DataError("short write on checkpoint: " + path.string());
}

ModelF load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a model checkpoint: " + path.string());
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kFormatVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("truncated checkpoint header: " + path.string());

  json header = json::parse(header_str);
  TrainConfig cfg;
  cfg.learning_rate = header["config"]["learning_rate"].get<double>();
  cfg.batch_size = header["config"]["batch_size"].get<std::size_t>();
  cfg.epochs = header["config"]["epochs"].get<std::size_t>();
  cfg.dropout = header["config"]["dropout"].get<std::vector<double>>();
  cfg.seed = header["config"]["seed"].get<std::uint64_t>();
  cfg.max_len = header["config"]["max_len"].get<std::size_t>();

  encode::EmbeddingMatrix emb;
  emb.rows = header["embedding"]["rows"].get<std::size_t>();
  emb.dim = header["embedding"]["dim"].get<std::size_t>();
  emb.data.assign(emb.rows * emb.dim, 0.0f);

  ModelF model(parse_architecture(header["arch"].get<std::string>()), emb, cfg);

  std::vector<std::pair<std::string, nn::Tensor<float>*>> tensors;
  tensors.emplace_back("embedding.table", &model.embedding().table());
  for (auto* p : model.params()) tensors.emplace_back(p->name, &p->value);

  const auto& tensor_list = header["tensors"];
  if (tensor_list.size() != tensors.size())
    throw DataError("checkpoint tensor count mismatch");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto name = tensor_list[i]["name"].get<std::string>();
    const auto shape = tensor_list[i]["shape"].get<std::vector<std::size_t>>();
    if (name != tensors[i].first || shape != tensors[i].second->shape)
      throw DataError("checkpoint tensor mismatch at '" + name + "'");
    in.read(reinterpret_cast<char*>(tensors[i].second->data.data()),
            static_cast<std::streamsize>(tensors[i].second->data.size() * sizeof(float)));
  }
  if (!in) throw DataError("truncated checkpoint payload: " + path.string());
  return model;
}

}  // namespace autolabel::models
