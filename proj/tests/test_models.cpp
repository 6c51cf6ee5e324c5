#include <doctest.h>

#include <cmath>

#include "autolabel/models.hpp"
#include "test_support.hpp"

using namespace autolabel;
using namespace autolabel::models;

namespace {

encode::EmbeddingMatrix tiny_embeddings(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  encode::Vocab vocab;
  for (std::size_t i = 2; i < rows; ++i)
    vocab.index.emplace("w" + std::to_string(i), static_cast<std::int32_t>(i));
  return encode::random_embeddings(vocab, dim, seed);
}

std::vector<encode::EncodedInstance> toy_instances(std::size_t n, std::size_t rows,
                                                   std::size_t max_len, std::uint64_t seed) {
  // three disjoint index bands, one per class: trivially separable
  Rng rng(seed);
  std::vector<encode::EncodedInstance> out;
  const std::size_t band = (rows - 2) / 3;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % 3;
    encode::EncodedInstance inst;
    inst.indices.assign(max_len, 0);
    for (std::size_t t = max_len - 6; t < max_len; ++t)
      inst.indices[t] = static_cast<std::int32_t>(2 + cls * band + rng.below(band));
    inst.target = encode::one_hot(static_cast<SentimentLabel>(cls));
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("experiment defaults match the published schedules") {
  CHECK(default_dropout(Architecture::CNN, 1) == std::vector<double>{0.2, 0.2});
  CHECK(default_dropout(Architecture::CNN, 2) == std::vector<double>{0.4, 0.5});
  CHECK(default_dropout(Architecture::CNN, 3) == std::vector<double>{0.3, 0.5});
  CHECK(default_dropout(Architecture::BiLSTM, 1) == std::vector<double>{0.3, 0.3, 0.3, 0.4});
  CHECK(default_dropout(Architecture::BiLSTM, 2) == std::vector<double>{0.2, 0.2, 0.2, 0.5});
  CHECK(default_dropout(Architecture::BiLSTM, 3) == std::vector<double>{0.3, 0.3, 0.3, 0.5});
  CHECK(default_dropout(Architecture::CNN_BiLSTM, 1) == default_dropout(Architecture::BiLSTM, 1));
  CHECK(default_learning_rate(1) == 0.0001);
  CHECK(default_learning_rate(2) == 0.001);
  CHECK(default_learning_rate(3) == 0.001);
  CHECK(dropout_sites(Architecture::CNN) == 2);
  CHECK(dropout_sites(Architecture::BiLSTM) == 4);
  CHECK(dropout_sites(Architecture::CNN_BiLSTM) == 4);
}

TEST_CASE("build_model wires the published layer dimensions") {
  const auto emb = tiny_embeddings(20, 12, 1);
  TrainConfig cfg;
  cfg.max_len = 10;

  auto cnn = build_model<float>(Architecture::CNN, emb, cfg);
  bool saw_conv = false, saw_dense = false;
  for (auto* p : cnn.params()) {
    if (p->name == "conv1d.w") {
      saw_conv = true;
      CHECK(p->value.shape == std::vector<std::size_t>{5 * 12, 64});
    }
    if (p->name == "dense_relu.w") {
      saw_dense = true;
      CHECK(p->value.shape == std::vector<std::size_t>{64, 64});  // pooled 64 filters in
    }
  }
  CHECK(saw_conv);
  CHECK(saw_dense);

  auto bilstm = build_model<float>(Architecture::BiLSTM, emb, cfg);
  for (auto* p : bilstm.params()) {
    if (p->name == "dense_relu.w")
      CHECK(p->value.shape == std::vector<std::size_t>{128, 64});  // 2 x 64 concat
    if (p->name == "bilstm.wx.fwd")
      CHECK(p->value.shape == std::vector<std::size_t>{12, 256});
  }

  auto hybrid = build_model<float>(Architecture::CNN_BiLSTM, emb, cfg);
  for (auto* p : hybrid.params()) {
    if (p->name == "bilstm.wx.fwd")
      CHECK(p->value.shape == std::vector<std::size_t>{64, 256});  // conv filters feed it
  }
}

TEST_CASE("probability rows sum to one for every architecture") {
  const auto emb = tiny_embeddings(20, 12, 2);
  TrainConfig cfg;
  cfg.max_len = 10;
  Rng rng(0);
  const auto batch = toy_instances(4, 20, 10, 3);
  std::vector<std::int32_t> indices;
  for (const auto& inst : batch)
    indices.insert(indices.end(), inst.indices.begin(), inst.indices.end());

  for (const auto arch : {Architecture::CNN, Architecture::BiLSTM, Architecture::CNN_BiLSTM}) {
    auto model = build_model<float>(arch, emb, cfg);
    auto probs = model.forward(indices.data(), 4, nn::Mode::Eval, rng);
    REQUIRE(probs.shape == std::vector<std::size_t>{4, 3});
    for (std::size_t r = 0; r < 4; ++r) {
      float sum = 0.0f;
      for (std::size_t c = 0; c < 3; ++c) sum += probs(r, c);
      CHECK(sum == doctest::Approx(1.0f).epsilon(1e-6));
    }
  }
}

TEST_CASE("wrong dropout schedule length is rejected") {
  const auto emb = tiny_embeddings(10, 4, 1);
  TrainConfig cfg;
  cfg.dropout = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(build_model<float>(Architecture::BiLSTM, emb, cfg),
                  BadDropoutScheduleLength);
  cfg.dropout = {0.1, 0.2, 0.3, 0.4};
  CHECK_THROWS_AS(build_model<float>(Architecture::CNN, emb, cfg), BadDropoutScheduleLength);
}

TEST_CASE("zero epochs leaves parameters unchanged") {
  const auto emb = tiny_embeddings(20, 8, 4);
  TrainConfig cfg;
  cfg.max_len = 10;
  cfg.epochs = 0;
  auto model = build_model<float>(Architecture::CNN, emb, cfg);
  std::vector<std::vector<float>> before;
  for (auto* p : model.params()) before.push_back(p->value.data);

  const auto history = train(model, toy_instances(30, 20, 10, 5), cfg);
  CHECK(history.epochs.empty());
  std::size_t i = 0;
  for (auto* p : model.params()) CHECK(p->value.data == before[i++]);
}

TEST_CASE("training rejects an empty train set") {
  const auto emb = tiny_embeddings(10, 4, 1);
  TrainConfig cfg;
  auto model = build_model<float>(Architecture::CNN, emb, cfg);
  CHECK_THROWS_AS(train(model, {}, cfg), EmptyTrainSet);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto emb = tiny_embeddings(26, 8, 6);
  TrainConfig cfg;
  cfg.max_len = 10;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  cfg.dropout = {0.2, 0.2};
  cfg.seed = 77;
  const auto data = toy_instances(48, 26, 10, 7);

  auto run = [&] {
    auto model = build_model<float>(Architecture::CNN, emb, cfg);
    const auto history = train(model, data, cfg);
    std::vector<std::vector<float>> params;
    for (auto* p : model.params()) params.push_back(p->value.data);
    return std::make_pair(history.epochs, params);
  };

  const auto a = run();
  const auto b = run();
  REQUIRE(a.first.size() == b.first.size());
  for (std::size_t e = 0; e < a.first.size(); ++e) {
    CHECK(a.first[e].train_loss == b.first[e].train_loss);
    CHECK(a.first[e].train_accuracy == b.first[e].train_accuracy);
  }
  CHECK(a.second == b.second);  // bit-identical parameters
}

TEST_CASE("a bilstm separates a toy index-band corpus") {
  const auto emb = tiny_embeddings(26, 16, 8);
  TrainConfig cfg;
  cfg.max_len = 10;
  cfg.epochs = 10;
  cfg.batch_size = 30;
  cfg.learning_rate = 0.01;
  cfg.seed = 1;
  auto model = build_model<float>(Architecture::BiLSTM, emb, cfg);
  const auto data = toy_instances(90, 26, 10, 9);
  const auto history = train(model, data, cfg);
  REQUIRE(history.epochs.size() == 10);
  CHECK(history.epochs.back().train_accuracy >= 0.9);
}

TEST_CASE("prediction ignores batch partitioning") {
  const auto emb = tiny_embeddings(26, 8, 10);
  TrainConfig cfg;
  cfg.max_len = 10;
  cfg.epochs = 2;
  cfg.batch_size = 10;
  cfg.learning_rate = 0.01;
  auto model = build_model<float>(Architecture::CNN_BiLSTM, emb, cfg);
  const auto data = toy_instances(40, 26, 10, 11);
  train(model, data, cfg);

  const auto batched = predict(model, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto single = predict(model, {data[i]});
    CHECK(single.labels[0] == batched.labels[i]);
    for (std::size_t c = 0; c < 3; ++c) CHECK(single.probs[0][c] == batched.probs[i][c]);
  }
}

TEST_CASE("argmax ties resolve by column order") {
  const auto emb = tiny_embeddings(10, 4, 12);
  TrainConfig cfg;
  cfg.max_len = 6;
  auto model = build_model<float>(Architecture::CNN, emb, cfg);
  for (auto* p : model.params()) p->value.zero();  // all logits identical now

  encode::EncodedInstance inst;
  inst.indices.assign(6, 3);
  inst.target = encode::one_hot(SentimentLabel::Neutral);
  const auto out = predict(model, {inst});
  CHECK(out.probs[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(out.labels[0] == SentimentLabel::Positive);  // documented tie-break
}

TEST_CASE("checkpoint round trip restores bit-identical parameters") {
  testsup::TempDir tmp;
  const auto emb = tiny_embeddings(26, 8, 13);
  TrainConfig cfg;
  cfg.max_len = 10;
  cfg.epochs = 2;
  cfg.batch_size = 20;
  cfg.learning_rate = 0.01;
  cfg.dropout = {0.3, 0.3, 0.3, 0.4};
  auto model = build_model<float>(Architecture::BiLSTM, emb, cfg);
  const auto data = toy_instances(40, 26, 10, 14);
  train(model, data, cfg);

  save_model(model, tmp.file("model.bin"));
  auto loaded = load_model(tmp.file("model.bin"));

  CHECK(loaded.arch() == model.arch());
  CHECK(loaded.config().max_len == cfg.max_len);
  auto lp = loaded.params();
  auto mp = model.params();
  REQUIRE(lp.size() == mp.size());
  for (std::size_t i = 0; i < mp.size(); ++i) {
    CHECK(lp[i]->name == mp[i]->name);
    CHECK(lp[i]->value.data == mp[i]->value.data);
  }

  const auto want = predict(model, data);
  const auto got = predict(loaded, data);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(want.labels[i] == got.labels[i]);

  CHECK_THROWS_AS(load_model(tmp.file("missing.bin")), DataError);
}

}  // TEST_SUITE
