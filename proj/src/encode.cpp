#include "autolabel/encode.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "autolabel/errors.hpp"
#include "autolabel/rng.hpp"

namespace autolabel::encode {

Vocab build_vocab(const std::vector<textprep::TokenList>& train_tokens, std::size_t min_count) {
  if (train_tokens.empty()) throw EmptyCorpus();

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : train_tokens)
    for (const auto& tok : doc) ++counts[tok];

  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(counts.size());
  for (auto& [word, count] : counts)
    if (count >= min_count) ranked.emplace_back(word, count);

  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab vocab;
  std::int32_t next = 2;
  for (auto& [word, count] : ranked) vocab.index.emplace(std::move(word), next++);
  return vocab;
}

namespace {

void fill_random_row(float* row, std::size_t dim, Rng& rng) {
  for (std::size_t i = 0; i < dim; ++i)
    row[i] = static_cast<float>(rng.uniform(-0.05, 0.05));
}

}  // namespace

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                                std::size_t dim, std::uint64_t seed, EmbeddingStats* stats) {
  gzFile file = gzopen(path.string().c_str(), "rb");  // reads plain text too
  if (file == nullptr) throw DataError("cannot open embedding file: " + path.string());

  EmbeddingMatrix emb;
  emb.rows = vocab.size();
  emb.dim = dim;
  emb.data.assign(emb.rows * dim, 0.0f);
  std::vector<bool> filled(emb.rows, false);

  std::string line;
  std::vector<char> buf(1 << 16);
  std::size_t line_no = 0;
  std::size_t found = 0;
  while (true) {
    line.clear();
    bool eof = false;
    while (true) {
      if (gzgets(file, buf.data(), static_cast<int>(buf.size())) == nullptr) {
        eof = true;
        break;
      }
      line += buf.data();
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        break;
      }
    }
    if (eof && line.empty()) break;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (eof) break;
      continue;
    }

    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw DimensionMismatch(line_no, 0, dim);
    const std::string word = line.substr(0, sp);
    const auto it = vocab.index.find(word);

    if (it != vocab.index.end()) {
      float* row = emb.row(static_cast<std::size_t>(it->second));
      std::size_t count = 0;
      const char* p = line.c_str() + sp;
      char* end = nullptr;
      while (*p != '\0') {
        while (*p == ' ') ++p;
        if (*p == '\0') break;
        const float v = std::strtof(p, &end);
        if (end == p) throw DimensionMismatch(line_no, count, dim);
        if (!std::isfinite(v))
          throw DataError("non-finite embedding value at line " + std::to_string(line_no));
        if (count < dim) row[count] = v;
        ++count;
        p = end;
      }
      if (count != dim) throw DimensionMismatch(line_no, count, dim);
      if (!filled[static_cast<std::size_t>(it->second)]) {
        filled[static_cast<std::size_t>(it->second)] = true;
        ++found;
      }
    }
    if (eof) break;
  }
  gzclose(file);

  // Missing words (and the OOV row) get small seeded rows so they never alias
  // the all-zero padding row. Filled in index order for reproducibility.
  Rng rng(Rng::derive(seed, "embeddings"));
  for (std::size_t r = 1; r < emb.rows; ++r)
    if (!filled[r]) fill_random_row(emb.row(r), dim, rng);

  if (stats != nullptr) {
    stats->found = found;
    stats->vocab_words = vocab.index.size();
    stats->coverage = vocab.index.empty()
                          ? 0.0
                          : static_cast<double>(found) / static_cast<double>(vocab.index.size());
  }
  return emb;
}

EmbeddingMatrix random_embeddings(const Vocab& vocab, std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix emb;
  emb.rows = vocab.size();
  emb.dim = dim;
  emb.data.assign(emb.rows * dim, 0.0f);
  Rng rng(Rng::derive(seed, "embeddings"));
  for (std::size_t r = 1; r < emb.rows; ++r) fill_random_row(emb.row(r), dim, rng);
  return emb;
}

std::vector<std::int32_t> encode_sequence(const textprep::TokenList& tokens, const Vocab& vocab,
                                          std::size_t max_len) {
  std::vector<std::int32_t> out(max_len, Vocab::kPad);
  const std::size_t take = std::min(tokens.size(), max_len);
  const std::size_t offset = max_len - take;  // left padding
  for (std::size_t i = 0; i < take; ++i) out[offset + i] = vocab.lookup(tokens[i]);
  return out;
}

std::array<float, 3> one_hot(SentimentLabel label) {
  std::array<float, 3> v{0.0f, 0.0f, 0.0f};
  v[label_index(label)] = 1.0f;
  return v;
}

}  // namespace autolabel::encode
