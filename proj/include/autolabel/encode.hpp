#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "autolabel/label.hpp"
#include "autolabel/textprep.hpp"

namespace autolabel::encode {

/// Word index map. 0 is padding, 1 is out-of-vocabulary; real words start at 2
/// and are assigned by descending training frequency (ties lexicographic).
struct Vocab {
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kOov = 1;

  std::unordered_map<std::string, std::int32_t> index;

  std::size_t size() const { return index.size() + 2; }

  std::int32_t lookup(const std::string& word) const {
    const auto it = index.find(word);
    return it == index.end() ? kOov : it->second;
  }
};

Vocab build_vocab(const std::vector<textprep::TokenList>& train_tokens,
                  std::size_t min_count = 1);

/// Row-major |vocab| x dim matrix, float32. Row 0 (padding) is all zeros.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  float* row(std::size_t r) { return data.data() + r * dim; }
  const float* row(std::size_t r) const { return data.data() + r * dim; }
};

struct EmbeddingStats {
  std::size_t found = 0;       // vocab words present in the file
  std::size_t vocab_words = 0; // real words (excluding pad/oov)
  double coverage = 0.0;
};

/// Reads `word v1 ... vd` lines (plain text or gzip); vocab words missing from
/// the file (and the OOV row) get seeded uniform(-0.05, 0.05) rows.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                                std::size_t dim, std::uint64_t seed,
                                EmbeddingStats* stats = nullptr);

/// All rows random (except padding); used when no pretrained file is supplied.
EmbeddingMatrix random_embeddings(const Vocab& vocab, std::size_t dim, std::uint64_t seed);

/// Index-encode, truncate to the first max_len tokens, left-pad with 0.
std::vector<std::int32_t> encode_sequence(const textprep::TokenList& tokens, const Vocab& vocab,
                                          std::size_t max_len = 30);

/// Column order (Positive, Negative, Neutral).
std::array<float, 3> one_hot(SentimentLabel label);

inline std::size_t label_index(SentimentLabel label) { return static_cast<std::size_t>(label); }

struct EncodedInstance {
  std::vector<std::int32_t> indices;  // length max_len
  std::array<float, 3> target{};      // one-hot
};

}  // namespace autolabel::encode
