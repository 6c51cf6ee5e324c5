#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autolabel/label.hpp"

namespace autolabel::corpus {

struct LabeledInstance {
  std::string id;
  std::string text;  // raw UTF-8, no tabs or newlines
  std::optional<SentimentLabel> gold_label;
  std::map<std::string, SentimentLabel> auto_labels;  // method name -> label
};

struct Dataset {
  std::string name;
  std::vector<LabeledInstance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
};

/// Reads a UTF-8 TSV file, one instance per line:
///   id<TAB>label<TAB>text[<TAB>method=label ...]
/// label is positive/negative/neutral (case-insensitive) or `-` for none.
Dataset load_dataset(const std::filesystem::path& path);

/// Writes the same TSV schema; auto label columns are emitted in method name
/// order so output is deterministic.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Seeded uniform shuffle followed by a prefix cut:
/// |train| = floor(train_fraction * N).
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

/// Keyword pools for synthetic corpora. The three class lists must be pairwise
/// disjoint; filler words are sprinkled into every class.
struct SynthVocab {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  std::vector<std::string> neutral;
  std::vector<std::string> filler;  // empty -> built-in neutral filler
};

/// 3 * n_per_class instances, gold-labelled, each text drawn mostly from its
/// class keyword list. Deterministic for a fixed (vocab, seed).
Dataset synth_corpus(std::size_t n_per_class, const SynthVocab& vocab, std::uint64_t seed);

}  // namespace autolabel::corpus
