#include "autolabel/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "autolabel/errors.hpp"
#include "autolabel/rng.hpp"

namespace autolabel {

std::optional<SentimentLabel> parse_label(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "positive") return SentimentLabel::Positive;
  if (lower == "negative") return SentimentLabel::Negative;
  if (lower == "neutral") return SentimentLabel::Neutral;
  return std::nullopt;
}

}  // namespace autolabel

namespace autolabel::corpus {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());

  Dataset ds;
  ds.name = path.stem().string();
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_tabs(line);
    if (fields.size() < 3) throw MalformedLine(line_no, "expected id<TAB>label<TAB>text");

    LabeledInstance inst;
    inst.id = fields[0];
    if (inst.id.empty()) throw MalformedLine(line_no, "empty id");
    if (!seen_ids.insert(inst.id).second)
      throw MalformedLine(line_no, "duplicate id '" + inst.id + "'");

    if (fields[1] != "-") {
      const auto label = parse_label(fields[1]);
      if (!label) throw UnknownLabel(line_no, fields[1]);
      inst.gold_label = *label;
    }
    inst.text = fields[2];

    for (std::size_t i = 3; i < fields.size(); ++i) {
      const std::size_t eq = fields[i].find('=');
      if (eq == std::string::npos) throw MalformedLine(line_no, "expected method=label");
      const auto label = parse_label(fields[i].substr(eq + 1));
      if (!label) throw UnknownLabel(line_no, fields[i].substr(eq + 1));
      inst.auto_labels[fields[i].substr(0, eq)] = *label;
    }
    ds.instances.push_back(std::move(inst));
  }

  if (ds.empty()) throw EmptyFile(path.string());
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  for (const auto& inst : ds.instances) {
    out << inst.id << '\t' << (inst.gold_label ? to_string(*inst.gold_label) : "-") << '\t'
        << inst.text;
    for (const auto& [method, label] : inst.auto_labels) out << '\t' << method << '=' << to_string(label);
    out << '\n';
  }
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  if (ds.empty()) throw EmptyDataset();
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ConfigViolation("train_fraction must be in (0,1)");

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(order);

  const auto train_n =
      static_cast<std::size_t>(spec.train_fraction * static_cast<double>(ds.size()));

  Dataset train{ds.name + ".train", {}};
  Dataset test{ds.name + ".test", {}};
  train.instances.reserve(train_n);
  test.instances.reserve(ds.size() - train_n);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& dst = (i < train_n) ? train : test;
    dst.instances.push_back(ds.instances[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

Dataset synth_corpus(std::size_t n_per_class, const SynthVocab& vocab, std::uint64_t seed) {
  if (n_per_class < 1) throw ConfigViolation("n_per_class must be >= 1");
  const std::array<const std::vector<std::string>*, 3> classes = {&vocab.positive,
                                                                  &vocab.negative,
                                                                  &vocab.neutral};
  for (const auto* c : classes)
    if (c->empty()) throw ConfigViolation("every class keyword list must be non-empty");

  std::set<std::string> seen;
  for (const auto* c : classes)
    for (const auto& w : *c)
      if (!seen.insert(w).second) throw OverlappingVocab(w);

  static const std::vector<std::string> kDefaultFiller = {
      "the", "a",    "to",  "of",    "day",   "time", "people", "thing",
      "see", "look", "way", "today", "again", "about"};
  const auto& filler = vocab.filler.empty() ? kDefaultFiller : vocab.filler;

  static const std::array<SentimentLabel, 3> kLabels = {
      SentimentLabel::Positive, SentimentLabel::Negative, SentimentLabel::Neutral};

  Rng rng(seed);
  Dataset ds;
  ds.name = "synth";
  ds.instances.reserve(3 * n_per_class);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& words = *classes[c];
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const std::size_t len = 5 + rng.below(4);
      std::string text;
      for (std::size_t t = 0; t < len; ++t) {
        // first token always from the class pool so every text carries signal
        const bool own = (t == 0) || rng.uniform() < 0.8;
        const auto& pool = own ? words : filler;
        if (t > 0) text += ' ';
        text += pool[rng.below(pool.size())];
      }
      LabeledInstance inst;
      inst.id = "synth-" + std::string(to_string(kLabels[c])) + "-" + std::to_string(i);
      inst.text = std::move(text);
      inst.gold_label = kLabels[c];
      ds.instances.push_back(std::move(inst));
    }
  }
  return ds;
}

}  // namespace autolabel::corpus
