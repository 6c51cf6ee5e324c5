#include "autolabel/evalx.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "autolabel/encode.hpp"
#include "autolabel/errors.hpp"

namespace autolabel::evalx {

using nlohmann::json;

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (const auto c : row) t += c;
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  return counts[0][0] + counts[1][1] + counts[2][2];
}

ConfusionMatrix confusion(const std::vector<SentimentLabel>& y_true,
                          const std::vector<SentimentLabel>& y_pred) {
  if (y_true.size() != y_pred.size()) throw LengthMismatch(y_true.size(), y_pred.size());
  if (y_true.empty()) throw LengthMismatch(0, 0);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    ++cm.counts[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
  return cm;
}

std::array<PerClassMetrics, 3> per_class_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyMatrix();
  std::array<PerClassMetrics, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) {
    const double tp = static_cast<double>(cm.counts[c][c]);
    double fp = 0.0, fn = 0.0;
    for (std::size_t o = 0; o < 3; ++o) {
      if (o == c) continue;
      fp += static_cast<double>(cm.counts[o][c]);
      fn += static_cast<double>(cm.counts[c][o]);
    }
    const double p = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    out[c].precision = p;
    out[c].recall = r;
    out[c].f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return out;
}

MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
  const auto per_class = per_class_metrics(cm);
  MacroMetrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  for (const auto& pc : per_class) {
    m.macro_precision += pc.precision / 3.0;
    m.macro_recall += pc.recall / 3.0;
    m.macro_f1 += pc.f1 / 3.0;
  }
  return m;
}

double agreement(const std::vector<SentimentLabel>& a, const std::vector<SentimentLabel>& b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
  if (a.empty()) throw LengthMismatch(0, 0);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i]) ++same;
  return 100.0 * static_cast<double>(same) / static_cast<double>(a.size());
}

std::vector<SentimentLabel> label_column(const corpus::Dataset& ds, const std::string& source) {
  std::vector<SentimentLabel> out;
  out.reserve(ds.size());
  for (const auto& inst : ds.instances) {
    if (source == "gold") {
      if (!inst.gold_label) throw MissingLabels(source, inst.id);
      out.push_back(*inst.gold_label);
    } else {
      const auto it = inst.auto_labels.find(source);
      if (it == inst.auto_labels.end()) throw MissingLabels(source, inst.id);
      out.push_back(it->second);
    }
  }
  return out;
}

Distribution distribution(const corpus::Dataset& ds, const std::string& source) {
  if (ds.empty()) throw EmptyDataset();
  const auto labels = label_column(ds, source);
  std::array<std::size_t, 3> counts{};
  for (const auto l : labels) ++counts[static_cast<std::size_t>(l)];
  const double n = static_cast<double>(labels.size());
  return Distribution{100.0 * static_cast<double>(counts[0]) / n,
                      100.0 * static_cast<double>(counts[1]) / n,
                      100.0 * static_cast<double>(counts[2]) / n};
}

const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::E1: return "e1";
    case ExperimentId::E2: return "e2";
    default: return "e3";
  }
}

ExperimentId parse_experiment(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (n == "e1" || n == "1") return ExperimentId::E1;
  if (n == "e2" || n == "2") return ExperimentId::E2;
  if (n == "e3" || n == "3") return ExperimentId::E3;
  throw ConfigViolation("unknown experiment '" + std::string(name) + "'");
}

namespace {

bool is_auto_source(const std::string& s) {
  return s == "afinn" || s == "textblob" || s == "vader";
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto ok_source = [](const std::string& s) { return s == "gold" || is_auto_source(s); };
  if (!ok_source(train_source) || !ok_source(test_source))
    throw ConfigViolation("label source must be gold, afinn, textblob or vader");
  switch (id) {
    case ExperimentId::E1:
      if (train_source != "gold" || test_source != "gold")
        throw ConfigViolation("e1 requires gold labels for train and test");
      break;
    case ExperimentId::E2:
      if (!is_auto_source(train_source) || train_source != test_source)
        throw ConfigViolation("e2 requires the same automatic source for train and test");
      break;
    case ExperimentId::E3:
      if (!is_auto_source(train_source) || test_source != "gold")
        throw ConfigViolation("e3 requires an automatic train source and gold test labels");
      break;
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigViolation("train_fraction must be in (0,1)");
}

namespace {

std::vector<encode::EncodedInstance> encode_split(
    const corpus::Dataset& split_ds, const std::vector<textprep::TokenList>& tokens,
    const encode::Vocab& vocab, const std::string& source, std::size_t max_len) {
  const auto labels = label_column(split_ds, source);
  std::vector<encode::EncodedInstance> out;
  out.reserve(split_ds.size());
  for (std::size_t i = 0; i < split_ds.size(); ++i) {
    encode::EncodedInstance inst;
    inst.indices = encode::encode_sequence(tokens[i], vocab, max_len);
    inst.target = encode::one_hot(labels[i]);
    out.push_back(std::move(inst));
  }
  return out;
}

MacroMetrics mean_of(const std::vector<EpochTestMetrics>& per_epoch) {
  MacroMetrics m;
  if (per_epoch.empty()) return m;
  for (const auto& e : per_epoch) {
    m.accuracy += e.metrics.accuracy;
    m.macro_precision += e.metrics.macro_precision;
    m.macro_recall += e.metrics.macro_recall;
    m.macro_f1 += e.metrics.macro_f1;
  }
  const double n = static_cast<double>(per_epoch.size());
  m.accuracy /= n;
  m.macro_precision /= n;
  m.macro_recall /= n;
  m.macro_f1 /= n;
  return m;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const corpus::Dataset& ds,
                                const RunDeps& deps,
                                std::optional<models::ModelF>* trained_model_out) {
  cfg.validate();
  if (ds.empty()) throw EmptyDataset();
  const auto t0 = std::chrono::steady_clock::now();

  // automatic labels wanted for the pipeline and the report's agreement block
  corpus::Dataset labelled = ds;
  std::set<std::string> wanted;
  if (is_auto_source(cfg.train_source)) wanted.insert(cfg.train_source);
  if (is_auto_source(cfg.test_source)) wanted.insert(cfg.test_source);
  for (const auto& method : wanted) {
    if (deps.labeller == nullptr)
      throw ConfigViolation("automatic label source '" + method + "' needs loaded lexicons");
    labelled = deps.labeller->label_dataset(labelled, lexlabel::parse_method(method));
  }

  // the split permutation depends only on (size, seed), so every experiment
  // with the same seed sees the same text partition
  const auto [train_ds, test_ds] =
      corpus::split(labelled, corpus::SplitSpec{cfg.train_fraction, cfg.train.seed});

  auto tokenize_all = [&](const corpus::Dataset& d) {
    std::vector<textprep::TokenList> tokens;
    tokens.reserve(d.size());
    for (const auto& inst : d.instances)
      tokens.push_back(textprep::preprocess_for_model(inst.text, deps.stopwords,
                                                      deps.junk_words));
    return tokens;
  };
  const auto train_tokens = tokenize_all(train_ds);
  const auto test_tokens = tokenize_all(test_ds);

  const auto vocab = encode::build_vocab(train_tokens);

  ExperimentReport report;
  report.config = cfg;
  report.seed = cfg.train.seed;

  encode::EmbeddingMatrix emb;
  if (cfg.embeddings_path.empty()) {
    emb = encode::random_embeddings(vocab, cfg.embed_dim, cfg.train.seed);
  } else {
    encode::EmbeddingStats stats;
    emb = encode::load_embeddings(cfg.embeddings_path, vocab, cfg.embed_dim, cfg.train.seed,
                                  &stats);
    report.embedding_coverage = stats.coverage;
  }

  const auto train_set = encode_split(train_ds, train_tokens, vocab, cfg.train_source,
                                      cfg.train.max_len);
  const auto test_set = encode_split(test_ds, test_tokens, vocab, cfg.test_source,
                                     cfg.train.max_len);
  const auto test_labels = label_column(test_ds, cfg.test_source);

  auto model = models::build_model<float>(cfg.arch, emb, cfg.train);

  report.history = models::train(model, train_set, cfg.train, [&](std::size_t epoch) {
    const auto pred = models::predict(model, test_set);
    EpochTestMetrics em;
    em.epoch = epoch;
    em.metrics = macro_metrics(confusion(test_labels, pred.labels));
    report.per_epoch.push_back(em);
  });

  const auto pred = models::predict(model, test_set);
  report.confusion = confusion(test_labels, pred.labels);
  report.metrics = macro_metrics(report.confusion);
  report.per_class = per_class_metrics(report.confusion);
  report.epoch_mean = mean_of(report.per_epoch);

  {
    const auto train_pred = models::predict(model, train_set);
    const auto train_labels = label_column(train_ds, cfg.train_source);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < train_labels.size(); ++i)
      if (train_pred.labels[i] == train_labels[i]) ++correct;
    report.final_train_accuracy =
        static_cast<double>(correct) / static_cast<double>(train_labels.size());
  }

  // distribution + agreement over the full (labelled) dataset
  std::vector<std::string> sources;
  bool all_gold = true;
  for (const auto& inst : labelled.instances)
    if (!inst.gold_label) {
      all_gold = false;
      break;
    }
  if (all_gold) sources.push_back("gold");
  for (const auto& method : wanted) sources.push_back(method);
  for (const auto& s : sources)
    report.distributions.push_back({s, distribution(labelled, s)});
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (std::size_t j = i + 1; j < sources.size(); ++j)
      report.agreements.push_back({sources[i], sources[j],
                                   agreement(label_column(labelled, sources[i]),
                                             label_column(labelled, sources[j]))});

  report.train_size = train_ds.size();
  report.test_size = test_ds.size();
  report.vocab_size = vocab.size();
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (trained_model_out != nullptr) trained_model_out->emplace(std::move(model));
  return report;
}

namespace {

json metrics_to_json(const MacroMetrics& m) {
  return {{"accuracy", m.accuracy},
          {"macro_precision", m.macro_precision},
          {"macro_recall", m.macro_recall},
          {"macro_f1", m.macro_f1}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10f", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "dataset,experiment,labeller,architecture,seed,acc,macroP,macroR,macroF1";
}

std::string metrics_csv_row(const ExperimentReport& r) {
  std::string row = r.config.dataset_name;
  row += ',';
  row += to_string(r.config.id);
  row += ',';
  row += r.config.train_source;
  row += ',';
  row += models::to_string(r.config.arch);
  row += ',';
  row += std::to_string(r.seed);
  row += ',';
  row += format_double(r.metrics.accuracy);
  row += ',';
  row += format_double(r.metrics.macro_precision);
  row += ',';
  row += format_double(r.metrics.macro_recall);
  row += ',';
  row += format_double(r.metrics.macro_f1);
  return row;
}

std::filesystem::path write_report(const ExperimentReport& r,
                                   const std::filesystem::path& out_dir) {
  const std::string run_name = r.config.dataset_name + "_" + to_string(r.config.id) + "_" +
                               r.config.train_source + "_" + models::to_string(r.config.arch) +
                               "_seed" + std::to_string(r.seed);
  const auto run_dir = out_dir / run_name;
  std::filesystem::create_directories(run_dir);

  json doc;
  doc["dataset"] = r.config.dataset_name;
  doc["experiment"] = to_string(r.config.id);
  doc["train_source"] = r.config.train_source;
  doc["test_source"] = r.config.test_source;
  doc["architecture"] = models::to_string(r.config.arch);
  doc["seed"] = r.seed;
  doc["config"] = {{"learning_rate", r.config.train.learning_rate},
                   {"batch_size", r.config.train.batch_size},
                   {"epochs", r.config.train.epochs},
                   {"dropout", r.config.train.dropout},
                   {"max_len", r.config.train.max_len},
                   {"train_fraction", r.config.train_fraction},
                   {"embed_dim", r.config.embed_dim},
                   {"embeddings_path", r.config.embeddings_path}};
  doc["sizes"] = {{"train", r.train_size}, {"test", r.test_size}, {"vocab", r.vocab_size}};

  json cm = json::array();
  for (const auto& row : r.confusion.counts) cm.push_back(row);
  doc["confusion"] = cm;
  doc["metrics"] = metrics_to_json(r.metrics);
  doc["epoch_mean_metrics"] = metrics_to_json(r.epoch_mean);
  doc["final_train_accuracy"] = r.final_train_accuracy;

  json per_class = json::array();
  static const char* kClassNames[3] = {"positive", "negative", "neutral"};
  for (std::size_t c = 0; c < 3; ++c)
    per_class.push_back({{"class", kClassNames[c]},
                         {"precision", r.per_class[c].precision},
                         {"recall", r.per_class[c].recall},
                         {"f1", r.per_class[c].f1}});
  doc["per_class"] = per_class;

  json epochs = json::array();
  for (std::size_t e = 0; e < r.history.epochs.size(); ++e) {
    json entry = {{"epoch", e},
                  {"train_loss", r.history.epochs[e].train_loss},
                  {"train_accuracy", r.history.epochs[e].train_accuracy}};
    if (e < r.per_epoch.size()) entry["test"] = metrics_to_json(r.per_epoch[e].metrics);
    epochs.push_back(entry);
  }
  doc["epochs"] = epochs;

  json dists = json::array();
  for (const auto& d : r.distributions)
    dists.push_back({{"source", d.source},
                     {"positive", d.dist.positive},
                     {"negative", d.dist.negative},
                     {"neutral", d.dist.neutral}});
  doc["distributions"] = dists;

  json agreements = json::array();
  for (const auto& a : r.agreements)
    agreements.push_back({{"a", a.a}, {"b", a.b}, {"percent", a.percent}});
  doc["agreements"] = agreements;

  if (r.embedding_coverage >= 0.0) doc["embedding_coverage"] = r.embedding_coverage;
  doc["wall_clock_seconds"] = r.wall_clock_seconds;

  std::ofstream json_out(run_dir / "report.json");
  if (!json_out) throw DataError("cannot write report.json in " + run_dir.string());
  json_out << doc.dump(2) << '\n';

  std::ofstream csv_out(run_dir / "metrics.csv");
  if (!csv_out) throw DataError("cannot write metrics.csv in " + run_dir.string());
  csv_out << metrics_csv_header() << '\n' << metrics_csv_row(r) << '\n';

  return run_dir;
}

}  // namespace autolabel::evalx
