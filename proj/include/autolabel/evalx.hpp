#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autolabel/corpus.hpp"
#include "autolabel/label.hpp"
#include "autolabel/lexlabel.hpp"
#include "autolabel/models.hpp"
#include "autolabel/textprep.hpp"

namespace autolabel::evalx {

/// Rows are true class, columns predicted; order (Positive, Negative, Neutral).
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 3>, 3> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
};

ConfusionMatrix confusion(const std::vector<SentimentLabel>& y_true,
                          const std::vector<SentimentLabel>& y_pred);

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MacroMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Zero-denominator conventions: precision/recall are 0 when their denominator
/// is 0, F1 is 0 when P + R is 0. Macro values are unweighted 3-class means;
/// per-class F1 is macro-averaged (not the F1 of macro-P/macro-R).
MacroMetrics macro_metrics(const ConfusionMatrix& cm);
std::array<PerClassMetrics, 3> per_class_metrics(const ConfusionMatrix& cm);

/// Percentage in [0, 100] of positions with equal labels.
double agreement(const std::vector<SentimentLabel>& a, const std::vector<SentimentLabel>& b);

struct Distribution {
  double positive = 0.0;
  double negative = 0.0;
  double neutral = 0.0;
};

/// Extracts a label column from a dataset; source is "gold" or a method name.
/// Throws MissingLabels when any instance lacks it.
std::vector<SentimentLabel> label_column(const corpus::Dataset& ds, const std::string& source);

/// Per-label percentages (sum to 100) for one label source.
Distribution distribution(const corpus::Dataset& ds, const std::string& source);

enum class ExperimentId { E1 = 1, E2 = 2, E3 = 3 };

const char* to_string(ExperimentId id);
ExperimentId parse_experiment(std::string_view name);  // "e1"/"e2"/"e3"

struct ExperimentConfig {
  ExperimentId id = ExperimentId::E1;
  std::string train_source = "gold";  // gold | afinn | textblob | vader
  std::string test_source = "gold";
  models::Architecture arch = models::Architecture::BiLSTM;
  models::TrainConfig train;
  std::string dataset_name;
  double train_fraction = 0.8;
  std::size_t embed_dim = 300;
  std::string embeddings_path;  // empty -> seeded random embeddings

  /// E1 must be gold/gold, E2 the same automatic source twice, E3 an
  /// automatic train source against gold test labels.
  void validate() const;  // throws ConfigViolation
};

struct AgreementStat {
  std::string a, b;
  double percent = 0.0;
};

struct DistributionRow {
  std::string source;
  Distribution dist;
};

struct EpochTestMetrics {
  std::size_t epoch = 0;
  MacroMetrics metrics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  ConfusionMatrix confusion;
  MacroMetrics metrics;                       // final-epoch
  MacroMetrics epoch_mean;                    // mean of per-epoch test metrics
  std::array<PerClassMetrics, 3> per_class{};
  std::vector<EpochTestMetrics> per_epoch;
  models::TrainHistory history;
  double final_train_accuracy = 0.0;           // eval-mode pass over the train split
  std::vector<DistributionRow> distributions;  // over the full dataset
  std::vector<AgreementStat> agreements;       // over the full dataset
  double embedding_coverage = -1.0;            // -1 when random embeddings
  double wall_clock_seconds = 0.0;
  std::size_t train_size = 0, test_size = 0, vocab_size = 0;
};

struct RunDeps {
  const lexlabel::Labeller* labeller = nullptr;  // required for automatic sources
  textprep::StopwordPolicy stopwords;
  textprep::WordSet junk_words;
};

/// Full protocol: label (if needed) -> shared seeded split -> preprocess ->
/// encode (vocab from the train split only) -> build -> train -> test metrics
/// against the test label source. When trained_model_out is non-null it
/// receives the trained model (for checkpointing).
ExperimentReport run_experiment(const ExperimentConfig& cfg, const corpus::Dataset& ds,
                                const RunDeps& deps,
                                std::optional<models::ModelF>* trained_model_out = nullptr);

/// One directory per run: report.json plus a one-row metrics.csv.
/// Returns the run directory.
std::filesystem::path write_report(const ExperimentReport& report,
                                   const std::filesystem::path& out_dir);

std::string metrics_csv_header();
std::string metrics_csv_row(const ExperimentReport& report);

}  // namespace autolabel::evalx
