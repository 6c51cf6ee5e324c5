#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "autolabel/corpus.hpp"
#include "autolabel/errors.hpp"
#include "autolabel/evalx.hpp"
#include "autolabel/lexlabel.hpp"
#include "autolabel/models.hpp"
#include "autolabel/nn/checks.hpp"
#include "autolabel/nn/kernels.hpp"
#include "autolabel/textprep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace autolabel;

namespace {

// exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct GlobalOpts {
  std::string lexicon_dir;
  std::string stopwords_path;   // empty -> <lexicon_dir>/stopwords.txt
  std::string exceptions_path;  // empty -> <lexicon_dir>/stopword_exceptions.txt
  std::string junk_path;        // empty -> <lexicon_dir>/junk_words.txt
  std::uint64_t seed = 42;
};

fs::path default_data_dir() {
  if (const char* env = std::getenv("AUTOLABEL_DATA_DIR")) return env;
  return "data";
}

lexlabel::Labeller load_labeller(const GlobalOpts& g) {
  return lexlabel::Labeller::load_dir(g.lexicon_dir);
}

textprep::StopwordPolicy load_policy(const GlobalOpts& g) {
  const fs::path dir = g.lexicon_dir;
  const fs::path stop =
      g.stopwords_path.empty() ? dir / "stopwords.txt" : fs::path(g.stopwords_path);
  const fs::path except = g.exceptions_path.empty() ? dir / "stopword_exceptions.txt"
                                                    : fs::path(g.exceptions_path);
  return textprep::load_stopword_policy(stop, except);
}

textprep::WordSet load_junk(const GlobalOpts& g) {
  const fs::path junk =
      g.junk_path.empty() ? fs::path(g.lexicon_dir) / "junk_words.txt" : fs::path(g.junk_path);
  return textprep::load_wordset(junk);
}

std::vector<lexlabel::Method> parse_methods(const std::string& arg) {
  std::vector<lexlabel::Method> methods;
  std::size_t start = 0;
  while (start <= arg.size()) {
    const std::size_t comma = arg.find(',', start);
    const std::string one =
        comma == std::string::npos ? arg.substr(start) : arg.substr(start, comma - start);
    if (!one.empty()) {
      if (one == "all") {
        methods = {lexlabel::Method::Afinn, lexlabel::Method::Vader,
                   lexlabel::Method::TextBlob};
      } else {
        methods.push_back(lexlabel::parse_method(one));
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (methods.empty()) throw UnknownMethod(arg);
  return methods;
}

/// Ensures the requested label column exists, computing it when the source is
/// one of the automatic methods.
corpus::Dataset ensure_column(corpus::Dataset ds, const std::string& source,
                              const GlobalOpts& g,
                              std::optional<lexlabel::Labeller>& labeller) {
  if (source == "gold") {
    for (const auto& inst : ds.instances)
      if (!inst.gold_label) throw MissingLabels("gold", inst.id);
    return ds;
  }
  const auto method = lexlabel::parse_method(source);
  bool have_all = true;
  for (const auto& inst : ds.instances)
    if (inst.auto_labels.find(source) == inst.auto_labels.end()) {
      have_all = false;
      break;
    }
  if (have_all) return ds;
  if (!labeller) labeller.emplace(load_labeller(g));
  return labeller->label_dataset(ds, method);
}

int cmd_label(const GlobalOpts& g, const std::string& in, const std::string& out,
              const std::string& methods_arg) {
  auto ds = corpus::load_dataset(in);
  const auto labeller = load_labeller(g);
  for (const auto method : parse_methods(methods_arg)) ds = labeller.label_dataset(ds, method);
  corpus::save_dataset(ds, out);
  std::cout << "labelled " << ds.size() << " instances -> " << out << '\n';
  return 0;
}

int cmd_agree(const GlobalOpts& g, const std::string& in, const std::string& a,
              const std::string& b) {
  auto ds = corpus::load_dataset(in);
  std::optional<lexlabel::Labeller> labeller;
  ds = ensure_column(std::move(ds), a, g, labeller);
  ds = ensure_column(std::move(ds), b, g, labeller);
  const double pct = evalx::agreement(evalx::label_column(ds, a), evalx::label_column(ds, b));
  std::printf("%.4f\n", pct);
  return 0;
}

int cmd_dist(const GlobalOpts& g, const std::string& in, std::string sources_arg,
             const std::string& out) {
  auto ds = corpus::load_dataset(in);
  std::optional<lexlabel::Labeller> labeller;

  if (sources_arg.empty()) {
    bool has_gold = true;
    for (const auto& inst : ds.instances)
      if (!inst.gold_label) {
        has_gold = false;
        break;
      }
    sources_arg = has_gold ? "gold,textblob,vader,afinn" : "textblob,vader,afinn";
  }

  std::vector<std::string> sources;
  std::size_t start = 0;
  while (start <= sources_arg.size()) {
    const std::size_t comma = sources_arg.find(',', start);
    const std::string one = comma == std::string::npos
                                ? sources_arg.substr(start)
                                : sources_arg.substr(start, comma - start);
    if (!one.empty()) sources.push_back(one);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  std::string csv = "source,positive,negative,neutral\n";
  for (const auto& s : sources) {
    ds = ensure_column(std::move(ds), s, g, labeller);
    const auto d = evalx::distribution(ds, s);
    char line[160];
    std::snprintf(line, sizeof(line), "%s,%.2f,%.2f,%.2f\n", s.c_str(), d.positive, d.negative,
                  d.neutral);
    csv += line;
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot write " + out);
    f << csv;
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

evalx::ExperimentId infer_experiment(const std::string& train_source,
                                     const std::string& test_source) {
  const bool train_auto = train_source != "gold";
  const bool test_auto = test_source != "gold";
  if (!train_auto && !test_auto) return evalx::ExperimentId::E1;
  if (train_auto && test_auto && train_source == test_source) return evalx::ExperimentId::E2;
  if (train_auto && !test_auto) return evalx::ExperimentId::E3;
  throw ConfigViolation("label-source pair (" + train_source + ", " + test_source +
                        ") matches no experiment protocol");
}

struct RunOptions {
  std::string dataset_path;
  std::string dataset_name;
  std::string arch = "bilstm";
  std::string experiment;  // e1|e2|e3; with --method it implies the sources
  std::string method;
  std::string train_source = "gold";
  std::string test_source = "gold";
  std::size_t epochs = 10;
  std::size_t batch_size = 100;
  std::size_t max_len = 30;
  std::size_t embed_dim = 300;
  double train_fraction = 0.8;
  double learning_rate = 0.0;       // 0 -> per-experiment default
  std::vector<double> dropout;      // empty -> per-experiment default
  std::string embeddings;
  std::string out_dir = "runs";
  std::string save_model;
};

evalx::ExperimentConfig make_config(const RunOptions& opts, std::uint64_t seed) {
  evalx::ExperimentConfig cfg;
  cfg.id = infer_experiment(opts.train_source, opts.test_source);
  cfg.train_source = opts.train_source;
  cfg.test_source = opts.test_source;
  cfg.arch = models::parse_architecture(opts.arch);
  cfg.dataset_name = opts.dataset_name;
  cfg.train_fraction = opts.train_fraction;
  cfg.embed_dim = opts.embed_dim;
  cfg.embeddings_path = opts.embeddings;
  cfg.train.seed = seed;
  cfg.train.epochs = opts.epochs;
  cfg.train.batch_size = opts.batch_size;
  cfg.train.max_len = opts.max_len;
  const int eid = static_cast<int>(cfg.id);
  cfg.train.learning_rate =
      opts.learning_rate > 0.0 ? opts.learning_rate : models::default_learning_rate(eid);
  cfg.train.dropout = opts.dropout.empty() ? models::default_dropout(cfg.arch, eid)
                                           : opts.dropout;
  return cfg;
}

int run_one(const evalx::ExperimentConfig& cfg, const corpus::Dataset& ds,
            const evalx::RunDeps& deps, const std::string& out_dir) {
  std::cout << "run " << cfg.dataset_name << ' ' << evalx::to_string(cfg.id) << ' '
            << cfg.train_source << '/' << cfg.test_source << ' '
            << models::to_string(cfg.arch) << " seed " << cfg.train.seed << '\n';
  const auto report = evalx::run_experiment(cfg, ds, deps);
  const auto run_dir = evalx::write_report(report, out_dir);
  std::printf("  acc %.4f  macroP %.4f  macroR %.4f  macroF1 %.4f  (%.1fs)\n",
              report.metrics.accuracy, report.metrics.macro_precision,
              report.metrics.macro_recall, report.metrics.macro_f1,
              report.wall_clock_seconds);
  std::cout << "  report: " << run_dir.string() << '\n';
  return 0;
}

int cmd_train(const GlobalOpts& g, const RunOptions& opts_in) {
  RunOptions opts = opts_in;
  if (!opts.experiment.empty()) {
    switch (evalx::parse_experiment(opts.experiment)) {
      case evalx::ExperimentId::E1:
        opts.train_source = opts.test_source = "gold";
        break;
      case evalx::ExperimentId::E2:
        if (opts.method.empty()) throw ConfigViolation("--experiment e2 needs --method");
        opts.train_source = opts.test_source = opts.method;
        break;
      case evalx::ExperimentId::E3:
        if (opts.method.empty()) throw ConfigViolation("--experiment e3 needs --method");
        opts.train_source = opts.method;
        opts.test_source = "gold";
        break;
    }
  }
  auto ds = corpus::load_dataset(opts.dataset_path);
  if (opts.dataset_name.empty()) opts.dataset_name = ds.name;

  evalx::RunDeps deps;
  std::optional<lexlabel::Labeller> labeller;
  if (opts.train_source != "gold" || opts.test_source != "gold") {
    labeller.emplace(load_labeller(g));
    deps.labeller = &*labeller;
  }
  deps.stopwords = load_policy(g);
  deps.junk_words = load_junk(g);

  const auto cfg = make_config(opts, g.seed);

  if (!opts.save_model.empty()) {
    std::optional<models::ModelF> model;
    const auto report = evalx::run_experiment(cfg, ds, deps, &model);
    const auto run_dir = evalx::write_report(report, opts.out_dir);
    std::printf("acc %.4f  macroF1 %.4f\n", report.metrics.accuracy, report.metrics.macro_f1);
    std::cout << "report: " << run_dir.string() << '\n';
    models::save_model(*model, opts.save_model);
    std::cout << "model: " << opts.save_model << '\n';
    return 0;
  }

  return run_one(cfg, ds, deps, opts.out_dir);
}

int cmd_experiment(const GlobalOpts& g, const std::string& config_path,
                   const std::string& out_dir_override, std::size_t jobs) {
  std::ifstream f(config_path);
  if (!f) throw DataError("cannot open config file: " + config_path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigViolation(std::string("bad experiment config: ") + e.what());
  }

  const std::string ds_path = doc.at("dataset").get<std::string>();
  auto ds = corpus::load_dataset(ds_path);
  const std::string ds_name = doc.value("dataset_name", ds.name);

  const auto experiments = doc.value("experiments", std::vector<std::string>{"e1", "e2", "e3"});
  const auto methods =
      doc.value("methods", std::vector<std::string>{"afinn", "textblob", "vader"});
  const auto archs =
      doc.value("architectures", std::vector<std::string>{"cnn", "bilstm", "cnn-bilstm"});
  const std::uint64_t seed = doc.value("seed", g.seed);
  const std::string out_dir =
      !out_dir_override.empty() ? out_dir_override : doc.value("out_dir", std::string("runs"));

  evalx::RunDeps deps;
  std::optional<lexlabel::Labeller> labeller;
  bool needs_lexicons = false;
  for (const auto& e : experiments)
    if (e != "e1") needs_lexicons = true;
  if (needs_lexicons) {
    labeller.emplace(load_labeller(g));
    deps.labeller = &*labeller;
  }
  deps.stopwords = load_policy(g);
  deps.junk_words = load_junk(g);

  std::vector<evalx::ExperimentConfig> configs;
  for (const auto& e : experiments) {
    const auto id = evalx::parse_experiment(e);
    const std::vector<std::string> sources =
        id == evalx::ExperimentId::E1 ? std::vector<std::string>{"gold"} : methods;
    for (const auto& arch : archs) {
      for (const auto& source : sources) {
        RunOptions opts;
        opts.dataset_name = ds_name;
        opts.arch = arch;
        opts.train_source = source;
        opts.test_source = id == evalx::ExperimentId::E2 ? source : "gold";
        opts.epochs = doc.value("epochs", std::size_t{10});
        opts.batch_size = doc.value("batch_size", std::size_t{100});
        opts.max_len = doc.value("max_len", std::size_t{30});
        opts.embed_dim = doc.value("embed_dim", std::size_t{300});
        opts.train_fraction = doc.value("train_fraction", 0.8);
        opts.learning_rate = doc.value("learning_rate", 0.0);
        opts.embeddings = doc.value("embeddings", std::string());
        configs.push_back(make_config(opts, seed));
      }
    }
  }

  std::vector<std::string> rows(configs.size());
  std::mutex io_mutex;
  std::size_t next = 0;
  std::mutex next_mutex;

  auto worker = [&]() {
    while (true) {
      std::size_t idx;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= configs.size()) return;
        idx = next++;
      }
      const auto report = evalx::run_experiment(configs[idx], ds, deps);
      evalx::write_report(report, out_dir);
      rows[idx] = evalx::metrics_csv_row(report);
      std::lock_guard<std::mutex> lock(io_mutex);
      std::printf("[%zu/%zu] %s %s %s acc %.4f\n", idx + 1, configs.size(),
                  evalx::to_string(report.config.id), report.config.train_source.c_str(),
                  models::to_string(report.config.arch), report.metrics.accuracy);
      std::fflush(stdout);
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  fs::create_directories(out_dir);
  const fs::path summary = fs::path(out_dir) / "summary.csv";
  std::ofstream out(summary);
  if (!out) throw DataError("cannot write " + summary.string());
  out << evalx::metrics_csv_header() << '\n';
  for (const auto& row : rows) out << row << '\n';
  std::cout << "summary: " << summary.string() << '\n';
  return 0;
}

int cmd_gradcheck(double eps, std::size_t sample) {
  std::cout << "kernel backend: " << nn::kernels::to_string(nn::kernels::active_backend())
            << '\n';
  bool ok = true;
  for (const auto& check : nn::layer_gradient_checks(eps, sample)) {
    std::printf("layer %-22s max rel err %.3e  (tol %.0e)  %s\n", check.name.c_str(),
                check.max_rel_error, check.threshold, check.passed() ? "ok" : "FAIL");
    ok = ok && check.passed();
  }
  for (const auto& check : nn::architecture_gradient_checks(eps, sample)) {
    std::printf("arch  %-22s max rel err %.3e  (tol %.0e)  %s\n", check.name.c_str(),
                check.max_rel_error, check.threshold, check.passed() ? "ok" : "FAIL");
    ok = ok && check.passed();
  }
  if (!ok) throw NumericError("gradient check failed");
  return 0;
}

int cmd_report(const std::string& runs_dir, const std::string& out_path) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(runs_dir))
    if (entry.is_regular_file() && entry.path().filename() == "metrics.csv" &&
        entry.path().parent_path() != fs::path(runs_dir))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no metrics.csv files under " + runs_dir);

  std::string csv = evalx::metrics_csv_header() + "\n";
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line))
      if (!line.empty()) csv += line + "\n";
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write " + out_path);
    out << csv;
    std::cout << "wrote " << out_path << " (" << files.size() << " runs)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexicon-based sentiment labelling and model benchmarking"};
  app.require_subcommand(1);

  GlobalOpts g;
  g.lexicon_dir = default_data_dir().string();
  app.add_option("--lexicon-dir", g.lexicon_dir,
                 "directory with lexicon/wordlist files (env AUTOLABEL_DATA_DIR)");
  app.add_option("--seed", g.seed, "base seed for every random choice (default 42)");
  app.add_option("--stopwords", g.stopwords_path, "stopword list override");
  app.add_option("--stopword-exceptions", g.exceptions_path, "stopword exception override");
  app.add_option("--junk-words", g.junk_path, "junk word list override");

  std::string in, out, methods = "afinn", col_a = "gold", col_b = "afinn", sources;
  RunOptions run_opts;
  std::string exp_config, runs_dir = "runs", report_out;
  std::size_t jobs = 1;
  double gc_eps = 1e-5;
  std::size_t gc_sample = 200;

  auto* label_cmd = app.add_subcommand("label", "assign automatic labels to a dataset");
  label_cmd->add_option("--in", in, "input TSV")->required();
  label_cmd->add_option("--out", out, "output TSV")->required();
  label_cmd->add_option("--method", methods, "afinn|vader|textblob|all (comma list)");

  auto* agree_cmd = app.add_subcommand("agree", "percentage of equal labels in two columns");
  agree_cmd->add_option("--in", in, "input TSV")->required();
  agree_cmd->add_option("--a", col_a, "first column (gold or method)");
  agree_cmd->add_option("--b", col_b, "second column (gold or method)");

  auto* dist_cmd = app.add_subcommand("dist", "label distribution per source, CSV");
  dist_cmd->add_option("--in", in, "input TSV")->required();
  dist_cmd->add_option("--sources", sources, "comma list (default: all available)");
  dist_cmd->add_option("--out", out, "output CSV (default stdout)");

  auto* train_cmd = app.add_subcommand("train", "one model run");
  train_cmd->add_option("--in", run_opts.dataset_path, "input TSV")->required();
  train_cmd->add_option("--arch", run_opts.arch, "cnn|bilstm|cnn-bilstm");
  train_cmd->add_option("--experiment", run_opts.experiment,
                        "e1|e2|e3 (picks label sources with --method)");
  train_cmd->add_option("--method", run_opts.method, "afinn|vader|textblob for --experiment");
  train_cmd->add_option("--train-labels", run_opts.train_source, "gold or method");
  train_cmd->add_option("--test-labels", run_opts.test_source, "gold or method");
  train_cmd->add_option("--epochs", run_opts.epochs);
  train_cmd->add_option("--batch-size", run_opts.batch_size);
  train_cmd->add_option("--lr", run_opts.learning_rate, "0 = experiment default");
  train_cmd->add_option("--dropout", run_opts.dropout, "dropout schedule");
  train_cmd->add_option("--max-len", run_opts.max_len);
  train_cmd->add_option("--embed-dim", run_opts.embed_dim);
  train_cmd->add_option("--embeddings", run_opts.embeddings, "pretrained vectors (txt or .gz)");
  train_cmd->add_option("--fraction", run_opts.train_fraction);
  train_cmd->add_option("--dataset-name", run_opts.dataset_name);
  train_cmd->add_option("--out-dir", run_opts.out_dir);
  train_cmd->add_option("--save-model", run_opts.save_model, "checkpoint path");

  auto* exp_cmd = app.add_subcommand("experiment", "experiment matrix from a config file");
  exp_cmd->add_option("--config", exp_config, "JSON config")->required();
  exp_cmd->add_option("--out-dir", out, "override output directory");
  exp_cmd->add_option("--jobs", jobs, "parallel runs (default 1)");

  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  gc_cmd->add_option("--eps", gc_eps, "central difference step");
  gc_cmd->add_option("--sample", gc_sample, "max coordinates per parameter tensor");

  auto* report_cmd = app.add_subcommand("report", "aggregate run directories into one CSV");
  report_cmd->add_option("--runs", runs_dir, "runs directory");
  report_cmd->add_option("--out", report_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (label_cmd->parsed()) return cmd_label(g, in, out, methods);
    if (agree_cmd->parsed()) return cmd_agree(g, in, col_a, col_b);
    if (dist_cmd->parsed()) return cmd_dist(g, in, sources, out);
    if (train_cmd->parsed()) return cmd_train(g, run_opts);
    if (exp_cmd->parsed()) return cmd_experiment(g, exp_config, out, jobs);
    if (gc_cmd->parsed()) return cmd_gradcheck(gc_eps, gc_sample);
    if (report_cmd->parsed()) return cmd_report(runs_dir, report_out);
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
