// physioemo: synthetic data, ingestion checks, dataset analysis and
// leave-one-subject-out evaluation from the command line.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "physioemo/analysis.hpp"
#include "physioemo/dataset.hpp"
#include "physioemo/error.hpp"
#include "physioemo/eval.hpp"
#include "physioemo/run_config.hpp"
#include "physioemo/synth.hpp"
#include "physioemo/text.hpp"

namespace fs = std::filesystem;
using namespace physioemo;

namespace {

constexpr int kPipelineError = 1;
constexpr int kUsageError = 2;
constexpr const char* kDataEnv = "PHYSIOEMO_DATA";

std::string default_data_root() {
  const char* v = std::getenv(kDataEnv);
  return v ? v : "";
}

std::string require_data(const std::string& data) {
  if (data.empty())
    throw Error(ErrorKind::InvalidConfig,
                std::string("no dataset given; pass --data or set ") + kDataEnv);
  return data;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir + "': " + ec.message());
}

struct SynthArgs {
  GeneratorSpec spec;
  std::string out;
  std::string link = "nonlinear";
  std::vector<double> phases{20.0, 20.0, 20.0, 20.0};
  std::size_t jobs = 1;
};

int cmd_synth(SynthArgs& a) {
  const auto link = parse_link(a.link);
  if (!link) throw Error(ErrorKind::InvalidConfig, "--link must be linear or nonlinear");
  a.spec.link = *link;
  std::copy(a.phases.begin(), a.phases.end(), a.spec.phase_minutes.begin());
  const auto ids = generate(a.spec, a.out, a.jobs);
  std::cout << "wrote " << ids.size() << " participants to " << a.out << "\n";
  return 0;
}

struct DataArgs {
  std::string data = default_data_root();
  double rate = kDefaultAlignmentRate;
  std::size_t window = kDefaultSmoothingWindow;
  std::size_t jobs = 1;

  PipelineOptions options() const {
    PipelineOptions o;
    o.rate = rate;
    o.window = window;
    return o;
  }
};

int cmd_ingest_check(const DataArgs& a) {
  const auto d = load_dataset(require_data(a.data), a.options(), a.jobs);
  for (const auto& p : d.participants)
    std::cout << p.id << " rows=" << p.features.rows() << " dropped_label_rows="
              << p.dropped_label_rows << " unmatched_rows=" << p.unmatched_rows << "\n";
  std::cout << d.participants.size() << " participants OK\n";
  return 0;
}

int cmd_analyze(const DataArgs& a, const std::string& out) {
  const auto d = load_dataset(require_data(a.data), a.options(), a.jobs);
  Eigen::Index rows = 0;
  for (const auto& p : d.participants) rows += p.features.rows();
  Eigen::MatrixXd features(rows, static_cast<Eigen::Index>(kChannelCount));
  Eigen::MatrixXd intensities(rows, static_cast<Eigen::Index>(kEmotionCount));
  Eigen::Index at = 0;
  for (const auto& p : d.participants) {
    features.middleRows(at, p.features.rows()) = p.features;
    intensities.middleRows(at, p.features.rows()) = p.intensities;
    at += p.features.rows();
  }

  Eigen::MatrixXd joint(rows, features.cols() + intensities.cols());
  joint << features, intensities;
  auto names = channel_names();
  for (auto& e : emotion_names()) names.push_back(e);
  const auto corr = pearson_matrix(joint, names);

  // Channels have unrelated units, so PCA runs on z-scored features.
  const FeatureMatrix fm(features, channel_names(), "all");
  const auto z = apply_zscore(fm, fit_zscore(fm));
  const auto pca = pca_project(z.values(), 2);
  const auto labels = dominant_emotions(intensities);

  EmotionBaselineTable table{};
  for (std::size_t e = 0; e < kEmotionCount; ++e)
    table[e] = baseline_of(static_cast<Emotion>(e), intensities.col(static_cast<Eigen::Index>(e)));

  ensure_dir(out);
  const fs::path base(out);
  text::write_file((base / "correlations.csv").string(), format_correlations_csv(corr));
  text::write_file((base / "pca_projection.csv").string(), format_projection_csv(pca, labels));
  text::write_file((base / "pca_centroids.csv").string(),
                   format_centroids_csv(pca_centroids(pca.projected, labels)));
  text::write_file((base / "baseline_table.txt").string(), format_baseline_table(table));
  std::cout << "explained variance: " << text::format_fixed(pca.explained_variance[0], 4) << ", "
            << text::format_fixed(pca.explained_variance[1], 4) << "\n"
            << "wrote correlations.csv, pca_projection.csv, pca_centroids.csv, baseline_table.txt to "
            << out << "\n";
  return 0;
}

std::string render_tables(const ResultTable& table) {
  std::size_t folds = 0;
  for (const auto& r : table.rows) folds = std::max(folds, r.folds);
  const std::string scope =
      "LOSO (leave-one-subject-out), mean over " + std::to_string(folds) + " folds";
  return "r^2 scores, " + scope + " (higher is better)\n" +
         format_result_table(table, TableMetric::R2) + "\nMSE, " + scope +
         " (lower is better)\n" + format_result_table(table, TableMetric::Mse);
}

void write_tables(const ResultTable& table, const std::string& out) {
  const fs::path base(out);
  text::write_file((base / "r2_table.txt").string(), format_result_table(table, TableMetric::R2));
  text::write_file((base / "mse_table.txt").string(), format_result_table(table, TableMetric::Mse));
}

struct EvalArgs {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

int cmd_evaluate(const EvalArgs& a) {
  auto cfg = parse_run_config(text::read_file(a.config));
  // Relative paths in the config resolve against the config's directory.
  const auto rel = [&](const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(a.config).parent_path() / p).lexically_normal().string();
  };
  cfg.data_root = a.data.empty() ? rel(cfg.data_root) : a.data;
  if (cfg.data_root.empty()) cfg.data_root = default_data_root();
  cfg.output_dir = a.out.empty() ? rel(cfg.output_dir) : a.out;
  if (a.seed) {
    cfg.seed = *a.seed;
    for (auto& m : cfg.models) m.set_seed(*a.seed);
  }
  if (a.jobs) cfg.jobs = *a.jobs;
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  const auto dataset = load_dataset(cfg.data_root, cfg.pipeline, cfg.jobs);
  EvalOptions opts;
  opts.seed = cfg.seed;
  opts.jobs = cfg.jobs;
  opts.targets = cfg.pipeline.targets;
  const auto result = run_experiment(dataset, cfg.models, opts);

  ensure_dir(cfg.output_dir);
  text::write_file((fs::path(cfg.output_dir) / "results.csv").string(),
                   format_results_csv(result.records));
  write_tables(result.table, cfg.output_dir);
  std::cout << render_tables(result.table);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "evaluated " << cfg.models.size() << " models on " << dataset.participants.size()
            << " folds in " << text::format_fixed(secs, 1) << " s\n";
  return 0;
}

int cmd_report(const std::string& results, const std::string& out) {
  const auto table = aggregate(parse_results_csv(text::read_file(results)));
  if (!out.empty()) {
    ensure_dir(out);
    write_tables(table, out);
  }
  std::cout << render_tables(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-intensity regression from wearable signals"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic TSST-shaped dataset");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--participants", synth.spec.n_participants, "Participant count")
      ->capture_default_str();
  s->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  s->add_option("--rate", synth.spec.rate, "Sample rate in Hz")->capture_default_str();
  s->add_option("--link", synth.link, "Emotion link: linear or nonlinear")->capture_default_str();
  s->add_option("--noise", synth.spec.noise_std, "Label noise std")->capture_default_str();
  s->add_option("--phase-minutes", synth.phases,
                "Durations of pre-stress, stress, recovery, late recovery")
      ->expected(4)
      ->capture_default_str();
  s->add_option("--window", synth.spec.window, "Smoothing window the link is defined on")
      ->capture_default_str();
  s->add_option("--jobs", synth.jobs, "Worker threads")->capture_default_str();

  const auto add_data_opts = [](CLI::App* c, DataArgs& d) {
    c->add_option("--data", d.data,
                  std::string("Dataset root (default: $") + kDataEnv + ")");
    c->add_option("--rate", d.rate, "Alignment rate in Hz")->capture_default_str();
    c->add_option("--window", d.window, "Moving-average window in samples")->capture_default_str();
    c->add_option("--jobs", d.jobs, "Worker threads")->capture_default_str();
  };

  DataArgs check;
  auto* ic = app.add_subcommand("ingest-check", "Load and validate every participant");
  add_data_opts(ic, check);

  DataArgs analyze;
  std::string analyze_out;
  auto* an = app.add_subcommand("analyze", "Write correlation, PCA and baseline statistics");
  add_data_opts(an, analyze);
  an->add_option("--out", analyze_out, "Output directory")->required();

  EvalArgs eval;
  auto* ev = app.add_subcommand("evaluate", "Leave-one-subject-out evaluation from a config file");
  ev->add_option("config", eval.config, "key=value experiment file")->required()->check(CLI::ExistingFile);
  ev->add_option("--data", eval.data, std::string("Override dataset root (default: config, then $") +
                                          kDataEnv + ")");
  ev->add_option("--out", eval.out, "Override output directory");
  ev->add_option("--seed", eval.seed, "Override global seed");
  ev->add_option("--jobs", eval.jobs, "Override worker threads");

  std::string results, report_out;
  auto* rp = app.add_subcommand("report", "Re-render r^2 and MSE tables from results.csv");
  rp->add_option("results", results, "results.csv from evaluate")->required()->check(CLI::ExistingFile);
  rp->add_option("--out", report_out, "Also write r2_table.txt and mse_table.txt here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (s->parsed()) return cmd_synth(synth);
    if (ic->parsed()) return cmd_ingest_check(check);
    if (an->parsed()) return cmd_analyze(analyze, analyze_out);
    if (ev->parsed()) return cmd_evaluate(eval);
    if (rp->parsed()) return cmd_report(results, report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidConfig ? kUsageError : kPipelineError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipelineError;
  }
  return kUsageError;
}
