#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "physioemo/dataset.hpp"
#include "physioemo/labels.hpp"
#include "physioemo/models.hpp"
#include "physioemo/preprocess.hpp"

namespace physioemo {

struct Fold {
  std::vector<std::string> train_ids;
  std::string test_id;
};

/// One fold per participant, ordered by id. Throws TooFewParticipants (< 2)
/// and InvalidConfig on duplicate ids.
std::vector<Fold> loso_split(std::vector<std::string> participant_ids);

/// Everything fitted for one held-out participant and one model config.
struct FoldArtifacts {
  std::string held_out;
  NormStats norm;
  TargetScaling scaling;
  std::vector<std::unique_ptr<TrainedModel>> models;  ///< one per target
};

/// Seed of the model for (config family, target) in the fold holding out
/// `held_out`.
std::uint64_t fold_model_seed(std::uint64_t global_seed, ModelFamily family, Emotion target,
                              const std::string& held_out);

/// Fits normalization, target scaling and one model per target on every
/// participant except `held_out`. `held_out` need not be in the dataset.
FoldArtifacts train_fold(const Dataset& dataset, const std::string& held_out,
                         const ModelConfig& config, const std::vector<Emotion>& targets,
                         std::uint64_t global_seed);

/// One metric pair of the machine-readable results.
struct FoldRecord {
  ModelFamily family;
  Emotion emotion;
  std::size_t fold = 0;  ///< 1-based, in participant order
  std::string participant;
  double r2 = 0.0;   ///< NaN when the held-out targets have zero variance
  double mse = 0.0;
};

struct FoldResult {
  std::string held_out;
  ModelFamily family;
  std::vector<double> r2;   ///< per target
  std::vector<double> mse;  ///< per target
  std::size_t test_rows = 0;
  double wall_seconds = 0.0;
};

struct ResultRow {
  ModelFamily family;
  std::vector<double> mean_r2;          ///< per table column
  std::vector<double> mean_mse;
  std::vector<std::size_t> r2_excluded;  ///< folds with undefined r²
  std::size_t folds = 0;
};

/// Model x emotion means, rows in report order, columns sorted by emotion name.
struct ResultTable {
  std::vector<Emotion> columns;
  std::vector<ResultRow> rows;
};

ResultTable aggregate(const std::vector<FoldRecord>& records);

struct EvalOptions {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::vector<Emotion> targets = kDefaultTargets;
};

struct ExperimentResult {
  std::vector<FoldResult> folds;     ///< config-major, folds in participant order
  std::vector<FoldRecord> records;   ///< same order, one per target
  ResultTable table;
};

/// Leave-one-subject-out run of every config. Fold errors are rethrown with
/// the fold and model prefixed. Results do not depend on options.jobs.
ExperimentResult run_experiment(const Dataset& dataset, const std::vector<ModelConfig>& configs,
                                const EvalOptions& options);

enum class TableMetric { R2, Mse };

/// Aligned text table: "ML Model" column then one column per emotion.
std::string format_result_table(const ResultTable& table, TableMetric metric);

/// `model,emotion,fold,participant,r2,mse` with a header row.
std::string format_results_csv(const std::vector<FoldRecord>& records);
std::vector<FoldRecord> parse_results_csv(std::string_view contents);

}  // namespace physioemo
