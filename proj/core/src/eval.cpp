#include "physioemo/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "parallel.hpp"
#include "physioemo/error.hpp"
#include "physioemo/metrics.hpp"
#include "physioemo/rng.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

std::vector<Fold> loso_split(std::vector<std::string> ids) {
  if (ids.size() < 2)
    throw Error(ErrorKind::TooFewParticipants,
                "leave-one-subject-out needs >= 2 participants, got " + std::to_string(ids.size()));
  std::sort(ids.begin(), ids.end());
  if (const auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end())
    throw Error(ErrorKind::InvalidConfig, "duplicate participant id '" + *dup + "'", *dup);
  std::vector<Fold> folds;
  folds.reserve(ids.size());
  for (const auto& test : ids) {
    Fold f;
    f.test_id = test;
    for (const auto& id : ids)
      if (id != test) f.train_ids.push_back(id);
    folds.push_back(std::move(f));
  }
  return folds;
}

std::uint64_t fold_model_seed(std::uint64_t global_seed, ModelFamily family, Emotion target,
                              const std::string& held_out) {
  return derive_seed(global_seed,
                     "model:" + std::string(family_tag(family)) + ":" +
                         std::string(emotion_name(target)),
                     held_out);
}

namespace {

std::vector<const PreparedParticipant*> training_set(const Dataset& d, const std::string& held_out) {
  std::vector<const PreparedParticipant*> out;
  for (const auto& p : d.participants)
    if (p.id != held_out) out.push_back(&p);
  return out;
}

}  // namespace

FoldArtifacts train_fold(const Dataset& dataset, const std::string& held_out,
                         const ModelConfig& config, const std::vector<Emotion>& targets,
                         std::uint64_t global_seed) {
  const auto train = training_set(dataset, held_out);
  if (train.empty())
    throw Error(ErrorKind::TooFewParticipants, "no training participants besides " + held_out);
  Eigen::Index rows = 0;
  for (const auto* p : train) rows += p->features.rows();
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(kChannelCount));
  Eigen::MatrixXd raw(rows, static_cast<Eigen::Index>(targets.size()));
  Eigen::Index at = 0;
  for (const auto* p : train) {
    x.middleRows(at, p->features.rows()) = p->features;
    raw.middleRows(at, p->features.rows()) = target_columns(p->intensities, targets);
    at += p->features.rows();
  }

  FoldArtifacts out;
  out.held_out = held_out;
  const FeatureMatrix train_x(std::move(x), channel_names(), "train");
  out.norm = fit_zscore(train_x);
  const FeatureMatrix xn = apply_zscore(train_x, out.norm);
  out.scaling = fit_target_scaling(raw, targets);
  const Eigen::MatrixXd y = out.scaling.apply(raw);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    ModelConfig c = config;
    c.set_seed(fold_model_seed(global_seed, config.family(), targets[k], held_out));
    out.models.push_back(fit(c, xn, y.col(static_cast<Eigen::Index>(k))));
  }
  return out;
}

ResultTable aggregate(const std::vector<FoldRecord>& records) {
  ResultTable table;
  std::set<std::string_view> names;
  for (const auto& r : records) names.insert(emotion_name(r.emotion));
  for (auto n : names) table.columns.push_back(*parse_emotion(n));

  for (const auto family : all_families()) {
    ResultRow row;
    row.family = family;
    const std::size_t m = table.columns.size();
    row.mean_r2.assign(m, 0.0);
    row.mean_mse.assign(m, 0.0);
    row.r2_excluded.assign(m, 0);
    std::vector<std::size_t> r2_n(m, 0), mse_n(m, 0);
    std::set<std::size_t> folds;
    bool any = false;
    for (const auto& r : records) {
      if (r.family != family) continue;
      any = true;
      folds.insert(r.fold);
      const auto k = static_cast<std::size_t>(
          std::find(table.columns.begin(), table.columns.end(), r.emotion) - table.columns.begin());
      if (std::isnan(r.r2)) {
        ++row.r2_excluded[k];
      } else {
        row.mean_r2[k] += r.r2;
        ++r2_n[k];
      }
      row.mean_mse[k] += r.mse;
      ++mse_n[k];
    }
    if (!any) continue;
    for (std::size_t k = 0; k < m; ++k) {
      row.mean_r2[k] = r2_n[k] ? row.mean_r2[k] / static_cast<double>(r2_n[k]) : std::nan("");
      row.mean_mse[k] = mse_n[k] ? row.mean_mse[k] / static_cast<double>(mse_n[k]) : std::nan("");
    }
    row.folds = folds.size();
    table.rows.push_back(std::move(row));
  }
  return table;
}

ExperimentResult run_experiment(const Dataset& dataset, const std::vector<ModelConfig>& configs,
                                const EvalOptions& options) {
  if (configs.empty()) throw Error(ErrorKind::InvalidConfig, "no model configs given");
  if (options.targets.empty()) throw Error(ErrorKind::InvalidConfig, "no target emotions given");
  {
    std::set<ModelFamily> seen;
    for (const auto& c : configs)
      if (!seen.insert(c.family()).second)
        throw Error(ErrorKind::InvalidConfig,
                    "model " + std::string(family_tag(c.family())) + " listed twice");
  }
  const auto folds = loso_split(dataset.ids());
  const std::size_t n_folds = folds.size();
  const std::size_t t = options.targets.size();

  ExperimentResult result;
  result.folds.resize(configs.size() * n_folds);
  detail::parallel_for(result.folds.size(), options.jobs, [&](std::size_t job) {
    const auto& config = configs[job / n_folds];
    const auto& fold = folds[job % n_folds];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto artifacts =
          train_fold(dataset, fold.test_id, config, options.targets, options.seed);
      const auto& test = dataset.at(fold.test_id);
      const auto xt = apply_zscore(test.feature_matrix(), artifacts.norm);
      const Eigen::MatrixXd yt =
          artifacts.scaling.apply(target_columns(test.intensities, options.targets));
      FoldResult& fr = result.folds[job];
      fr.held_out = fold.test_id;
      fr.family = config.family();
      fr.test_rows = static_cast<std::size_t>(xt.rows());
      for (std::size_t k = 0; k < t; ++k) {
        const Eigen::VectorXd y = yt.col(static_cast<Eigen::Index>(k));
        const Eigen::VectorXd yhat = artifacts.models[k]->predict(xt);
        const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
        const std::span<const double> ps(yhat.data(), static_cast<std::size_t>(yhat.size()));
        double r2;
        try {
          r2 = r2_score(ys, ps);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ZeroVariance) throw;
          r2 = std::nan("");
        }
        fr.r2.push_back(r2);
        fr.mse.push_back(mse(ys, ps));
      }
    } catch (const Error& e) {
      throw e.annotated("fold " + std::to_string(job % n_folds + 1) + " (held out " +
                        fold.test_id + ", " + std::string(family_tag(config.family())) + ")");
    }
    result.folds[job].wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t job = 0; job < result.folds.size(); ++job) {
    const auto& fr = result.folds[job];
    for (std::size_t k = 0; k < t; ++k)
      result.records.push_back(
          FoldRecord{fr.family, options.targets[k], job % n_folds + 1, fr.held_out, fr.r2[k],
                     fr.mse[k]});
  }
  result.table = aggregate(result.records);
  return result;
}

std::string format_result_table(const ResultTable& table, TableMetric metric) {
  const std::string head = "ML Model";
  std::size_t name_w = head.size();
  for (const auto& r : table.rows) name_w = std::max(name_w, family_display_name(r.family).size());
  name_w += 2;
  std::vector<std::size_t> col_w;
  for (auto e : table.columns) col_w.push_back(std::max<std::size_t>(emotion_name(e).size(), 8) + 2);

  const auto pad_right = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  const auto pad_left = [](const std::string& s, std::size_t w) {
    return std::string(w > s.size() ? w - s.size() : 0, ' ') + s;
  };

  std::string out = pad_right(head, name_w);
  for (std::size_t k = 0; k < table.columns.size(); ++k)
    out += pad_left(std::string(emotion_name(table.columns[k])), col_w[k]);
  out += "\n";
  for (const auto& r : table.rows) {
    out += pad_right(std::string(family_display_name(r.family)), name_w);
    const auto& values = metric == TableMetric::R2 ? r.mean_r2 : r.mean_mse;
    for (std::size_t k = 0; k < values.size(); ++k)
      out += pad_left(text::format_fixed(values[k], 4), col_w[k]);
    out += "\n";
  }
  if (metric == TableMetric::R2) {
    for (const auto& r : table.rows)
      for (std::size_t k = 0; k < r.r2_excluded.size(); ++k)
        if (r.r2_excluded[k])
          out += "excluded (zero test variance): " + std::string(family_display_name(r.family)) +
                 " " + std::string(emotion_name(table.columns[k])) + " " +
                 std::to_string(r.r2_excluded[k]) + " of " + std::to_string(r.folds) +
                 " folds\n";
  }
  return out;
}

std::string format_results_csv(const std::vector<FoldRecord>& records) {
  std::string out = "model,emotion,fold,participant,r2,mse\n";
  for (const auto& r : records) {
    out += std::string(family_tag(r.family)) + "," + std::string(emotion_name(r.emotion)) + "," +
           std::to_string(r.fold) + "," + r.participant + "," + text::format_double(r.r2) + "," +
           text::format_double(r.mse) + "\n";
  }
  return out;
}

std::vector<FoldRecord> parse_results_csv(std::string_view contents) {
  std::vector<FoldRecord> out;
  std::size_t line_no = 0;
  bool header = true;
  for (auto line : text::split(contents, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    const auto fail = [&](const std::string& why) {
      return Error(ErrorKind::MalformedRow, "results line " + std::to_string(line_no) + ": " + why,
                   {}, line_no);
    };
    if (header) {
      if (line != "model,emotion,fold,participant,r2,mse") throw fail("unexpected header");
      header = false;
      continue;
    }
    const auto cells = text::split(line, ',');
    if (cells.size() != 6) throw fail("expected 6 cells");
    FoldRecord r{};
    const auto family = parse_family(cells[0]);
    const auto emotion = parse_emotion(cells[1]);
    const auto fold = text::parse_double(cells[2]);
    const auto r2 = text::parse_double(cells[4]);
    const auto m = text::parse_double(cells[5]);
    if (!family) throw fail("unknown model '" + std::string(cells[0]) + "'");
    if (!emotion) throw fail("unknown emotion '" + std::string(cells[1]) + "'");
    if (!fold || *fold < 1 || *fold != std::floor(*fold)) throw fail("bad fold number");
    if (!r2 || !m) throw fail("bad metric value");
    r.family = *family;
    r.emotion = *emotion;
    r.fold = static_cast<std::size_t>(*fold);
    r.participant = std::string(cells[3]);
    r.r2 = *r2;
    r.mse = *m;
    out.push_back(std::move(r));
  }
  if (header) throw Error(ErrorKind::EmptyStream, "results file is empty");
  return out;
}

}  // namespace physioemo
