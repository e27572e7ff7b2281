#include "physioemo/labels.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "Joy",     "Anger",   "Surprise", "Fear",     "Contempt",  "Disgust",
    "Sadness", "Neutral", "Positive", "Negative", "Confusion", "Frustration"};

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::string_view emotion_name(Emotion e) noexcept {
  return kEmotionNames[static_cast<std::size_t>(e)];
}

std::optional<Emotion> parse_emotion(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kEmotionCount; ++i)
    if (kEmotionNames[i] == name) return static_cast<Emotion>(i);
  return std::nullopt;
}

std::vector<std::string> emotion_names() { return {kEmotionNames.begin(), kEmotionNames.end()}; }

FeaParseResult parse_fea_export(std::istream& source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t t_col = 0;
  std::array<std::size_t, kEmotionCount> cols{};
  std::vector<double> times;
  std::vector<std::array<double, kEmotionCount>> rows;
  FeaParseResult result;

  while (std::getline(source, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = text::split(trimmed, ',');
    if (!have_header) {
      const auto find = [&](std::string_view name) {
        for (std::size_t i = 0; i < fields.size(); ++i)
          if (text::trim(fields[i]) == name) return i;
        throw Error(ErrorKind::MissingChannelColumn,
                    "FEA export lacks column '" + std::string(name) + "'", std::string(name),
                    line_no);
      };
      t_col = find("timestamp");
      for (std::size_t e = 0; e < kEmotionCount; ++e) cols[e] = find(kEmotionNames[e]);
      have_header = true;
      continue;
    }
    const auto malformed = [&] {
      return Error(ErrorKind::MalformedRow, "bad FEA row at line " + std::to_string(line_no), {},
                   line_no);
    };
    const auto field = [&](std::size_t i) -> std::string_view {
      return i < fields.size() ? text::trim(fields[i]) : std::string_view{};
    };
    const auto t = text::parse_double(field(t_col));
    if (!t || !std::isfinite(*t)) throw malformed();
    std::array<double, kEmotionCount> row{};
    bool blank = false;
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      const auto cell = field(cols[e]);
      if (cell.empty()) {
        blank = true;
        continue;
      }
      const auto v = text::parse_double(cell);
      if (!v) throw malformed();
      if (std::isnan(*v)) {
        blank = true;
        continue;
      }
      row[e] = *v;
    }
    if (blank) {
      ++result.dropped_rows;
      continue;
    }
    if (!times.empty() && !(*t > times.back()))
      throw Error(ErrorKind::NonMonotonicTime,
                  "FEA timestamps must increase (line " + std::to_string(line_no) + ")", {},
                  line_no);
    times.push_back(*t);
    rows.push_back(row);
  }
  if (!have_header) throw Error(ErrorKind::EmptyStream, "FEA export is empty");
  if (times.empty()) throw Error(ErrorKind::EmptyStream, "FEA export has no complete rows");

  result.series.timestamps = std::move(times);
  result.series.intensities.resize(static_cast<Eigen::Index>(rows.size()), kEmotionCount);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t e = 0; e < kEmotionCount; ++e)
      result.series.intensities(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)) =
          rows[r][e];
  return result;
}

FeaParseResult parse_fea_export(std::string_view source) {
  std::istringstream in{std::string(source)};
  return parse_fea_export(in);
}

void write_fea_export(std::ostream& out, const EmotionTimeSeries& series) {
  out << "timestamp";
  for (auto name : kEmotionNames) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < series.size(); ++r) {
    out << text::format_double(series.timestamps[r]);
    for (std::size_t e = 0; e < kEmotionCount; ++e)
      out << ','
          << text::format_double(
                 series.intensities(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)));
    out << '\n';
  }
}

LabelAlignment align_labels(const EmotionTimeSeries& labels,
                            const std::vector<double>& feature_timeline, double tolerance) {
  const auto& lt = labels.timestamps;
  if (lt.empty() || feature_timeline.empty() ||
      lt.back() + tolerance < feature_timeline.front() ||
      feature_timeline.back() + tolerance < lt.front())
    throw Error(ErrorKind::NoOverlap, "label span does not overlap the feature timeline");

  const double slack = 1e-9 * std::max(1.0, std::abs(feature_timeline.back()));
  LabelAlignment out;
  std::vector<std::size_t> label_rows;
  for (std::size_t i = 0; i < feature_timeline.size(); ++i) {
    const double t = feature_timeline[i];
    const auto it = std::lower_bound(lt.begin(), lt.end(), t);
    std::size_t best = lt.size();
    double best_dt = INFINITY;
    if (it != lt.begin()) {
      best = static_cast<std::size_t>(it - lt.begin()) - 1;
      best_dt = t - lt[best];
    }
    if (it != lt.end() && *it - t < best_dt) {
      best = static_cast<std::size_t>(it - lt.begin());
      best_dt = *it - t;
    }
    if (best < lt.size() && best_dt <= tolerance + slack) {
      out.kept_rows.push_back(i);
      label_rows.push_back(best);
    }
  }
  out.intensities.resize(static_cast<Eigen::Index>(label_rows.size()), kEmotionCount);
  for (std::size_t r = 0; r < label_rows.size(); ++r)
    out.intensities.row(static_cast<Eigen::Index>(r)) =
        labels.intensities.row(static_cast<Eigen::Index>(label_rows[r]));
  return out;
}

EmotionBaseline baseline_of(Emotion e, const Eigen::Ref<const Eigen::VectorXd>& channel) {
  if (channel.size() < 2)
    throw Error(ErrorKind::ChannelTooShort,
                std::string(emotion_name(e)) + " has fewer than two samples",
                std::string(emotion_name(e)));
  const double n = static_cast<double>(channel.size());
  const double mean = channel.sum() / n;
  const double sd = std::sqrt((channel.array() - mean).square().sum() / n);
  const auto outside = ((channel.array() - mean).abs() > sd).count();
  return {e, mean, sd, 100.0 * static_cast<double>(outside) / n};
}

EmotionBaselineTable baseline_stats(const EmotionTimeSeries& labels) {
  EmotionBaselineTable table{};
  for (std::size_t e = 0; e < kEmotionCount; ++e)
    table[e] = baseline_of(static_cast<Emotion>(e),
                           labels.intensities.col(static_cast<Eigen::Index>(e)));
  return table;
}

std::string format_baseline_table(const EmotionBaselineTable& table) {
  constexpr std::size_t kName = 12, kBase = 12, kPct = 18;
  const auto header = pad_right("Emotion", kName) + pad_left("Baseline", kBase) +
                      pad_left("% outside 1st std", kPct);
  std::string out = header + "  | " + header + "\n";
  out += std::string(header.size(), '-') + "--+-" + std::string(header.size(), '-') + "\n";
  const auto cell = [&](const EmotionBaseline& b) {
    return pad_right(std::string(emotion_name(b.emotion)), kName) +
           pad_left(text::format_fixed(b.baseline, 7), kBase) +
           pad_left(text::format_fixed(b.pct_outside_1std, 2), kPct);
  };
  constexpr std::size_t half = kEmotionCount / 2;
  for (std::size_t i = 0; i < half; ++i)
    out += cell(table[i]) + "  | " + cell(table[i + half]) + "\n";
  return out;
}

double TargetScaling::apply(std::size_t k, double value) const {
  return std::clamp((value - min[k]) / (max[k] - min[k]), 0.0, 1.0);
}

Eigen::MatrixXd TargetScaling::apply(const Eigen::MatrixXd& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != targets.size())
    throw Error(ErrorKind::DimensionMismatch, "target column count mismatch");
  Eigen::MatrixXd out(raw.rows(), raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c)
    for (Eigen::Index r = 0; r < raw.rows(); ++r)
      out(r, c) = apply(static_cast<std::size_t>(c), raw(r, c));
  return out;
}

std::string TargetScaling::serialize() const {
  std::string out;
  for (std::size_t k = 0; k < targets.size(); ++k)
    out += std::string(emotion_name(targets[k])) + " " + text::format_double(min[k]) + " " +
           text::format_double(max[k]) + "\n";
  return out;
}

TargetScaling fit_target_scaling(const Eigen::MatrixXd& train_targets,
                                 const std::vector<Emotion>& targets) {
  if (static_cast<std::size_t>(train_targets.cols()) != targets.size())
    throw Error(ErrorKind::DimensionMismatch, "target column count mismatch");
  if (train_targets.rows() == 0)
    throw Error(ErrorKind::EmptyMatrix, "no training rows for target scaling");
  TargetScaling s;
  s.targets = targets;
  for (Eigen::Index c = 0; c < train_targets.cols(); ++c) {
    const double lo = train_targets.col(c).minCoeff();
    const double hi = train_targets.col(c).maxCoeff();
    if (!(hi > lo)) {
      const auto name = std::string(emotion_name(targets[static_cast<std::size_t>(c)]));
      throw Error(ErrorKind::DegenerateRange, name + " is constant on the training rows", name);
    }
    s.min.push_back(lo);
    s.max.push_back(hi);
  }
  return s;
}

Eigen::MatrixXd target_columns(const Eigen::MatrixXd& intensities,
                               const std::vector<Emotion>& targets) {
  Eigen::MatrixXd out(intensities.rows(), static_cast<Eigen::Index>(targets.size()));
  for (std::size_t k = 0; k < targets.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) =
        intensities.col(static_cast<Eigen::Index>(targets[k]));
  return out;
}

TargetMatrix select_targets(const Eigen::MatrixXd& aligned_intensities,
                            const std::vector<bool>& training_rows,
                            const std::vector<Emotion>& targets) {
  if (static_cast<Eigen::Index>(training_rows.size()) != aligned_intensities.rows())
    throw Error(ErrorKind::LengthMismatch, "training mask length differs from row count");
  if (aligned_intensities.cols() != static_cast<Eigen::Index>(kEmotionCount))
    throw Error(ErrorKind::DimensionMismatch, "expected all twelve emotion channels");
  const Eigen::MatrixXd all = target_columns(aligned_intensities, targets);
  const auto n_train = std::count(training_rows.begin(), training_rows.end(), true);
  Eigen::MatrixXd train(n_train, all.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < all.rows(); ++i)
    if (training_rows[static_cast<std::size_t>(i)]) train.row(r++) = all.row(i);
  TargetMatrix out;
  out.scaling = fit_target_scaling(train, targets);
  out.values = out.scaling.apply(all);
  return out;
}

}  // namespace physioemo
