#include "physioemo/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "parallel.hpp"
#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

FeatureMatrix PreparedParticipant::feature_matrix() const {
  return FeatureMatrix(features, channel_names(), id);
}

PreparedParticipant prepare_participant(const SessionRecording& session,
                                        const EmotionTimeSeries& labels,
                                        const PipelineOptions& options, std::size_t dropped) {
  if (options.window == 0) throw Error(ErrorKind::InvalidConfig, "smoothing window must be >= 1");
  const auto& aligned = session.aligned;
  const Eigen::MatrixXd smoothed = smooth_columns(aligned.values, options.window);
  // The trailing window ending at row i is stamped with row i's time.
  const std::vector<double> timeline(aligned.timestamps.begin() +
                                         static_cast<std::ptrdiff_t>(options.window - 1),
                                     aligned.timestamps.end());
  const auto pairing = align_labels(labels, timeline, 1.0 / aligned.rate);

  PreparedParticipant p;
  p.id = session.participant_id;
  p.dropped_label_rows = dropped;
  p.unmatched_rows = timeline.size() - pairing.kept_rows.size();
  p.features.resize(static_cast<Eigen::Index>(pairing.kept_rows.size()), smoothed.cols());
  p.timestamps.reserve(pairing.kept_rows.size());
  for (std::size_t i = 0; i < pairing.kept_rows.size(); ++i) {
    const auto r = pairing.kept_rows[i];
    p.features.row(static_cast<Eigen::Index>(i)) = smoothed.row(static_cast<Eigen::Index>(r));
    p.timestamps.push_back(timeline[r]);
  }
  p.intensities = pairing.intensities;
  return p;
}

PreparedParticipant load_participant(const std::string& dir, const PipelineOptions& options) {
  namespace fs = std::filesystem;
  const auto session = load_session(dir, options.rate);
  const auto manifest =
      parse_manifest(text::read_file((fs::path(dir) / kManifestFileName).string()));
  try {
    const auto labels =
        parse_fea_export(text::read_file((fs::path(dir) / manifest.labels_path).string()));
    return prepare_participant(session, labels.series, options, labels.dropped_rows);
  } catch (const Error& e) {
    throw e.annotated(session.participant_id);
  }
}

std::vector<std::string> participant_directories(const std::string& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw Error(ErrorKind::Io, "dataset root '" + root + "' is not a directory");
  std::vector<std::string> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / kManifestFileName))
      dirs.push_back(entry.path().string());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  for (const auto& p : participants) out.push_back(p.id);
  return out;
}

const PreparedParticipant& Dataset::at(const std::string& id) const {
  for (const auto& p : participants)
    if (p.id == id) return p;
  throw Error(ErrorKind::InvalidConfig, "no participant '" + id + "' in dataset", id);
}

Dataset load_dataset(const std::string& root, const PipelineOptions& options, std::size_t jobs) {
  const auto dirs = participant_directories(root);
  if (dirs.empty())
    throw Error(ErrorKind::TooFewParticipants, "no participant manifests under '" + root + "'");
  Dataset d;
  d.participants.resize(dirs.size());
  detail::parallel_for(dirs.size(), jobs,
                       [&](std::size_t i) { d.participants[i] = load_participant(dirs[i], options); });
  std::sort(d.participants.begin(), d.participants.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < d.participants.size(); ++i)
    if (d.participants[i].id == d.participants[i - 1].id)
      throw Error(ErrorKind::InvalidConfig, "duplicate participant id '" + d.participants[i].id + "'",
                  d.participants[i].id);
  return d;
}

}  // namespace physioemo
