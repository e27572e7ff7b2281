#include "physioemo/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "physioemo/error.hpp"
#include "physioemo/text.hpp"

namespace physioemo {

namespace {

std::uint64_t parse_u64(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  if (v.empty()) throw Error(ErrorKind::InvalidConfig, key + " must be a non-negative integer", key);
  for (char c : v) {
    if (c < '0' || c > '9' || out > (UINT64_MAX - 9) / 10)
      throw Error(ErrorKind::InvalidConfig, key + " must be a non-negative integer", key);
    out = out * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return out;
}

}  // namespace

std::vector<ModelFamily> parse_family_list(std::string_view list) {
  if (text::trim(list) == "all") return all_families();
  std::vector<ModelFamily> out;
  for (auto part : text::split(list, ',')) {
    part = text::trim(part);
    const auto f = parse_family(part);
    if (!f)
      throw Error(ErrorKind::InvalidConfig,
                  "unknown model '" + std::string(part) + "'; valid models: " + family_list(),
                  std::string(part));
    if (std::find(out.begin(), out.end(), *f) != out.end())
      throw Error(ErrorKind::InvalidConfig, "model " + std::string(part) + " listed twice");
    out.push_back(*f);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidConfig, "model list is empty");
  return out;
}

std::vector<Emotion> parse_emotion_list(std::string_view list) {
  std::vector<Emotion> out;
  for (auto part : text::split(list, ',')) {
    part = text::trim(part);
    const auto e = parse_emotion(part);
    if (!e) throw Error(ErrorKind::InvalidConfig, "unknown emotion '" + std::string(part) + "'");
    if (std::find(out.begin(), out.end(), *e) != out.end())
      throw Error(ErrorKind::InvalidConfig, "emotion " + std::string(part) + " listed twice");
    out.push_back(*e);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidConfig, "target list is empty");
  return out;
}

void RunConfig::validate() const {
  if (pipeline.window == 0) throw Error(ErrorKind::InvalidConfig, "window must be >= 1", "window");
  if (!(pipeline.rate > 0.0)) throw Error(ErrorKind::InvalidConfig, "rate must be > 0", "rate");
  if (models.empty()) throw Error(ErrorKind::InvalidConfig, "model list is empty", "models");
  if (pipeline.targets.empty())
    throw Error(ErrorKind::InvalidConfig, "target list is empty", "targets");
  if (data_root.empty()) throw Error(ErrorKind::InvalidConfig, "no dataset root given", "data");
  if (output_dir.empty()) throw Error(ErrorKind::InvalidConfig, "no output path given", "out");
  namespace fs = std::filesystem;
  if (fs::weakly_canonical(data_root) == fs::weakly_canonical(output_dir))
    throw Error(ErrorKind::InvalidConfig, "dataset root and output path must differ", "out");
}

RunConfig parse_run_config(std::string_view contents) {
  RunConfig cfg;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<ModelFamily> families = all_families();
  for (const auto& [key, value] : text::parse_key_values(contents)) {
    if (key == "data") {
      cfg.data_root = value;
    } else if (key == "out") {
      cfg.output_dir = value;
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "jobs") {
      cfg.jobs = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "window") {
      cfg.pipeline.window = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "rate") {
      const auto r = text::parse_double(value);
      if (!r || !(*r > 0.0) || !std::isfinite(*r))
        throw Error(ErrorKind::InvalidConfig, "rate must be a positive number", key);
      cfg.pipeline.rate = *r;
    } else if (key == "targets") {
      cfg.pipeline.targets = parse_emotion_list(value);
    } else if (key == "models") {
      families = parse_family_list(value);
    } else if (const auto dot = key.find('.'); dot != std::string::npos) {
      overrides.emplace_back(key, value);
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'", key);
    }
  }
  for (auto f : families) cfg.models.push_back(ModelConfig::defaults(f, cfg.seed));
  for (const auto& [key, value] : overrides) {
    const auto dot = key.find('.');
    const auto tag = key.substr(0, dot);
    const auto family = parse_family(tag);
    if (!family)
      throw Error(ErrorKind::InvalidConfig,
                  "unknown model '" + tag + "'; valid models: " + family_list(), tag);
    auto it = std::find_if(cfg.models.begin(), cfg.models.end(),
                           [&](const ModelConfig& m) { return m.family() == *family; });
    if (it == cfg.models.end())
      throw Error(ErrorKind::InvalidConfig, "parameter for " + tag + " which is not in models", key);
    it->set(key.substr(dot + 1), value);
  }
  return cfg;
}

}  // namespace physioemo
