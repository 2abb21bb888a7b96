// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Line-delimited JSON manifests describing mixtures stored as WAV files:
//   {"id": "...", "mixture_path": "...", "target_path": "...",
//    "noise_path": "...", "visual_path": "...", "scenario": "S", "snr_db": 1.5}
// visual_path is optional. Relative paths resolve against the manifest's
// directory.

#ifndef SEANET_SIGNAL_MANIFEST_HPP_
#define SEANET_SIGNAL_MANIFEST_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "seanet/signal/audio.hpp"
#include "seanet/signal/mixing.hpp"

namespace seanet {

struct ManifestRecord {
  std::string id;
  std::string mixture_path;
  std::string target_path;
  std::string noise_path;
  std::optional<std::string> visual_path;
  Scenario scenario = Scenario::kS;
  double snr_db = 0.0;
};

class ManifestError : public std::runtime_error {
 public:
  ManifestError(const std::string& path, size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

inline nlohmann::json to_json(const ManifestRecord& r) {
  nlohmann::json j = {{"id", r.id},
                      {"mixture_path", r.mixture_path},
                      {"target_path", r.target_path},
                      {"noise_path", r.noise_path},
                      {"scenario", to_string(r.scenario)},
                      {"snr_db", r.snr_db}};
  if (r.visual_path) j["visual_path"] = *r.visual_path;
  return j;
}

inline std::vector<ManifestRecord> read_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open manifest " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() || base.empty() ? p : (base / fp).string();
  };
  std::vector<ManifestRecord> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError(path, lineno, std::string("malformed record: ") + e.what());
    }
    if (!j.is_object()) throw ManifestError(path, lineno, "record is not an object");
    auto str_field = [&](const char* name) -> std::string {
      if (!j.contains(name)) throw ManifestError(path, lineno, std::string("missing field \"") + name + "\"");
      if (!j[name].is_string())
        throw ManifestError(path, lineno, std::string("field \"") + name + "\" must be a string");
      return j[name].get<std::string>();
    };
    ManifestRecord r;
    r.id = str_field("id");
    r.mixture_path = resolve(str_field("mixture_path"));
    r.target_path = resolve(str_field("target_path"));
    r.noise_path = resolve(str_field("noise_path"));
    if (j.contains("visual_path") && !j["visual_path"].is_null())
      r.visual_path = resolve(j["visual_path"].get<std::string>());
    try {
      r.scenario = parse_scenario(str_field("scenario"));
    } catch (const std::invalid_argument& e) {
      throw ManifestError(path, lineno, e.what());
    }
    if (!j.contains("snr_db")) throw ManifestError(path, lineno, "missing field \"snr_db\"");
    if (!j["snr_db"].is_number()) throw ManifestError(path, lineno, "field \"snr_db\" must be a number");
    r.snr_db = j["snr_db"].get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_manifest(const std::string& path, const std::vector<ManifestRecord>& records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& r : records) os << to_json(r).dump() << '\n';
}

/// Visual streams are stored as JSON: {"frame_rate", "width", "height",
/// "frames": [[...], ...]} with width*height values per frame.
inline void write_visual(const std::string& path, const VisualStream& v) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  nlohmann::json j = {{"frame_rate", v.frame_rate}, {"width", v.width}, {"height", v.height}, {"frames", v.frames}};
  os << j.dump();
}

inline VisualStream load_visual(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open visual stream " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
    VisualStream v;
    v.frame_rate = j.at("frame_rate").get<double>();
    v.width = j.at("width").get<int>();
    v.height = j.at("height").get<int>();
    v.frames = j.at("frames").get<std::vector<std::vector<float>>>();
    for (const auto& f : v.frames)
      if (f.size() != static_cast<size_t>(v.width) * static_cast<size_t>(v.height))
        throw std::runtime_error("frame size does not match width*height");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed visual stream: " + e.what());
  }
}

/// Loads the three waveforms of a record; all must share rate and length.
inline MixtureSample load_record(const ManifestRecord& r, int sample_rate = kDefaultSampleRate) {
  MixtureSample m;
  m.id = r.id;
  m.mixture = load_wav(r.mixture_path, sample_rate);
  m.target = load_wav(r.target_path, sample_rate);
  m.noise = load_wav(r.noise_path, sample_rate);
  check_compatible(m.mixture, m.target, r.id);
  check_compatible(m.mixture, m.noise, r.id);
  m.scenario = r.scenario;
  m.snr_db = r.snr_db;
  if (r.visual_path) m.visual = load_visual(*r.visual_path);
  return m;
}

}  // namespace seanet

#endif  // SEANET_SIGNAL_MANIFEST_HPP_
