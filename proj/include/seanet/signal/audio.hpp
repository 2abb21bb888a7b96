// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEANET_SIGNAL_AUDIO_HPP_
#define SEANET_SIGNAL_AUDIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seanet {

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr double kDefaultFrameRate = 25.0;

/// Mono time-domain audio. Amplitudes are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

  double energy() const {
    double e = 0.0;
    for (double v : samples) e += v * v;
    return e;
  }

  double peak() const {
    double p = 0.0;
    for (double v : samples) p = std::max(p, std::abs(v));
    return p;
  }

  /// Throws unless the invariants hold (finite, non-empty, positive rate).
  void validate(const std::string& what = "waveform") const {
    if (sample_rate <= 0) throw std::invalid_argument(what + ": sample rate must be positive");
    if (samples.empty()) throw std::invalid_argument(what + ": empty waveform");
    for (double v : samples)
      if (!std::isfinite(v)) throw std::invalid_argument(what + ": non-finite sample");
  }
};

/// A stream of gray-scale frames (or synthetic per-frame feature vectors,
/// with height == 1).
struct VisualStream {
  std::vector<std::vector<float>> frames;
  int width = 112;
  int height = 112;
  double frame_rate = kDefaultFrameRate;

  size_t size() const { return frames.size(); }
};

inline void check_compatible(const Waveform& a, const Waveform& b, const std::string& what) {
  if (a.sample_rate != b.sample_rate)
    throw std::invalid_argument(what + ": sample rate mismatch (" + std::to_string(a.sample_rate) +
                                " vs " + std::to_string(b.sample_rate) + ")");
  if (a.size() != b.size())
    throw std::invalid_argument(what + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
}

// --- WAV (RIFF, PCM 16-bit little-endian, mono) ---------------------------

namespace detail {
inline void put_u32(std::ofstream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_u16(std::ofstream& os, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}
inline uint32_t get_u32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
inline uint16_t get_u16(const unsigned char* p) { return uint16_t(p[0] | p[1] << 8); }
}  // namespace detail

inline int16_t quantize_pcm16(double v) {
  const double s = std::round(v * 32768.0);
  return static_cast<int16_t>(std::clamp(s, -32768.0, 32767.0));
}

inline void write_wav(const std::string& path, const Waveform& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const uint32_t data_bytes = static_cast<uint32_t>(w.size() * 2);
  os.write("RIFF", 4);
  detail::put_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  detail::put_u32(os, 16);
  detail::put_u16(os, 1);  // PCM
  detail::put_u16(os, 1);  // mono
  detail::put_u32(os, static_cast<uint32_t>(w.sample_rate));
  detail::put_u32(os, static_cast<uint32_t>(w.sample_rate * 2));
  detail::put_u16(os, 2);
  detail::put_u16(os, 16);
  os.write("data", 4);
  detail::put_u32(os, data_bytes);
  for (double v : w.samples) detail::put_u16(os, static_cast<uint16_t>(quantize_pcm16(v)));
  if (!os) throw std::runtime_error("write failed: " + path);
}

/// Reads a mono 16-bit PCM file. When `expected_rate` is given, a different
/// sample rate is an error.
inline Waveform load_wav(const std::string& path, std::optional<int> expected_rate = std::nullopt) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error(path + ": not a RIFF/WAVE file");
  size_t pos = 12;
  int channels = 0, bits = 0;
  Waveform w;
  bool have_fmt = false, have_data = false;
  while (pos + 8 <= buf.size()) {
    const uint32_t size = detail::get_u32(&buf[pos + 4]);
    const unsigned char* body = &buf[pos + 8];
    if (pos + 8 + size > buf.size()) throw std::runtime_error(path + ": truncated chunk");
    if (std::memcmp(&buf[pos], "fmt ", 4) == 0) {
      if (size < 16) throw std::runtime_error(path + ": short fmt chunk");
      if (detail::get_u16(body) != 1) throw std::runtime_error(path + ": only PCM is supported");
      channels = detail::get_u16(body + 2);
      w.sample_rate = static_cast<int>(detail::get_u32(body + 4));
      bits = detail::get_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(&buf[pos], "data", 4) == 0) {
      if (!have_fmt) throw std::runtime_error(path + ": data chunk before fmt chunk");
      if (channels != 1 || bits != 16)
        throw std::runtime_error(path + ": expected mono 16-bit PCM");
      w.samples.resize(size / 2);
      for (size_t i = 0; i < w.samples.size(); ++i)
        w.samples[i] = static_cast<int16_t>(detail::get_u16(body + 2 * i)) / 32768.0;
      have_data = true;
    }
    pos += 8 + size + (size & 1);
  }
  if (!have_data) throw std::runtime_error(path + ": no data chunk");
  if (expected_rate && *expected_rate != w.sample_rate)
    throw std::runtime_error(path + ": sample rate " + std::to_string(w.sample_rate) +
                             " Hz, expected " + std::to_string(*expected_rate) + " Hz");
  return w;
}

}  // namespace seanet

#endif  // SEANET_SIGNAL_AUDIO_HPP_
