// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Report figures: mel-spectrogram triptychs (mixture / estimate / reference)
// and a per-utterance SI-SDRi bar chart. Images are PNG when built with
// libpng, binary PPM otherwise; a plain-text table is always written.

#ifndef SEANET_TRAIN_PLOTS_HPP_
#define SEANET_TRAIN_PLOTS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef SEANET_HAVE_PNG
#include <png.h>
#endif

#include "seanet/metrics/metrics.hpp"
#include "seanet/signal/audio.hpp"
#include "seanet/signal/spectral.hpp"

namespace seanet {

struct Image {
  int width = 0, height = 0;
  std::vector<uint8_t> rgb;  // row-major, top row first

  Image() = default;
  Image(int w, int h, uint8_t fill = 255) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, fill) {}

  void set(int x, int y, std::array<uint8_t, 3> c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    rgb[i] = c[0];
    rgb[i + 1] = c[1];
    rgb[i + 2] = c[2];
  }

  void fill_rect(int x0, int y0, int x1, int y1, std::array<uint8_t, 3> c) {
    for (int y = std::min(y0, y1); y <= std::max(y0, y1); ++y)
      for (int x = std::min(x0, x1); x <= std::max(x0, x1); ++x) set(x, y, c);
  }
};

/// Perceptual dark-blue -> green -> yellow ramp, v in [0, 1].
inline std::array<uint8_t, 3> colormap(double v) {
  static constexpr double kStops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  v = std::clamp(v, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(v));
  const double f = v - i;
  std::array<uint8_t, 3> c{};
  for (int k = 0; k < 3; ++k) c[k] = static_cast<uint8_t>(std::lround(kStops[i][k] * (1 - f) + kStops[i + 1][k] * f));
  return c;
}

/// Log-mel magnitude image: time left to right, low frequencies at the
/// bottom, scaled to the given dB range.
inline Image spectrogram_image(const Matrix<double>& log_mel, double lo_db, double hi_db, int px_per_frame = 2,
                               int px_per_band = 4) {
  const int frames = static_cast<int>(log_mel.rows()), bands = static_cast<int>(log_mel.cols());
  Image img(frames * px_per_frame, bands * px_per_band);
  for (int t = 0; t < frames; ++t)
    for (int b = 0; b < bands; ++b) {
      const double db = 10.0 * log_mel(t, b) / std::log(10.0);
      const auto c = colormap((db - lo_db) / std::max(1e-9, hi_db - lo_db));
      const int y0 = (bands - 1 - b) * px_per_band;
      img.fill_rect(t * px_per_frame, y0, (t + 1) * px_per_frame - 1, y0 + px_per_band - 1, c);
    }
  return img;
}

/// Three spectrograms stacked vertically on a shared dB scale.
inline Image triptych(const Waveform& mixture, const Waveform& estimate, const Waveform& reference, int bands = 64) {
  std::vector<Matrix<double>> mels;
  double hi = -1e300;
  for (const Waveform* w : {&mixture, &estimate, &reference}) {
    mels.push_back(log_mel_spectrogram(*w, bands));
    hi = std::max(hi, 10.0 * mels.back().maxCoeff() / std::log(10.0));
  }
  const double lo = hi - 80.0;
  std::vector<Image> parts;
  for (const auto& m : mels) parts.push_back(spectrogram_image(m, lo, hi));
  const int gap = 6;
  int width = 0, height = 0;
  for (const auto& p : parts) {
    width = std::max(width, p.width);
    height += p.height;
  }
  Image out(width, height + gap * 2);
  int y = 0;
  for (const auto& p : parts) {
    for (int r = 0; r < p.height; ++r)
      std::copy_n(p.rgb.begin() + static_cast<std::ptrdiff_t>(r) * p.width * 3, p.width * 3,
                  out.rgb.begin() + (static_cast<std::ptrdiff_t>(y + r) * width) * 3);
    y += p.height + gap;
  }
  return out;
}

/// Vertical bars around a zero line; positive values blue, negative red.
inline Image bar_chart(const std::vector<double>& values, int bar_px = 24, int height = 240) {
  const int n = static_cast<int>(values.size());
  Image img(std::max(1, n) * (bar_px + 8) + 8, height);
  double lo = 0.0, hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = std::max(1e-9, hi - lo);
  const int margin = 10;
  auto ypix = [&](double v) { return margin + static_cast<int>(std::lround((hi - v) / span * (height - 2 * margin))); };
  const int zero = ypix(0.0);
  for (int i = 0; i < n; ++i) {
    const int x0 = 8 + i * (bar_px + 8);
    img.fill_rect(x0, zero, x0 + bar_px - 1, ypix(values[i]),
                  values[i] >= 0 ? std::array<uint8_t, 3>{49, 99, 179} : std::array<uint8_t, 3>{200, 60, 50});
  }
  img.fill_rect(0, zero, img.width - 1, zero, {0, 0, 0});
  return img;
}

inline bool png_available() {
#ifdef SEANET_HAVE_PNG
  return true;
#else
  return false;
#endif
}

/// Writes `img` to `stem` + ".png" (or ".ppm" without libpng); returns the
/// path written.
inline std::string write_image(const Image& img, const std::string& stem) {
#ifdef SEANET_HAVE_PNG
  const std::string path = stem + ".png";
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("libpng failed writing " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(img.rgb.data() + static_cast<size_t>(y) * img.width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  return path;
#else
  const std::string path = stem + ".ppm";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  return path;
#endif
}

/// Audio of one scored utterance, for spectrogram panels.
struct PlotItem {
  std::string id;
  Waveform mixture, estimate, reference;
};

struct PlotResult {
  std::vector<std::string> images;
  std::string table;  // path of the text summary, empty when nothing was written
  std::vector<std::string> warnings;
};

/// One triptych per item with audio and one summary chart per non-empty
/// report. An empty report writes nothing and returns a warning.
inline PlotResult emit_plots(const MetricsReport& report, const std::vector<PlotItem>& items,
                             const std::string& out_dir) {
  PlotResult res;
  if (report.rows.empty()) {
    res.warnings.push_back("report has no rows; no plots written");
    return res;
  }
  std::filesystem::create_directories(out_dir);
  auto safe = [](std::string s) {
    for (char& c : s)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
  };
  for (const auto& it : items) res.images.push_back(write_image(triptych(it.mixture, it.estimate, it.reference),
                                                                out_dir + "/spec_" + safe(it.id)));
  std::vector<double> vals;
  std::ostringstream table;
  table << std::left << std::setw(24) << "id" << std::right << std::setw(10) << "SI-SDR" << std::setw(10) << "SDR"
        << std::setw(10) << "SI-SDRi" << std::setw(10) << "SDRi" << std::setw(11) << "incorrect" << "\n"
        << std::fixed << std::setprecision(2);
  for (const auto& r : report.rows) {
    if (!r.error.empty()) {
      table << std::left << std::setw(24) << r.id << "  error: " << r.error << "\n";
      continue;
    }
    vals.push_back(r.si_sdri);
    table << std::left << std::setw(24) << r.id << std::right << std::setw(10) << r.si_sdr << std::setw(10) << r.sdr
          << std::setw(10) << r.si_sdri << std::setw(10) << r.sdri << std::setw(11) << r.incorrect_segments << "\n";
  }
  table << std::left << std::setw(24) << "mean" << std::right << std::setw(10) << report.mean_si_sdr << std::setw(10)
        << report.mean_sdr << std::setw(10) << report.mean_si_sdri << std::setw(10) << report.mean_sdri
        << std::setw(11) << report.total_incorrect_segments << "\n";
  res.images.push_back(write_image(bar_chart(vals), out_dir + "/summary_si_sdri"));
  res.table = out_dir + "/summary.txt";
  std::ofstream(res.table) << table.str();
  if (!png_available()) res.warnings.push_back("libpng not available; images written as PPM");
  return res;
}

}  // namespace seanet

#endif  // SEANET_TRAIN_PLOTS_HPP_
