// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "degli/rng.hpp"
#include "degli/types.hpp"
#include "degli/wav.hpp"

namespace degli {

struct Segment {
  std::vector<double> samples;  // exactly segment_length, tail zero-padded
  std::string source;           // originating file
  int index = 0;                // segment index within the file
  long valid_length = 0;        // samples before padding
  bool padded = false;
};

// Scale to unit RMS; returns the applied scale factor (1 for silence).
inline double normalize_rms(std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  if (e <= 0.0 || x.empty()) return 1.0;
  const double rms = std::sqrt(e / static_cast<double>(x.size()));
  const double s = 1.0 / rms;
  for (double& v : x) v *= s;
  return s;
}

inline std::vector<std::string> list_wavs(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw std::invalid_argument("corpus directory does not exist: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Non-overlapping fixed-length segments; the final partial segment is
// zero-padded and flagged.
inline std::vector<Segment> segment_signal(const std::vector<double>& x,
                                           const std::string& source, long segment_length) {
  if (segment_length < 1)
    throw std::invalid_argument("segment_signal: segment_length must be >= 1");
  std::vector<Segment> out;
  const long n = static_cast<long>(x.size());
  for (long s0 = 0, idx = 0; s0 < n; s0 += segment_length, ++idx) {
    Segment seg;
    seg.source = source;
    seg.index = static_cast<int>(idx);
    seg.valid_length = std::min(segment_length, n - s0);
    seg.padded = seg.valid_length < segment_length;
    seg.samples.assign(static_cast<size_t>(segment_length), 0.0);
    std::copy(x.begin() + s0, x.begin() + s0 + seg.valid_length, seg.samples.begin());
    out.push_back(std::move(seg));
  }
  return out;
}

// Deterministic corpus segmentation: lexicographic file order,
// per-utterance unit-RMS normalization, non-overlapping segments.
inline std::vector<Segment> segment_corpus(const std::string& dir, long segment_length,
                                           double expected_rate = 16000.0,
                                           bool normalize = true) {
  auto files = list_wavs(dir);
  if (files.empty()) throw std::invalid_argument("corpus directory has no wav files: " + dir);
  std::vector<Segment> out;
  for (const auto& f : files) {
    TimeSignal sig = load_wav(f, expected_rate);
    if (normalize) normalize_rms(sig.samples);
    auto segs = segment_signal(sig.samples, f, segment_length);
    for (auto& s : segs) out.push_back(std::move(s));
  }
  return out;
}

struct SplitCorpus {
  std::vector<Segment> train;
  std::vector<Segment> val;
  long train_files = 0;
  long val_files = 0;
};

// Splits at the file level (seeded shuffle), then segments each side.
inline SplitCorpus split_corpus(const std::string& dir, long segment_length,
                                double validation_fraction, uint64_t seed,
                                double expected_rate = 16000.0, bool normalize = true) {
  if (validation_fraction < 0.0 || validation_fraction >= 1.0)
    throw std::invalid_argument("split_corpus: validation_fraction must be in [0, 1)");
  auto files = list_wavs(dir);
  if (files.empty()) throw std::invalid_argument("corpus directory has no wav files: " + dir);
  Rng rng(derive_seed(seed, 0x73706c69));  // "spli"
  rng.shuffle(files);
  long val_count = std::lround(validation_fraction * static_cast<double>(files.size()));
  val_count = std::clamp<long>(val_count, files.size() > 1 && validation_fraction > 0 ? 1 : 0,
                               static_cast<long>(files.size()) - 1);
  SplitCorpus out;
  out.val_files = val_count;
  out.train_files = static_cast<long>(files.size()) - val_count;
  for (size_t i = 0; i < files.size(); ++i) {
    TimeSignal sig = load_wav(files[i], expected_rate);
    if (normalize) normalize_rms(sig.samples);
    auto segs = segment_signal(sig.samples, files[i], segment_length);
    auto& dst = static_cast<long>(i) < val_count ? out.val : out.train;
    for (auto& s : segs) dst.push_back(std::move(s));
  }
  return out;
}

}  // namespace degli
