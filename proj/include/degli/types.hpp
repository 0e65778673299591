// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace degli {

using cplx = std::complex<double>;

// Thrown when a window/normalizer cannot realize the inverse transform.
struct InvalidWindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a component breaks an interface contract (e.g. a denoiser
// returning the wrong shape).
struct ContractViolationError : std::logic_error {
  using std::logic_error::logic_error;
};

// Thrown when the training loss turns non-finite.
struct TrainingDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a metric is undefined for the given input (e.g. zero reference).
struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Real time-domain signal.
struct TimeSignal {
  std::vector<double> samples;
  double sample_rate = 0.0;
};

// F x T grid of complex values, stored frame-major: entry (f, t) lives at
// data[t * bins + f]. Holds the one-sided spectrum (bins = fft_size/2 + 1)
// of a real signal, or any complex iterate derived from one.
class ComplexSpectrogram {
 public:
  ComplexSpectrogram() = default;
  ComplexSpectrogram(int bins, int frames)
      : bins_(bins), frames_(frames), data_(static_cast<size_t>(bins) * frames) {
    if (bins <= 0 || frames <= 0)
      throw std::invalid_argument("ComplexSpectrogram: dimensions must be positive");
  }

  int bins() const { return bins_; }
  int frames() const { return frames_; }
  size_t size() const { return data_.size(); }

  cplx& at(int f, int t) { return data_[static_cast<size_t>(t) * bins_ + f]; }
  const cplx& at(int f, int t) const { return data_[static_cast<size_t>(t) * bins_ + f]; }

  cplx* frame(int t) { return data_.data() + static_cast<size_t>(t) * bins_; }
  const cplx* frame(int t) const { return data_.data() + static_cast<size_t>(t) * bins_; }

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  bool same_shape(const ComplexSpectrogram& o) const {
    return bins_ == o.bins_ && frames_ == o.frames_;
  }

 private:
  int bins_ = 0;
  int frames_ = 0;
  std::vector<cplx> data_;
};

// F x T grid of non-negative reals, same layout as ComplexSpectrogram.
class AmplitudeSpectrogram {
 public:
  AmplitudeSpectrogram() = default;
  AmplitudeSpectrogram(int bins, int frames)
      : bins_(bins), frames_(frames), data_(static_cast<size_t>(bins) * frames) {
    if (bins <= 0 || frames <= 0)
      throw std::invalid_argument("AmplitudeSpectrogram: dimensions must be positive");
  }

  int bins() const { return bins_; }
  int frames() const { return frames_; }
  size_t size() const { return data_.size(); }

  double& at(int f, int t) { return data_[static_cast<size_t>(t) * bins_ + f]; }
  const double& at(int f, int t) const { return data_[static_cast<size_t>(t) * bins_ + f]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const ComplexSpectrogram& o) const {
    return bins_ == o.bins() && frames_ == o.frames();
  }
  bool same_shape(const AmplitudeSpectrogram& o) const {
    return bins_ == o.bins_ && frames_ == o.frames_;
  }

 private:
  int bins_ = 0;
  int frames_ = 0;
  std::vector<double> data_;
};

// Entrywise magnitude.
inline AmplitudeSpectrogram magnitude(const ComplexSpectrogram& x) {
  AmplitudeSpectrogram a(x.bins(), x.frames());
  for (size_t i = 0; i < x.size(); ++i) a.data()[i] = std::abs(x.data()[i]);
  return a;
}

}  // namespace degli
