// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "degli/fft.hpp"
#include "degli/types.hpp"
#include "degli/window.hpp"

namespace degli {

// Analysis parameters shared by the forward transform and the
// least-squares inverse. Frame t covers samples [t*hop, t*hop + window);
// no centering or pre-padding is applied, and the final partial frame is
// zero-padded. fft_size defaults to window_length (no zero-padding).
struct StftParams {
  int window_length = 0;
  int hop_length = 0;
  int fft_size = 0;
  double sample_rate = 0.0;
  std::vector<double> window;

  static StftParams hann(int window_length, int hop_length, int fft_size = 0,
                         double sample_rate = 16000.0) {
    StftParams p;
    p.window_length = window_length;
    p.hop_length = hop_length;
    p.fft_size = fft_size > 0 ? fft_size : window_length;
    p.sample_rate = sample_rate;
    p.window = make_hann(window_length);
    p.validate();
    return p;
  }

  // 64 ms Hann window with 32 ms hop at 16 kHz.
  static StftParams defaults() { return hann(1024, 512, 1024, 16000.0); }

  int bins() const { return fft_size / 2 + 1; }

  // Number of frames needed to cover a signal of the given length.
  int frame_count(long signal_length) const {
    if (signal_length < 1)
      throw std::invalid_argument("frame_count: signal_length must be >= 1");
    if (signal_length <= window_length) return 1;
    long num = signal_length - window_length;
    return static_cast<int>((num + hop_length - 1) / hop_length) + 1;
  }

  void validate() const {
    if (window_length < 2)
      throw std::invalid_argument("StftParams: window_length must be >= 2");
    if (hop_length < 1 || hop_length > window_length)
      throw std::invalid_argument("StftParams: need 1 <= hop_length <= window_length");
    if (fft_size < window_length)
      throw std::invalid_argument("StftParams: fft_size must be >= window_length");
    if (sample_rate <= 0.0)
      throw std::invalid_argument("StftParams: sample_rate must be positive");
    if (static_cast<int>(window.size()) != window_length)
      throw std::invalid_argument("StftParams: window length mismatch");
    for (double w : window)
      if (!std::isfinite(w))
        throw std::invalid_argument("StftParams: window must be finite");
    // Nonzero-overlap-add: once frames repeat periodically, every hop offset
    // must accumulate positive squared-window energy.
    for (int r = 0; r < hop_length; ++r) {
      double acc = 0.0;
      for (int n = r; n < window_length; n += hop_length) acc += window[n] * window[n];
      if (acc <= 0.0)
        throw InvalidWindowError(
            "StftParams: window^2 overlap-add vanishes at hop offset " + std::to_string(r));
    }
  }
};

// Forward STFT: one-sided spectrum per frame, covering the whole signal.
inline ComplexSpectrogram stft(std::span<const double> x, const StftParams& p) {
  p.validate();
  if (x.empty()) throw std::invalid_argument("stft: empty signal");
  const int W = p.window_length, H = p.hop_length, N = p.fft_size;
  const int F = p.bins();
  const int T = p.frame_count(static_cast<long>(x.size()));
  ComplexSpectrogram S(F, T);
  Fft fft(N);
  std::vector<cplx> buf(N);
  for (int t = 0; t < T; ++t) {
    const long start = static_cast<long>(t) * H;
    for (int n = 0; n < W; ++n) {
      const long idx = start + n;
      double v = idx < static_cast<long>(x.size()) ? x[static_cast<size_t>(idx)] : 0.0;
      buf[n] = v * p.window[n];
    }
    std::fill(buf.begin() + W, buf.end(), cplx(0.0));
    fft.forward(buf.data());
    cplx* out = S.frame(t);
    for (int f = 0; f < F; ++f) out[f] = buf[f];
  }
  return S;
}

inline ComplexSpectrogram stft(const TimeSignal& x, const StftParams& p) {
  if (x.sample_rate > 0 && p.sample_rate > 0 && x.sample_rate != p.sample_rate)
    throw std::invalid_argument("stft: signal sample rate does not match params");
  return stft(std::span<const double>(x.samples), p);
}

namespace detail {

// Reconstruct the full two-sided spectrum from a one-sided frame by
// conjugate symmetry; any imaginary content at DC/Nyquist passes through
// and is discarded later by taking the real part (the least-squares
// treatment of those components).
inline void lift_full(const cplx* s, int bins, int n, cplx* full) {
  for (int k = 0; k < bins; ++k) full[k] = s[k];
  for (int k = 1; k <= (n - 1) / 2; ++k) full[n - k] = std::conj(s[k]);
}

}  // namespace detail

// Least-squares inverse STFT (WOLA): per-frame inverse DFT, multiply by the
// analysis window, overlap-add and divide by the accumulated window energy.
// Equals the Moore-Penrose pseudo-inverse of stft for this framing; samples
// the analysis never observes (zero accumulated window energy at the signal
// edges, e.g. sample 0 under a periodic Hann) come back as 0, the
// minimum-norm answer.
inline TimeSignal istft(const ComplexSpectrogram& S, const StftParams& p, long out_length) {
  p.validate();
  if (out_length < 1) throw std::invalid_argument("istft: out_length must be >= 1");
  const int W = p.window_length, H = p.hop_length, N = p.fft_size;
  if (S.bins() != p.bins())
    throw std::invalid_argument("istft: spectrogram bin count does not match params");
  if (S.frames() != p.frame_count(out_length))
    throw std::invalid_argument("istft: frame count does not match out_length");
  const int T = S.frames();

  const long span = static_cast<long>(T - 1) * H + W;
  std::vector<double> acc(static_cast<size_t>(span), 0.0);
  std::vector<double> den(static_cast<size_t>(span), 0.0);
  Fft fft(N);
  std::vector<cplx> buf(N);
  for (int t = 0; t < T; ++t) {
    detail::lift_full(S.frame(t), S.bins(), N, buf.data());
    fft.inverse(buf.data());
    const long start = static_cast<long>(t) * H;
    for (int n = 0; n < W; ++n) {
      acc[static_cast<size_t>(start + n)] += buf[n].real() * p.window[n];
      den[static_cast<size_t>(start + n)] += p.window[n] * p.window[n];
    }
  }

  TimeSignal out;
  out.sample_rate = p.sample_rate;
  out.samples.resize(static_cast<size_t>(out_length));
  const long tail_start = static_cast<long>(T - 1) * H;
  for (long n = 0; n < out_length; ++n) {
    double d = den[static_cast<size_t>(n)];
    if (d > 0.0) {
      out.samples[static_cast<size_t>(n)] = acc[static_cast<size_t>(n)] / d;
    } else if (n < W || n >= tail_start) {
      out.samples[static_cast<size_t>(n)] = 0.0;  // unobserved edge sample
    } else {
      throw InvalidWindowError("istft: window energy vanishes at interior sample " +
                               std::to_string(n));
    }
  }
  return out;
}

}  // namespace degli
