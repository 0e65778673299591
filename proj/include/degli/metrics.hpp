// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "degli/projections.hpp"
#include "degli/stft.hpp"
#include "degli/types.hpp"

namespace degli {

// ||A - |stft(xhat)||_Fro / ||A||_Fro, with the library's two-sided
// Frobenius convention.
inline double spectral_convergence(const AmplitudeSpectrogram& a,
                                   const ComplexSpectrogram& s_hat, int fft_size) {
  if (!a.same_shape(s_hat))
    throw std::invalid_argument("spectral_convergence: shape mismatch");
  double num = 0.0, den = 0.0;
  for (int t = 0; t < a.frames(); ++t) {
    const cplx* col = s_hat.frame(t);
    for (int f = 0; f < a.bins(); ++f) {
      const double w = bin_weight(f, fft_size);
      const double d = a.at(f, t) - std::abs(col[f]);
      num += w * d * d;
      den += w * a.at(f, t) * a.at(f, t);
    }
  }
  if (den <= 0.0) throw UndefinedMetricError("spectral_convergence: zero amplitude");
  return std::sqrt(num / den);
}

inline double spectral_convergence(const AmplitudeSpectrogram& a, const TimeSignal& x_hat,
                                   const StftParams& p) {
  return spectral_convergence(a, stft(std::span<const double>(x_hat.samples), p),
                              p.fft_size);
}

inline constexpr double kSnrCapDb = 300.0;

// SNR in dB after searching an integer shift in [-max_shift, max_shift] and
// an optimal scalar gain (sign-absorbing). Perfect matches are capped at
// 300 dB.
inline double waveform_snr(const TimeSignal& reference, const TimeSignal& estimate,
                           int max_shift) {
  const auto& r = reference.samples;
  const auto& e = estimate.samples;
  const long lr = static_cast<long>(r.size());
  const long le = static_cast<long>(e.size());
  if (lr == 0) throw UndefinedMetricError("waveform_snr: empty reference");
  double ref_energy = 0.0;
  for (double v : r) ref_energy += v * v;
  if (ref_energy <= 0.0) throw UndefinedMetricError("waveform_snr: zero reference");

  // maximize (sum r*e_s)^2 / sum e_s^2 over shifts
  double best_gain_term = 0.0;
  for (long s = -max_shift; s <= max_shift; ++s) {
    // shifted estimate: contributes e[i] at reference index i + s
    const long lo = std::max(0L, s);
    const long hi = std::min(lr, le + s);
    if (lo >= hi) continue;
    double re = 0.0, ee = 0.0;
    for (long i = lo; i < hi; ++i) {
      const double ev = e[static_cast<size_t>(i - s)];
      re += r[static_cast<size_t>(i)] * ev;
      ee += ev * ev;
    }
    if (ee <= 0.0) continue;
    best_gain_term = std::max(best_gain_term, re * re / ee);
  }
  const double resid = ref_energy - best_gain_term;
  if (resid <= ref_energy * 1e-30)
    return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(ref_energy / resid));
}

}  // namespace degli
