// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <stdexcept>

#include "degli/stft.hpp"
#include "degli/types.hpp"

namespace degli {

// Frobenius norms on spectrograms are taken over the full two-sided
// spectrum: a one-sided bin with a conjugate partner counts twice, DC and
// Nyquist once. Under this inner product the WOLA inverse is the exact
// pseudo-inverse of stft, so project_consistent is an orthogonal projection
// and the alternating-projection descent holds to roundoff.
inline double bin_weight(int f, int fft_size) {
  return (f == 0 || 2 * f == fft_size) ? 1.0 : 2.0;
}

inline double fro_norm2(const ComplexSpectrogram& x, int fft_size) {
  double acc = 0.0;
  for (int t = 0; t < x.frames(); ++t) {
    const cplx* col = x.frame(t);
    for (int f = 0; f < x.bins(); ++f)
      acc += bin_weight(f, fft_size) * std::norm(col[f]);
  }
  return acc;
}

inline double fro_dist2(const ComplexSpectrogram& a, const ComplexSpectrogram& b,
                        int fft_size) {
  if (!a.same_shape(b)) throw std::invalid_argument("fro_dist2: shape mismatch");
  double acc = 0.0;
  for (int t = 0; t < a.frames(); ++t) {
    const cplx* ca = a.frame(t);
    const cplx* cb = b.frame(t);
    for (int f = 0; f < a.bins(); ++f)
      acc += bin_weight(f, fft_size) * std::norm(ca[f] - cb[f]);
  }
  return acc;
}

// Projection onto the consistent set: stft(istft(X)).
inline ComplexSpectrogram project_consistent(const ComplexSpectrogram& x,
                                             const StftParams& p, long signal_length) {
  TimeSignal s = istft(x, p, signal_length);
  return stft(std::span<const double>(s.samples), p);
}

// Projection onto the amplitude-constraint set: keep the phase of X, replace
// its magnitude by A. Division by zero is replaced by zero, with no epsilon
// threshold: only an exact floating-point zero magnitude maps to 0.
inline ComplexSpectrogram project_amplitude(const ComplexSpectrogram& x,
                                            const AmplitudeSpectrogram& a) {
  if (!a.same_shape(x))
    throw std::invalid_argument("project_amplitude: shape mismatch");
  ComplexSpectrogram out(x.bins(), x.frames());
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    const cplx v = x.data()[i];
    const double m = std::abs(v);
    out.data()[i] = m > 0.0 ? v * (a.data()[i] / m) : cplx(0.0);
  }
  return out;
}

// Energy of the inconsistent components: ||X - P_C(X)||^2_Fro.
inline double inconsistency_energy(const ComplexSpectrogram& x, const StftParams& p,
                                   long signal_length) {
  ComplexSpectrogram pc = project_consistent(x, p, signal_length);
  return fro_dist2(x, pc, p.fft_size);
}

}  // namespace degli
