// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <stdexcept>

#include "degli/rng.hpp"
#include "degli/types.hpp"

namespace degli {

// A training triple: clean spectrogram, its noisy version, and the clean
// amplitude used as the target by the projection layers.
struct TrainSample {
  ComplexSpectrogram x_clean;
  ComplexSpectrogram x_noisy;
  AmplitudeSpectrogram amplitude;
};

// Adds circular complex Gaussian noise scaled so that the drawn realization
// hits the requested SNR exactly: 10*log10(||X||^2 / ||N||^2) = snr_db, with
// energies as plain entrywise sums over the stored grid.
inline TrainSample add_noise(const ComplexSpectrogram& x_clean, double snr_db, Rng& rng) {
  double signal_energy = 0.0;
  for (const cplx& v : x_clean.data()) signal_energy += std::norm(v);
  if (signal_energy <= 0.0)
    throw std::invalid_argument("add_noise: zero-energy spectrogram");

  TrainSample s;
  s.x_clean = x_clean;
  s.x_noisy = ComplexSpectrogram(x_clean.bins(), x_clean.frames());
  double noise_energy = 0.0;
  for (size_t i = 0; i < x_clean.size(); ++i) {
    const cplx n(rng.gaussian(), rng.gaussian());
    s.x_noisy.data()[i] = n;  // raw noise first, scaled below
    noise_energy += std::norm(n);
  }
  const double target = signal_energy * std::pow(10.0, -snr_db / 10.0);
  const double scale = std::sqrt(target / noise_energy);
  for (size_t i = 0; i < x_clean.size(); ++i)
    s.x_noisy.data()[i] = x_clean.data()[i] + scale * s.x_noisy.data()[i];
  s.amplitude = magnitude(x_clean);
  return s;
}

}  // namespace degli
