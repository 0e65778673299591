// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace degli {

// Periodic (DFT-even) Hann window: w[n] = 0.5 * (1 - cos(2*pi*n / L)).
// Exactly COLA at 50% overlap, which keeps the WOLA inverse a clean
// pseudo-inverse.
inline std::vector<double> make_hann(int window_length) {
  if (window_length < 2)
    throw std::invalid_argument("make_hann: window_length must be >= 2");
  std::vector<double> w(window_length);
  for (int n = 0; n < window_length; ++n)
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / window_length));
  return w;
}

}  // namespace degli
