// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <stdexcept>

#include "degli/types.hpp"

namespace degli {

struct L1Loss {
  double value = 0.0;
  ComplexSpectrogram grad;  // d value / d estimate, subgradient 0 at exact zeros
};

namespace detail {
inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}

// l1 norm of the difference on the stacked real/imaginary representation,
// summed over entries. Frames at index >= valid_frames are excluded
// (used to mask zero-padded tail segments); pass a negative count to keep
// every frame.
inline L1Loss l1_loss(const ComplexSpectrogram& estimate, const ComplexSpectrogram& target,
                      int valid_frames = -1) {
  if (!estimate.same_shape(target))
    throw std::invalid_argument("l1_loss: shape mismatch");
  const int T = valid_frames < 0 ? estimate.frames()
                                 : std::min(valid_frames, estimate.frames());
  L1Loss out;
  out.grad = ComplexSpectrogram(estimate.bins(), estimate.frames());
  for (int t = 0; t < T; ++t) {
    const cplx* e = estimate.frame(t);
    const cplx* g = target.frame(t);
    cplx* d = out.grad.frame(t);
    for (int f = 0; f < estimate.bins(); ++f) {
      const double dre = e[f].real() - g[f].real();
      const double dim = e[f].imag() - g[f].imag();
      out.value += std::abs(dre) + std::abs(dim);
      d[f] = cplx(detail::sign0(dre), detail::sign0(dim));
    }
  }
  return out;
}

}  // namespace degli
