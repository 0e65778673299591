// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "degli/types.hpp"

namespace degli {

// Complex DFT of a fixed size. Radix-2 iterative for powers of two, direct
// O(n^2) evaluation otherwise (non-power-of-two sizes only show up in tests
// and unusual configs). Summation order is fixed, so results are
// deterministic.
class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Fft: size must be >= 1");
    pow2_ = (n & (n - 1)) == 0;
    if (pow2_) {
      rev_.resize(n);
      int log2n = 0;
      while ((1 << log2n) < n) ++log2n;
      for (int i = 0; i < n; ++i) {
        unsigned r = 0;
        for (int b = 0; b < log2n; ++b)
          if (i & (1 << b)) r |= 1u << (log2n - 1 - b);
        rev_[i] = static_cast<int>(r);
      }
      tw_.resize(n / 2);
      for (int k = 0; k < n / 2; ++k) {
        double a = -2.0 * std::numbers::pi * k / n;
        tw_[k] = {std::cos(a), std::sin(a)};
      }
    } else {
      tw_.resize(n);
      for (int k = 0; k < n; ++k) {
        double a = -2.0 * std::numbers::pi * k / n;
        tw_[k] = {std::cos(a), std::sin(a)};
      }
    }
  }

  int size() const { return n_; }

  // In-place forward transform (negative-exponent convention).
  void forward(cplx* x) const { transform(x, false); }

  // In-place inverse transform, scaled by 1/n.
  void inverse(cplx* x) const {
    transform(x, true);
    double s = 1.0 / n_;
    for (int i = 0; i < n_; ++i) x[i] *= s;
  }

 private:
  void transform(cplx* x, bool inv) const {
    if (pow2_) {
      for (int i = 0; i < n_; ++i) {
        int j = rev_[i];
        if (i < j) std::swap(x[i], x[j]);
      }
      for (int len = 2; len <= n_; len <<= 1) {
        int half = len >> 1;
        int step = n_ / len;
        for (int i = 0; i < n_; i += len) {
          for (int k = 0; k < half; ++k) {
            cplx w = tw_[static_cast<size_t>(k) * step];
            if (inv) w = std::conj(w);
            cplx u = x[i + k];
            cplx v = x[i + k + half] * w;
            x[i + k] = u + v;
            x[i + k + half] = u - v;
          }
        }
      }
    } else {
      std::vector<cplx> out(n_);
      for (int k = 0; k < n_; ++k) {
        cplx acc = 0.0;
        for (int m = 0; m < n_; ++m) {
          cplx w = tw_[static_cast<size_t>(k) * m % n_];
          if (inv) w = std::conj(w);
          acc += x[m] * w;
        }
        out[k] = acc;
      }
      for (int i = 0; i < n_; ++i) x[i] = out[i];
    }
  }

  int n_;
  bool pow2_ = false;
  std::vector<int> rev_;
  std::vector<cplx> tw_;
};

}  // namespace degli
