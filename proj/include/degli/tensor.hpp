// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstring>
#include <stdexcept>
#include <vector>

#include "degli/types.hpp"

namespace degli {

// Dense channels x time x freq tensor; the frequency axis is contiguous.
struct Tensor3 {
  int ch = 0, rows = 0, cols = 0;  // rows: time frames, cols: frequency bins
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(int c, int r, int k) : ch(c), rows(r), cols(k) {
    v.assign(static_cast<size_t>(c) * r * k, 0.0);
  }

  double* plane(int c) { return v.data() + static_cast<size_t>(c) * rows * cols; }
  const double* plane(int c) const {
    return v.data() + static_cast<size_t>(c) * rows * cols;
  }
  double* row(int c, int t) { return plane(c) + static_cast<size_t>(t) * cols; }
  const double* row(int c, int t) const {
    return plane(c) + static_cast<size_t>(t) * cols;
  }
  double& at(int c, int t, int f) { return row(c, t)[f]; }
  double at(int c, int t, int f) const { return row(c, t)[f]; }

  void resize(int c, int r, int k) {
    ch = c; rows = r; cols = k;
    v.assign(static_cast<size_t>(c) * r * k, 0.0);
  }
  void zero() { std::memset(v.data(), 0, v.size() * sizeof(double)); }
  bool same_shape(const Tensor3& o) const {
    return ch == o.ch && rows == o.rows && cols == o.cols;
  }
};

// Stack Re/Im of X, Y, Z as six channels (in that order).
inline Tensor3 stack_inputs(const ComplexSpectrogram& x, const ComplexSpectrogram& y,
                            const ComplexSpectrogram& z) {
  if (!x.same_shape(y) || !x.same_shape(z))
    throw std::invalid_argument("stack_inputs: shape mismatch");
  const int T = x.frames(), F = x.bins();
  Tensor3 out(6, T, F);
  const ComplexSpectrogram* src[3] = {&x, &y, &z};
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < T; ++t) {
      const cplx* col = src[s]->frame(t);
      double* re = out.row(2 * s, t);
      double* im = out.row(2 * s + 1, t);
      for (int f = 0; f < F; ++f) {
        re[f] = col[f].real();
        im[f] = col[f].imag();
      }
    }
  }
  return out;
}

// First two channels -> complex grid.
inline ComplexSpectrogram tensor_to_spectrogram(const Tensor3& t) {
  if (t.ch < 2) throw std::invalid_argument("tensor_to_spectrogram: need 2 channels");
  ComplexSpectrogram out(t.cols, t.rows);
  for (int r = 0; r < t.rows; ++r) {
    const double* re = t.row(0, r);
    const double* im = t.row(1, r);
    cplx* col = out.frame(r);
    for (int f = 0; f < t.cols; ++f) col[f] = cplx(re[f], im[f]);
  }
  return out;
}

// Complex grid -> two-channel tensor (re, im).
inline Tensor3 spectrogram_to_tensor(const ComplexSpectrogram& s) {
  Tensor3 out(2, s.frames(), s.bins());
  for (int t = 0; t < s.frames(); ++t) {
    const cplx* col = s.frame(t);
    double* re = out.row(0, t);
    double* im = out.row(1, t);
    for (int f = 0; f < s.bins(); ++f) {
      re[f] = col[f].real();
      im[f] = col[f].imag();
    }
  }
  return out;
}

}  // namespace degli
