// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "degli/degli.hpp"
#include "degli/rng.hpp"
#include "degli/tensor.hpp"
#include "degli/types.hpp"

namespace degli {

// One 2-D convolution, stride 1, zero padding that preserves the spatial
// size, optionally followed by a gated linear unit. For gated layers out_ch
// is the raw convolution output count; the GLU halves it.
struct ConvLayerSpec {
  int in_ch = 0;
  int out_ch = 0;
  int kernel_time = 1;  // extent along frames
  int kernel_freq = 1;  // extent along bins
  bool glu = false;

  int effective_out() const { return glu ? out_ch / 2 : out_ch; }
  size_t kernel_count() const {
    return static_cast<size_t>(out_ch) * in_ch * kernel_time * kernel_freq;
  }
  size_t param_count() const { return kernel_count() + static_cast<size_t>(out_ch); }
};

// Adds the output of block `from` to the input of block `to`.
struct SkipSpec {
  int from = 0;
  int to = 0;
};

class DenoiserModel {
 public:
  DenoiserModel() = default;

  DenoiserModel(std::vector<ConvLayerSpec> layers, std::vector<SkipSpec> skips)
      : layers_(std::move(layers)), skips_(std::move(skips)) {
    validate_specs();
    offsets_.resize(layers_.size());
    size_t off = 0;
    for (size_t i = 0; i < layers_.size(); ++i) {
      offsets_[i] = off;
      off += layers_[i].param_count();
    }
    weights_.assign(off, 0.0);
  }

  // Four conv-GLU blocks (5 bins x 3 frames kernels, 32 hidden channels),
  // one additive skip from block 0's output into block 2's input, and a
  // final 1x1 conv down to the two residual channels.
  static DenoiserModel make_default() {
    std::vector<ConvLayerSpec> layers = {
        {6, 64, 3, 5, true},  {32, 64, 3, 5, true}, {32, 64, 3, 5, true},
        {32, 64, 3, 5, true}, {32, 2, 1, 1, false},
    };
    return DenoiserModel(std::move(layers), {{0, 2}});
  }

  // Uniform(+-sqrt(6 / (fan_in + fan_out))) kernels, zero biases.
  void init_weights(uint64_t seed) {
    Rng rng(seed);
    for (size_t i = 0; i < layers_.size(); ++i) {
      const ConvLayerSpec& l = layers_[i];
      const double fan_in = static_cast<double>(l.in_ch) * l.kernel_time * l.kernel_freq;
      const double fan_out = static_cast<double>(l.out_ch) * l.kernel_time * l.kernel_freq;
      const double lim = std::sqrt(6.0 / (fan_in + fan_out));
      double* k = kernel(i);
      for (size_t j = 0; j < l.kernel_count(); ++j) k[j] = rng.uniform(-lim, lim);
      double* b = bias(i);
      for (int j = 0; j < l.out_ch; ++j) b[j] = 0.0;
    }
  }

  const std::vector<ConvLayerSpec>& layers() const { return layers_; }
  const std::vector<SkipSpec>& skips() const { return skips_; }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  size_t param_count() const { return weights_.size(); }

  // kernel entry (oc, ic, dt, df) lives at kernel(i)[((oc*in+ic)*kt+dt)*kf+df]
  double* kernel(size_t i) { return weights_.data() + offsets_[i]; }
  const double* kernel(size_t i) const { return weights_.data() + offsets_[i]; }
  double* bias(size_t i) { return weights_.data() + offsets_[i] + layers_[i].kernel_count(); }
  const double* bias(size_t i) const {
    return weights_.data() + offsets_[i] + layers_[i].kernel_count();
  }
  size_t layer_offset(size_t i) const { return offsets_[i]; }

 private:
  void validate_specs() const {
    if (layers_.empty()) throw std::invalid_argument("DenoiserModel: no layers");
    if (layers_.front().in_ch != 6)
      throw std::invalid_argument("DenoiserModel: input must have 6 channels");
    if (layers_.back().glu || layers_.back().effective_out() != 2)
      throw std::invalid_argument("DenoiserModel: final layer must be a plain conv to 2 channels");
    for (size_t i = 0; i < layers_.size(); ++i) {
      const ConvLayerSpec& l = layers_[i];
      if (l.in_ch < 1 || l.out_ch < 1)
        throw std::invalid_argument("DenoiserModel: bad channel count");
      if (l.glu && l.out_ch % 2 != 0)
        throw std::invalid_argument("DenoiserModel: gated layer needs even out_ch");
      if (l.kernel_time < 1 || l.kernel_freq < 1 || l.kernel_time % 2 == 0 ||
          l.kernel_freq % 2 == 0)
        throw std::invalid_argument("DenoiserModel: kernels must be odd-sized");
      if (i > 0 && l.in_ch != layers_[i - 1].effective_out())
        throw std::invalid_argument("DenoiserModel: channel chain mismatch at layer " +
                                    std::to_string(i));
    }
    for (const SkipSpec& s : skips_) {
      if (s.from < 0 || s.to <= s.from || s.to >= static_cast<int>(layers_.size()))
        throw std::invalid_argument("DenoiserModel: bad skip indices");
      if (layers_[static_cast<size_t>(s.from)].effective_out() !=
          layers_[static_cast<size_t>(s.to)].in_ch)
        throw std::invalid_argument("DenoiserModel: skip channel mismatch");
    }
  }

  std::vector<ConvLayerSpec> layers_;
  std::vector<SkipSpec> skips_;
  std::vector<double> weights_;
  std::vector<size_t> offsets_;
};

namespace detail {

// --- convolution kernels -------------------------------------------------
// Frequency is the contiguous axis; all hot loops run along it.

template <int KF>
inline void add_conv_row(double* out, const double* in, const double* w, int n) {
  for (int f = 0; f < n; ++f) {
    double acc = 0.0;
    for (int j = 0; j < KF; ++j) acc += w[j] * in[f + j];
    out[f] += acc;
  }
}

inline void add_conv_row_gen(double* out, const double* in, const double* w, int kf,
                             int n) {
  for (int f = 0; f < n; ++f) {
    double acc = 0.0;
    for (int j = 0; j < kf; ++j) acc += w[j] * in[f + j];
    out[f] += acc;
  }
}

inline void add_conv_row_dispatch(double* out, const double* in, const double* w, int kf,
                                  int n) {
  switch (kf) {
    case 1: add_conv_row<1>(out, in, w, n); break;
    case 3: add_conv_row<3>(out, in, w, n); break;
    case 5: add_conv_row<5>(out, in, w, n); break;
    case 7: add_conv_row<7>(out, in, w, n); break;
    default: add_conv_row_gen(out, in, w, kf, n); break;
  }
}

// Dot product with eight explicit partial sums; the fixed association order
// lets the compiler vectorize the reduction without changing results.
inline double dot_lanes(const double* a, const double* b, int n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
  int f = 0;
  for (; f + 8 <= n; f += 8) {
    s0 += a[f] * b[f];
    s1 += a[f + 1] * b[f + 1];
    s2 += a[f + 2] * b[f + 2];
    s3 += a[f + 3] * b[f + 3];
    s4 += a[f + 4] * b[f + 4];
    s5 += a[f + 5] * b[f + 5];
    s6 += a[f + 6] * b[f + 6];
    s7 += a[f + 7] * b[f + 7];
  }
  for (; f < n; ++f) s0 += a[f] * b[f];
  return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
}

// acc[j] += sum_f a[f] * b[f + j]
inline void add_dot_rows(const double* a, const double* b, double* acc, int kf, int n) {
  for (int j = 0; j < kf; ++j) acc[j] += dot_lanes(a, b + j, n);
}

// Copy a tensor into a zero-padded buffer with pt rows and pf cols of border.
inline void pad_tensor(const Tensor3& in, int pt, int pf, Tensor3& out) {
  const int pr = in.rows + 2 * pt, pc = in.cols + 2 * pf;
  if (out.ch != in.ch || out.rows != pr || out.cols != pc) out.resize(in.ch, pr, pc);
  out.zero();
  for (int c = 0; c < in.ch; ++c)
    for (int t = 0; t < in.rows; ++t)
      std::memcpy(out.row(c, t + pt) + pf, in.row(c, t), sizeof(double) * in.cols);
}

// out = conv(in) + bias, preserving the spatial size.
inline void conv_forward(const ConvLayerSpec& l, const double* kernel, const double* biasv,
                         const Tensor3& in, Tensor3& out, Tensor3& pad_scratch) {
  const int T = in.rows, F = in.cols, kt = l.kernel_time, kf = l.kernel_freq;
  pad_tensor(in, (kt - 1) / 2, (kf - 1) / 2, pad_scratch);
  if (!(out.ch == l.out_ch && out.rows == T && out.cols == F))
    out.resize(l.out_ch, T, F);
  for (int oc = 0; oc < l.out_ch; ++oc) {
    double* plane = out.plane(oc);
    const double b = biasv[oc];
    for (size_t i = 0; i < static_cast<size_t>(T) * F; ++i) plane[i] = b;
    for (int ic = 0; ic < l.in_ch; ++ic) {
      const double* wbase =
          kernel + ((static_cast<size_t>(oc) * l.in_ch + ic) * kt) * kf;
      for (int dt = 0; dt < kt; ++dt) {
        const double* wrow = wbase + static_cast<size_t>(dt) * kf;
        for (int t = 0; t < T; ++t)
          add_conv_row_dispatch(out.row(oc, t), pad_scratch.row(ic, t + dt), wrow, kf, F);
      }
    }
  }
}

// dkernel/dbias accumulation; pad_scratch must hold the padded layer input.
inline void conv_backward_weights(const ConvLayerSpec& l, const Tensor3& pad_in,
                                  const Tensor3& dout, double* dkernel, double* dbias) {
  const int T = dout.rows, F = dout.cols, kt = l.kernel_time, kf = l.kernel_freq;
  std::vector<double> ones(static_cast<size_t>(F), 1.0);
  for (int oc = 0; oc < l.out_ch; ++oc) {
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += dot_lanes(dout.row(oc, t), ones.data(), F);
    dbias[oc] += s;
    for (int ic = 0; ic < l.in_ch; ++ic) {
      double* dk = dkernel + ((static_cast<size_t>(oc) * l.in_ch + ic) * kt) * kf;
      for (int dt = 0; dt < kt; ++dt)
        for (int t = 0; t < T; ++t)
          add_dot_rows(dout.row(oc, t), pad_in.row(ic, t + dt), dk + static_cast<size_t>(dt) * kf,
                       kf, F);
    }
  }
}

// din = correlation of dout with the flipped kernel (gradient w.r.t. input).
inline void conv_backward_data(const ConvLayerSpec& l, const double* kernel,
                               const Tensor3& dout, Tensor3& din, Tensor3& pad_scratch) {
  const int T = dout.rows, F = dout.cols, kt = l.kernel_time, kf = l.kernel_freq;
  pad_tensor(dout, (kt - 1) / 2, (kf - 1) / 2, pad_scratch);
  if (!(din.ch == l.in_ch && din.rows == T && din.cols == F)) din.resize(l.in_ch, T, F);
  din.zero();
  std::vector<double> wflip(static_cast<size_t>(kt) * kf);
  for (int ic = 0; ic < l.in_ch; ++ic) {
    for (int oc = 0; oc < l.out_ch; ++oc) {
      const double* wbase =
          kernel + ((static_cast<size_t>(oc) * l.in_ch + ic) * kt) * kf;
      for (int a = 0; a < kt; ++a)
        for (int b = 0; b < kf; ++b)
          wflip[static_cast<size_t>(a) * kf + b] =
              wbase[static_cast<size_t>(kt - 1 - a) * kf + (kf - 1 - b)];
      for (int a = 0; a < kt; ++a) {
        const double* wrow = wflip.data() + static_cast<size_t>(a) * kf;
        for (int t = 0; t < T; ++t)
          add_conv_row_dispatch(din.row(ic, t), pad_scratch.row(oc, t + a), wrow, kf, F);
      }
    }
  }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// out = a (*) sigmoid(b) on the channel-split halves of pre.
inline void glu_forward(const Tensor3& pre, Tensor3& out, Tensor3& lin, Tensor3& sig) {
  const int h = pre.ch / 2, T = pre.rows, F = pre.cols;
  out.resize(h, T, F);
  lin.resize(h, T, F);
  sig.resize(h, T, F);
  const size_t plane = static_cast<size_t>(T) * F;
  for (int c = 0; c < h; ++c) {
    const double* a = pre.plane(c);
    const double* b = pre.plane(c + h);
    double* o = out.plane(c);
    double* lv = lin.plane(c);
    double* sv = sig.plane(c);
    for (size_t i = 0; i < plane; ++i) {
      const double s = sigmoid(b[i]);
      lv[i] = a[i];
      sv[i] = s;
      o[i] = a[i] * s;
    }
  }
}

inline void glu_backward(const Tensor3& dout, const Tensor3& lin, const Tensor3& sig,
                         Tensor3& dpre) {
  const int h = dout.ch, T = dout.rows, F = dout.cols;
  dpre.resize(2 * h, T, F);
  const size_t plane = static_cast<size_t>(T) * F;
  for (int c = 0; c < h; ++c) {
    const double* d = dout.plane(c);
    const double* lv = lin.plane(c);
    const double* sv = sig.plane(c);
    double* da = dpre.plane(c);
    double* db = dpre.plane(c + h);
    for (size_t i = 0; i < plane; ++i) {
      da[i] = d[i] * sv[i];
      db[i] = d[i] * lv[i] * sv[i] * (1.0 - sv[i]);
    }
  }
}

}  // namespace detail

// Per-layer activations kept for the backward pass.
struct LayerCache {
  Tensor3 lin, sig;  // gated layers
  Tensor3 out;       // plain layers that feed later layers
};

struct ForwardCache {
  bool valid = false;
  Tensor3 input;
  std::vector<LayerCache> layers;
};

inline Tensor3 model_forward(const DenoiserModel& model, const Tensor3& input,
                             ForwardCache* cache = nullptr) {
  const auto& layers = model.layers();
  if (input.ch != layers.front().in_ch)
    throw std::invalid_argument("model_forward: input channel mismatch");
  if (cache) {
    cache->valid = false;
    cache->input = input;
    cache->layers.assign(layers.size(), LayerCache{});
  }
  const size_t n = layers.size();
  std::vector<Tensor3> outs(n);  // per-layer outputs, kept for skip wiring
  Tensor3 pad_scratch, pre, conv_in;
  for (size_t i = 0; i < n; ++i) {
    const Tensor3* in = i == 0 ? &input : &outs[i - 1];
    bool summed = false;
    for (const SkipSpec& s : model.skips()) {
      if (s.to == static_cast<int>(i)) {
        if (!summed) {
          conv_in = *in;
          summed = true;
        }
        const Tensor3& add = outs[static_cast<size_t>(s.from)];
        if (!add.same_shape(conv_in))
          throw std::invalid_argument("model_forward: skip shape mismatch");
        for (size_t j = 0; j < conv_in.v.size(); ++j) conv_in.v[j] += add.v[j];
      }
    }
    const Tensor3& src = summed ? conv_in : *in;
    detail::conv_forward(layers[i], model.kernel(i), model.bias(i), src, pre, pad_scratch);
    if (layers[i].glu) {
      Tensor3 lin, sig;
      detail::glu_forward(pre, outs[i], lin, sig);
      if (cache) {
        cache->layers[i].lin = std::move(lin);
        cache->layers[i].sig = std::move(sig);
      }
    } else {
      outs[i] = pre;
      if (cache && i + 1 < n) cache->layers[i].out = outs[i];
    }
  }
  if (cache) cache->valid = true;
  return std::move(outs.back());
}

struct ModelGradients {
  std::vector<double> weights;  // same layout as DenoiserModel::weights()
  Tensor3 input;
};

inline ModelGradients model_backward(const DenoiserModel& model, const ForwardCache& cache,
                                     const Tensor3& dout) {
  if (!cache.valid)
    throw ContractViolationError("model_backward: forward activations not cached");
  const auto& layers = model.layers();
  const size_t n = layers.size();
  if (cache.layers.size() != n)
    throw ContractViolationError("model_backward: cache does not match model");

  // Rebuild per-layer outputs from the caches (gated: lin * sig).
  std::vector<Tensor3> outs(n);
  for (size_t i = 0; i < n; ++i) {
    if (layers[i].glu) {
      const Tensor3& lin = cache.layers[i].lin;
      const Tensor3& sig = cache.layers[i].sig;
      outs[i].resize(lin.ch, lin.rows, lin.cols);
      for (size_t j = 0; j < lin.v.size(); ++j) outs[i].v[j] = lin.v[j] * sig.v[j];
    } else if (i + 1 < n) {
      outs[i] = cache.layers[i].out;
    }
  }

  ModelGradients g;
  g.weights.assign(model.param_count(), 0.0);
  std::vector<Tensor3> pending(n);  // extra gradients routed through skips

  Tensor3 dh = dout;
  Tensor3 pad_scratch, dpre, din;
  for (size_t ii = n; ii-- > 0;) {
    if (pending[ii].ch != 0) {
      const Tensor3& extra = pending[ii];
      if (!extra.same_shape(dh))
        throw ContractViolationError("model_backward: skip gradient shape mismatch");
      for (size_t j = 0; j < dh.v.size(); ++j) dh.v[j] += extra.v[j];
    }
    const ConvLayerSpec& l = layers[ii];
    if (l.glu) {
      detail::glu_backward(dh, cache.layers[ii].lin, cache.layers[ii].sig, dpre);
    } else {
      dpre = dh;
    }
    // conv_in for this layer: previous output plus any skip sources
    const Tensor3* base = ii == 0 ? &cache.input : &outs[ii - 1];
    Tensor3 conv_in;
    bool summed = false;
    for (const SkipSpec& s : model.skips()) {
      if (s.to == static_cast<int>(ii)) {
        if (!summed) {
          conv_in = *base;
          summed = true;
        }
        const Tensor3& add = outs[static_cast<size_t>(s.from)];
        for (size_t j = 0; j < conv_in.v.size(); ++j) conv_in.v[j] += add.v[j];
      }
    }
    const Tensor3& src = summed ? conv_in : *base;
    detail::pad_tensor(src, (l.kernel_time - 1) / 2, (l.kernel_freq - 1) / 2, pad_scratch);
    detail::conv_backward_weights(l, pad_scratch, dpre,
                                  g.weights.data() + model.layer_offset(ii),
                                  g.weights.data() + model.layer_offset(ii) +
                                      l.kernel_count());
    detail::conv_backward_data(l, model.kernel(ii), dpre, din, pad_scratch);
    // route d(conv_in) to the previous layer and to skip sources
    for (const SkipSpec& s : model.skips()) {
      if (s.to == static_cast<int>(ii)) {
        Tensor3& p = pending[static_cast<size_t>(s.from)];
        if (p.ch == 0) {
          p = din;
        } else {
          for (size_t j = 0; j < p.v.size(); ++j) p.v[j] += din.v[j];
        }
      }
    }
    dh = din;
  }
  g.input = std::move(dh);
  return g;
}

// --- spectrogram-level interface -----------------------------------------

inline ComplexSpectrogram denoiser_forward(const DenoiserModel& model,
                                           const ComplexSpectrogram& x,
                                           const ComplexSpectrogram& y,
                                           const ComplexSpectrogram& z,
                                           ForwardCache* cache = nullptr) {
  Tensor3 in = stack_inputs(x, y, z);
  Tensor3 out = model_forward(model, in, cache);
  return tensor_to_spectrogram(out);
}

struct DenoiserGradients {
  std::vector<double> weight_grads;
  ComplexSpectrogram dx, dy, dz;
};

// Upstream gradient is complex: re/im parts are dL/dRe(R) and dL/dIm(R).
inline DenoiserGradients denoiser_backward(const DenoiserModel& model,
                                           const ForwardCache& cache,
                                           const ComplexSpectrogram& upstream) {
  Tensor3 dout = spectrogram_to_tensor(upstream);
  ModelGradients g = model_backward(model, cache, dout);
  DenoiserGradients out;
  out.weight_grads = std::move(g.weights);
  const int T = g.input.rows, F = g.input.cols;
  ComplexSpectrogram* dst[3];
  out.dx = ComplexSpectrogram(F, T);
  out.dy = ComplexSpectrogram(F, T);
  out.dz = ComplexSpectrogram(F, T);
  dst[0] = &out.dx; dst[1] = &out.dy; dst[2] = &out.dz;
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < T; ++t) {
      const double* re = g.input.row(2 * s, t);
      const double* im = g.input.row(2 * s + 1, t);
      cplx* col = dst[s]->frame(t);
      for (int f = 0; f < F; ++f) col[f] = cplx(re[f], im[f]);
    }
  return out;
}

// Trained residual estimator usable anywhere a Denoiser is expected.
class NeuralDenoiser : public Denoiser {
 public:
  explicit NeuralDenoiser(DenoiserModel model) : model_(std::move(model)) {}

  ComplexSpectrogram apply(const ComplexSpectrogram& x, const ComplexSpectrogram& y,
                           const ComplexSpectrogram& z) const override {
    return denoiser_forward(model_, x, y, z);
  }

  const DenoiserModel& model() const { return model_; }

 private:
  DenoiserModel model_;
};

}  // namespace degli
