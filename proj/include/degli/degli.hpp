// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include "degli/projections.hpp"
#include "degli/solvers.hpp"
#include "degli/types.hpp"

namespace degli {

// Residual estimator plugged into the block: (X, Y, Z) -> R. Implementations
// must be safe to call concurrently from multiple reconstruction runs.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual ComplexSpectrogram apply(const ComplexSpectrogram& x,
                                   const ComplexSpectrogram& y,
                                   const ComplexSpectrogram& z) const = 0;
};

// F = 0: the block reduces to one GLA iteration.
class ZeroDenoiser : public Denoiser {
 public:
  ComplexSpectrogram apply(const ComplexSpectrogram& x, const ComplexSpectrogram&,
                           const ComplexSpectrogram& z) const override {
    return ComplexSpectrogram(x.bins(), x.frames());
  }
};

// F = gamma * (X - Z): the block reduces to one FGLA iteration.
class AffineGammaDenoiser : public Denoiser {
 public:
  explicit AffineGammaDenoiser(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("AffineGammaDenoiser: gamma must lie in (0, 1)");
  }

  ComplexSpectrogram apply(const ComplexSpectrogram& x, const ComplexSpectrogram&,
                           const ComplexSpectrogram& z) const override {
    ComplexSpectrogram r(x.bins(), x.frames());
    for (size_t i = 0; i < x.size(); ++i)
      r.data()[i] = gamma_ * (x.data()[i] - z.data()[i]);
    return r;
  }

  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

// All intermediates of one block application: Y = P_A(X), Z = P_C(Y),
// next_x = Z - F(X, Y, Z).
struct DegliState {
  ComplexSpectrogram x;
  ComplexSpectrogram y;
  ComplexSpectrogram z;
  ComplexSpectrogram next_x;
  int block_index = 0;
};

inline DegliState degli_block(const ComplexSpectrogram& x, const AmplitudeSpectrogram& a,
                              const StftParams& p, long signal_length,
                              const Denoiser& denoiser, int block_index = 0) {
  DegliState st;
  st.block_index = block_index;
  st.x = x;
  st.y = project_amplitude(x, a);
  st.z = project_consistent(st.y, p, signal_length);
  ComplexSpectrogram r = denoiser.apply(st.x, st.y, st.z);
  if (!r.same_shape(x))
    throw ContractViolationError("degli_block: denoiser output shape mismatch");
  for (const cplx& v : r.data())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ContractViolationError("degli_block: denoiser output is not finite");
  st.next_x = ComplexSpectrogram(x.bins(), x.frames());
  for (size_t i = 0; i < r.size(); ++i)
    st.next_x.data()[i] = st.z.data()[i] - r.data()[i];
  return st;
}

// Stacks M blocks with shared denoiser weights, applies P_A once more and
// inverts. The depth M is an inference-time knob; the first blocks of a
// deeper run replay a shallower run exactly.
inline std::pair<TimeSignal, ReconstructionReport> degli_run(
    const AmplitudeSpectrogram& a, const StftParams& p, const ComplexSpectrogram& init,
    long signal_length, int num_blocks, const Denoiser& denoiser,
    int record_metrics_every = 1) {
  if (num_blocks < 1) throw std::invalid_argument("degli_run: num_blocks must be >= 1");
  if (record_metrics_every < 1)
    throw std::invalid_argument("degli_run: record_metrics_every must be >= 1");
  check_amplitude(a);
  if (!a.same_shape(init)) throw std::invalid_argument("degli_run: init shape mismatch");
  ReconstructionReport report;
  detail::StepTimer timer;
  ComplexSpectrogram x = init;
  for (int m = 1; m <= num_blocks; ++m) {
    timer.start();
    DegliState st = degli_block(x, a, p, signal_length, denoiser, m - 1);
    x = std::move(st.next_x);
    timer.stop();
    if (m % record_metrics_every == 0 || m == num_blocks)
      report.records.push_back(detail::record_at(m, x, a, p, signal_length, timer.total()));
  }
  TimeSignal out = istft(project_amplitude(x, a), p, signal_length);
  return {std::move(out), std::move(report)};
}

}  // namespace degli
