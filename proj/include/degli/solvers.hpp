// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "degli/metrics.hpp"
#include "degli/projections.hpp"
#include "degli/rng.hpp"
#include "degli/stft.hpp"
#include "degli/types.hpp"

namespace degli {

enum class PhaseInit { Zero, Random };

struct SolverConfig {
  int max_iterations = 100;
  double gamma = 0.99;  // FGLA momentum; plain GLA ignores it
  int record_metrics_every = 1;
  PhaseInit init = PhaseInit::Zero;
  uint64_t seed = 0;  // used only for PhaseInit::Random

  void validate() const {
    if (max_iterations < 1)
      throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("SolverConfig: gamma must lie in (0, 1)");
    if (record_metrics_every < 1)
      throw std::invalid_argument("SolverConfig: record_metrics_every must be >= 1");
  }
};

struct IterationRecord {
  int iteration;  // 1-based
  double inconsistency;
  double spectral_convergence;
  double seconds;  // cumulative solver time, metric evaluation excluded
};

struct ReconstructionReport {
  std::vector<IterationRecord> records;

  void write_csv(std::ostream& os) const {
    os << "iteration,inconsistency,spectral_convergence,seconds\n";
    for (const auto& r : records) {
      os.precision(17);
      os << r.iteration << ',' << r.inconsistency << ',' << r.spectral_convergence
         << ',' << r.seconds << '\n';
    }
  }
};

inline void check_amplitude(const AmplitudeSpectrogram& a) {
  for (double v : a.data())
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("amplitude spectrogram must be finite and non-negative");
}

// X0 = A interpreted as a complex spectrogram with phase 0 everywhere.
inline ComplexSpectrogram zero_phase_init(const AmplitudeSpectrogram& a) {
  ComplexSpectrogram x(a.bins(), a.frames());
  for (size_t i = 0; i < a.size(); ++i) x.data()[i] = cplx(a.data()[i], 0.0);
  return x;
}

inline ComplexSpectrogram random_phase_init(const AmplitudeSpectrogram& a, uint64_t seed) {
  ComplexSpectrogram x(a.bins(), a.frames());
  Rng rng(seed);
  for (size_t i = 0; i < a.size(); ++i) {
    double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    x.data()[i] = a.data()[i] * cplx(std::cos(phi), std::sin(phi));
  }
  return x;
}

inline ComplexSpectrogram make_init(const AmplitudeSpectrogram& a, const SolverConfig& cfg) {
  return cfg.init == PhaseInit::Zero ? zero_phase_init(a)
                                     : random_phase_init(a, cfg.seed);
}

// One GLA iteration: P_C(P_A(X)).
inline ComplexSpectrogram gla_step(const ComplexSpectrogram& x,
                                   const AmplitudeSpectrogram& a, const StftParams& p,
                                   long signal_length) {
  return project_consistent(project_amplitude(x, a), p, signal_length);
}

// One FGLA iteration: Z = P_C(P_A(X)), next X = Z - gamma * (X - Z).
// Returns (next X, Z).
inline std::pair<ComplexSpectrogram, ComplexSpectrogram> fgla_step(
    const ComplexSpectrogram& x, const AmplitudeSpectrogram& a, const StftParams& p,
    long signal_length, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("fgla_step: gamma must lie in (0, 1)");
  ComplexSpectrogram z = gla_step(x, a, p, signal_length);
  ComplexSpectrogram next(z.bins(), z.frames());
  for (size_t i = 0; i < z.size(); ++i)
    next.data()[i] = z.data()[i] - gamma * (x.data()[i] - z.data()[i]);
  return {std::move(next), std::move(z)};
}

namespace detail {

class StepTimer {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  void stop() {
    total_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }
  double total() const { return total_; }

 private:
  std::chrono::steady_clock::time_point t0_;
  double total_ = 0.0;
};

// Metrics for "stop here": deliver S = P_A(X), signal = istft(S).
// Reuses stft(istft(S)) for both the spectral convergence and the
// inconsistency of S.
inline IterationRecord record_at(int iter, const ComplexSpectrogram& x,
                                 const AmplitudeSpectrogram& a, const StftParams& p,
                                 long signal_length, double seconds) {
  ComplexSpectrogram s = project_amplitude(x, a);
  TimeSignal xh = istft(s, p, signal_length);
  ComplexSpectrogram s_hat = stft(std::span<const double>(xh.samples), p);
  IterationRecord r;
  r.iteration = iter;
  r.inconsistency = fro_dist2(s, s_hat, p.fft_size);
  r.spectral_convergence = spectral_convergence(a, s_hat, p.fft_size);
  r.seconds = seconds;
  return r;
}

}  // namespace detail

// Classic Griffin-Lim. The delivered signal is istft(P_A(X_final)) so the
// last spectrogram fed to the inverse carries exactly the target amplitude.
inline std::pair<TimeSignal, ReconstructionReport> gla_run(
    const AmplitudeSpectrogram& a, const StftParams& p, const ComplexSpectrogram& init,
    long signal_length, const SolverConfig& cfg) {
  cfg.validate();
  check_amplitude(a);
  if (!a.same_shape(init)) throw std::invalid_argument("gla_run: init shape mismatch");
  ReconstructionReport report;
  detail::StepTimer timer;
  ComplexSpectrogram x = init;
  for (int m = 1; m <= cfg.max_iterations; ++m) {
    timer.start();
    x = gla_step(x, a, p, signal_length);
    timer.stop();
    if (m % cfg.record_metrics_every == 0 || m == cfg.max_iterations)
      report.records.push_back(detail::record_at(m, x, a, p, signal_length, timer.total()));
  }
  TimeSignal out = istft(project_amplitude(x, a), p, signal_length);
  return {std::move(out), std::move(report)};
}

// Momentum variant; reduces to GLA as gamma -> 0.
inline std::pair<TimeSignal, ReconstructionReport> fgla_run(
    const AmplitudeSpectrogram& a, const StftParams& p, const ComplexSpectrogram& init,
    long signal_length, const SolverConfig& cfg) {
  cfg.validate();
  check_amplitude(a);
  if (!a.same_shape(init)) throw std::invalid_argument("fgla_run: init shape mismatch");
  ReconstructionReport report;
  detail::StepTimer timer;
  ComplexSpectrogram x = init;
  for (int m = 1; m <= cfg.max_iterations; ++m) {
    timer.start();
    auto [next, z] = fgla_step(x, a, p, signal_length, cfg.gamma);
    x = std::move(next);
    timer.stop();
    if (m % cfg.record_metrics_every == 0 || m == cfg.max_iterations)
      report.records.push_back(detail::record_at(m, x, a, p, signal_length, timer.total()));
  }
  TimeSignal out = istft(project_amplitude(x, a), p, signal_length);
  return {std::move(out), std::move(report)};
}

}  // namespace degli
