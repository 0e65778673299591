// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "degli/corpus.hpp"
#include "degli/degli.hpp"
#include "degli/metrics.hpp"
#include "degli/solvers.hpp"
#include "degli/stft.hpp"

namespace degli {

enum class Method { Gla, Fgla, Degli };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Gla: return "gla";
    case Method::Fgla: return "fgla";
    case Method::Degli: return "degli";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "gla") return Method::Gla;
  if (s == "fgla") return Method::Fgla;
  if (s == "degli") return Method::Degli;
  throw std::invalid_argument("unknown method: " + s + " (expected gla|fgla|degli)");
}

struct EvalRow {
  std::string utterance;
  Method method;
  int iterations;
  double spectral_convergence;
  double inconsistency;
  double snr_db;
  double seconds;
};

struct EvalTable {
  std::vector<EvalRow> rows;
  std::vector<std::string> notes;

  void write_csv(std::ostream& os) const {
    os << "utterance,method,iterations,spectral_convergence,inconsistency,snr_db,seconds\n";
    os.precision(17);
    for (const auto& r : rows)
      os << r.utterance << ',' << method_name(r.method) << ',' << r.iterations << ','
         << r.spectral_convergence << ',' << r.inconsistency << ',' << r.snr_db << ','
         << r.seconds << '\n';
  }
};

struct EvalSummaryRow {
  Method method;
  int iterations;
  long count;
  double sc_mean, sc_median, sc_q1, sc_q3;
  double snr_mean, snr_median, snr_q1, snr_q3;
  double seconds_mean;
};

namespace detail {

// type-7 quantile (linear interpolation), q in [0, 1]
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0.0;
  const double h = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace detail

inline std::vector<EvalSummaryRow> summarize(const EvalTable& table) {
  std::vector<EvalSummaryRow> out;
  for (const auto& r : table.rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const EvalSummaryRow& s) {
      return s.method == r.method && s.iterations == r.iterations;
    });
    if (it == out.end()) {
      out.push_back(EvalSummaryRow{r.method, r.iterations, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    }
  }
  for (auto& s : out) {
    std::vector<double> sc, snr, sec;
    for (const auto& r : table.rows) {
      if (r.method != s.method || r.iterations != s.iterations) continue;
      sc.push_back(r.spectral_convergence);
      snr.push_back(r.snr_db);
      sec.push_back(r.seconds);
    }
    s.count = static_cast<long>(sc.size());
    s.sc_mean = detail::mean(sc);
    s.sc_median = detail::quantile(sc, 0.5);
    s.sc_q1 = detail::quantile(sc, 0.25);
    s.sc_q3 = detail::quantile(sc, 0.75);
    s.snr_mean = detail::mean(snr);
    s.snr_median = detail::quantile(snr, 0.5);
    s.snr_q1 = detail::quantile(snr, 0.25);
    s.snr_q3 = detail::quantile(snr, 0.75);
    s.seconds_mean = detail::mean(sec);
  }
  return out;
}

inline void write_summary_csv(const std::vector<EvalSummaryRow>& rows, std::ostream& os) {
  os << "method,iterations,count,sc_mean,sc_median,sc_q1,sc_q3,"
        "snr_mean,snr_median,snr_q1,snr_q3,seconds_mean\n";
  os.precision(17);
  for (const auto& s : rows)
    os << method_name(s.method) << ',' << s.iterations << ',' << s.count << ',' << s.sc_mean
       << ',' << s.sc_median << ',' << s.sc_q1 << ',' << s.sc_q3 << ',' << s.snr_mean << ','
       << s.snr_median << ',' << s.snr_q1 << ',' << s.snr_q3 << ',' << s.seconds_mean << '\n';
}

struct EvalUtterance {
  std::string name;
  TimeSignal signal;
};

// Runs every method to the largest grid value with zero-phase init, snapshots
// metrics at the grid marks (delivered signal = istft(P_A(X))). Solver step
// time is measured; metric evaluation stays off the clock.
inline EvalTable evaluate_methods(const std::vector<EvalUtterance>& utterances,
                                  const StftParams& p, const std::vector<Method>& methods,
                                  const std::vector<int>& grid,
                                  const Denoiser* degli_denoiser = nullptr,
                                  double fgla_gamma = 0.99) {
  if (grid.empty()) throw std::invalid_argument("evaluate_methods: empty iteration grid");
  for (int g : grid)
    if (g < 1) throw std::invalid_argument("evaluate_methods: grid values must be >= 1");
  std::vector<int> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());
  sorted_grid.erase(std::unique(sorted_grid.begin(), sorted_grid.end()), sorted_grid.end());
  const int max_iters = sorted_grid.back();

  EvalTable table;
  std::vector<Method> effective;
  for (Method m : methods) {
    if (m == Method::Degli && degli_denoiser == nullptr) {
      table.notes.push_back("degli rows skipped: no model provided");
      continue;
    }
    effective.push_back(m);
  }

  for (const auto& utt : utterances) {
    std::vector<double> x = utt.signal.samples;
    normalize_rms(x);
    const long len = static_cast<long>(x.size());
    TimeSignal ref{x, p.sample_rate};
    ComplexSpectrogram s0 = stft(std::span<const double>(x), p);
    AmplitudeSpectrogram a = magnitude(s0);
    ComplexSpectrogram init = zero_phase_init(a);

    for (Method m : effective) {
      ComplexSpectrogram xk = init;
      detail::StepTimer timer;
      size_t next_mark = 0;
      for (int it = 1; it <= max_iters; ++it) {
        timer.start();
        switch (m) {
          case Method::Gla:
            xk = gla_step(xk, a, p, len);
            break;
          case Method::Fgla: {
            auto [next, z] = fgla_step(xk, a, p, len, fgla_gamma);
            xk = std::move(next);
            break;
          }
          case Method::Degli: {
            DegliState st = degli_block(xk, a, p, len, *degli_denoiser, it - 1);
            xk = std::move(st.next_x);
            break;
          }
        }
        timer.stop();
        if (next_mark < sorted_grid.size() && it == sorted_grid[next_mark]) {
          ++next_mark;
          ComplexSpectrogram s = project_amplitude(xk, a);
          TimeSignal xh = istft(s, p, len);
          ComplexSpectrogram s_hat = stft(std::span<const double>(xh.samples), p);
          EvalRow row;
          row.utterance = utt.name;
          row.method = m;
          row.iterations = it;
          row.spectral_convergence = spectral_convergence(a, s_hat, p.fft_size);
          row.inconsistency = fro_dist2(s, s_hat, p.fft_size);
          row.snr_db = waveform_snr(ref, xh, p.hop_length);
          row.seconds = timer.total();
          table.rows.push_back(std::move(row));
        }
      }
    }
  }

  // sorted by (method as listed, iterations), utterances in corpus order
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const EvalRow& a_, const EvalRow& b_) {
                     auto idx = [&](Method m) {
                       return std::find(effective.begin(), effective.end(), m) -
                              effective.begin();
                     };
                     if (idx(a_.method) != idx(b_.method)) return idx(a_.method) < idx(b_.method);
                     return a_.iterations < b_.iterations;
                   });
  return table;
}

}  // namespace degli
