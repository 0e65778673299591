// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "degli/adam.hpp"
#include "degli/corpus.hpp"
#include "degli/denoiser_net.hpp"
#include "degli/loss.hpp"
#include "degli/noise.hpp"
#include "degli/projections.hpp"
#include "degli/rng.hpp"
#include "degli/stft.hpp"
#include "degli/tensor.hpp"

namespace degli {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 8;
  long segment_length = 32768;  // about 2 s at 16 kHz
  double snr_low_db = -6.0;
  double snr_high_db = 0.0;
  double initial_lr = 1e-3;
  double lr_decay_factor = 0.31622776601683794;  // 10^-0.5
  int patience_epochs = 2;
  double validation_fraction = 0.1;
  uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency; thread count never changes results

  void validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (segment_length < 2)
      throw std::invalid_argument("TrainConfig: segment_length must be >= 2");
    if (snr_low_db > snr_high_db)
      throw std::invalid_argument("TrainConfig: snr range low must be <= high");
    if (!(initial_lr > 0.0)) throw std::invalid_argument("TrainConfig: initial_lr must be > 0");
    if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0))
      throw std::invalid_argument("TrainConfig: lr_decay_factor must be in (0, 1]");
    if (patience_epochs < 1)
      throw std::invalid_argument("TrainConfig: patience_epochs must be >= 1");
    if (validation_fraction < 0.0 || validation_fraction >= 1.0)
      throw std::invalid_argument("TrainConfig: validation_fraction must be in [0, 1)");
  }
};

struct EpochLog {
  int epoch;  // 1-based
  double train_loss;
  double val_loss;
  double lr;
};

struct TrainResult {
  std::vector<EpochLog> log;
  double final_val_loss = 0.0;
  double baseline_val_loss = 0.0;  // validation loss of the all-zero predictor
  long skipped_segments = 0;
};

inline void write_train_log_csv(const std::vector<EpochLog>& log, std::ostream& os) {
  os << "epoch,train_loss,val_loss,lr\n";
  os.precision(17);
  for (const auto& e : log)
    os << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.lr << '\n';
}

namespace detail {

struct SampleResult {
  bool skipped = true;
  double loss = 0.0;
  double baseline = 0.0;  // l1 of the residual target itself
  std::vector<double> grads;
};

// Residual-denoising pipeline for one segment: corrupt the clean spectrogram
// with complex Gaussian noise at a drawn SNR, run the two fixed projections,
// train F to predict the residual Z - X_clean.
inline void train_sample(const DenoiserModel& model, const Segment& seg,
                         const StftParams& p, const TrainConfig& cfg, uint64_t sample_seed,
                         bool want_grads, SampleResult& out) {
  out.skipped = true;
  out.loss = out.baseline = 0.0;
  ComplexSpectrogram x_clean = stft(std::span<const double>(seg.samples), p);
  double energy = 0.0;
  for (const cplx& v : x_clean.data()) energy += std::norm(v);
  if (energy <= 0.0) return;  // silent segment; reported by the caller

  Rng rng(sample_seed);
  const double snr = rng.uniform(cfg.snr_low_db, cfg.snr_high_db);
  TrainSample s = add_noise(x_clean, snr, rng);
  ComplexSpectrogram y = project_amplitude(s.x_noisy, s.amplitude);
  ComplexSpectrogram z = project_consistent(y, p, cfg.segment_length);

  ComplexSpectrogram target(z.bins(), z.frames());
  for (size_t i = 0; i < z.size(); ++i)
    target.data()[i] = z.data()[i] - x_clean.data()[i];

  const int valid_frames = p.frame_count(seg.valid_length);

  ForwardCache cache;
  ComplexSpectrogram est =
      denoiser_forward(model, s.x_noisy, y, z, want_grads ? &cache : nullptr);
  L1Loss loss = l1_loss(est, target, valid_frames);
  out.loss = loss.value;
  for (int t = 0; t < valid_frames; ++t) {
    const cplx* row = target.frame(t);
    for (int f = 0; f < target.bins(); ++f)
      out.baseline += std::abs(row[f].real()) + std::abs(row[f].imag());
  }
  if (want_grads) {
    DenoiserGradients g = denoiser_backward(model, cache, loss.grad);
    out.grads = std::move(g.weight_grads);
  }
  out.skipped = false;
}

// Runs fn(i) for i in [0, count) across the worker pool. Each index writes
// only its own slot, so results are identical for any thread count.
inline void parallel_indices(int count, int threads, const std::function<void(int)>& fn) {
  const int n = std::max(1, std::min(threads, count));
  if (n == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += n) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Residual-denoising training (mini-batch Adam, l1 loss, validation-driven
// learning-rate decay). Deterministic for a fixed config seed regardless of
// the thread count: per-sample noise streams are derived from (seed, epoch,
// position) and batch gradients are reduced in sample order.
inline TrainResult train(const SplitCorpus& corpus, DenoiserModel& model,
                         const StftParams& p, const TrainConfig& cfg,
                         std::ostream* progress = nullptr,
                         const std::function<void(const EpochLog&)>& on_epoch = {}) {
  cfg.validate();
  p.validate();
  if (corpus.train.empty()) throw std::invalid_argument("train: empty training corpus");
  if (cfg.segment_length < p.window_length)
    throw std::invalid_argument("train: segment_length shorter than the analysis window");
  for (const Segment& s : corpus.train)
    if (static_cast<long>(s.samples.size()) != cfg.segment_length)
      throw std::invalid_argument("train: segment length does not match config");

  const int threads =
      cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());

  AdamState adam(model.param_count());
  std::vector<double> grad_total(model.param_count());
  std::vector<detail::SampleResult> slots(static_cast<size_t>(cfg.batch_size));

  TrainResult result;
  double lr = cfg.initial_lr;
  double best_val = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;
  std::atomic<long> skipped{0};

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // --- training pass ---
    std::vector<size_t> order(corpus.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(cfg.seed, 0x65706f63, static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    long epoch_samples = 0;
    for (size_t pos = 0; pos < order.size(); pos += static_cast<size_t>(cfg.batch_size)) {
      const int count =
          static_cast<int>(std::min<size_t>(cfg.batch_size, order.size() - pos));
      detail::parallel_indices(count, threads, [&](int i) {
        const size_t seg_idx = order[pos + i];
        const uint64_t sample_seed =
            derive_seed(cfg.seed, 0x747261,
                        (static_cast<uint64_t>(epoch) << 32) | (pos + static_cast<size_t>(i)));
        detail::train_sample(model, corpus.train[seg_idx], p, cfg, sample_seed, true,
                             slots[static_cast<size_t>(i)]);
        if (slots[static_cast<size_t>(i)].skipped) skipped.fetch_add(1);
      });
      // ordered reduce
      int used = 0;
      std::fill(grad_total.begin(), grad_total.end(), 0.0);
      for (int i = 0; i < count; ++i) {
        const auto& s = slots[static_cast<size_t>(i)];
        if (s.skipped) {
          if (progress)
            *progress << "skipped zero-energy segment in batch at epoch " << epoch << "\n";
          continue;
        }
        for (size_t k = 0; k < grad_total.size(); ++k) grad_total[k] += s.grads[k];
        epoch_loss += s.loss;
        ++used;
        ++epoch_samples;
      }
      if (used == 0) continue;
      const double inv = 1.0 / static_cast<double>(used);
      for (double& g : grad_total) g *= inv;
      adam_step(model.weights(), grad_total, adam, lr);
    }
    const double train_loss =
        epoch_samples > 0 ? epoch_loss / static_cast<double>(epoch_samples)
                          : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(train_loss))
      throw TrainingDivergedError("train: non-finite training loss at epoch " +
                                  std::to_string(epoch));

    // --- validation pass (noise fixed across epochs) ---
    double val_loss = train_loss;
    if (!corpus.val.empty()) {
      std::vector<detail::SampleResult> vslots(corpus.val.size());
      detail::parallel_indices(static_cast<int>(corpus.val.size()), threads, [&](int i) {
        const uint64_t sample_seed =
            derive_seed(cfg.seed, 0x76616c, static_cast<uint64_t>(i));
        detail::train_sample(model, corpus.val[static_cast<size_t>(i)], p, cfg, sample_seed,
                             false, vslots[static_cast<size_t>(i)]);
      });
      double acc = 0.0, base = 0.0;
      long used = 0;
      for (const auto& s : vslots) {
        if (s.skipped) continue;
        acc += s.loss;
        base += s.baseline;
        ++used;
      }
      if (used > 0) {
        val_loss = acc / static_cast<double>(used);
        result.baseline_val_loss = base / static_cast<double>(used);
      }
    }
    if (!std::isfinite(val_loss))
      throw TrainingDivergedError("train: non-finite validation loss at epoch " +
                                  std::to_string(epoch));

    EpochLog log{epoch, train_loss, val_loss, lr};
    result.log.push_back(log);
    result.final_val_loss = val_loss;
    if (progress)
      *progress << "epoch " << epoch << ": train " << train_loss << "  val " << val_loss
                << "  lr " << lr << "\n";
    if (on_epoch) on_epoch(log);

    // learning-rate schedule
    if (val_loss < best_val) {
      best_val = val_loss;
      stale_epochs = 0;
    } else if (++stale_epochs >= cfg.patience_epochs) {
      lr *= cfg.lr_decay_factor;
      stale_epochs = 0;
    }
  }
  result.skipped_segments = skipped.load();
  return result;
}

}  // namespace degli
