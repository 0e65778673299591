// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "degli/types.hpp"

namespace degli {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  long t = 0;

  explicit AdamState(size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
inline void adam_step(std::span<double> weights, std::span<const double> grads,
                      AdamState& state, double lr, const AdamConfig& cfg = {}) {
  const size_t n = weights.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw std::invalid_argument("adam_step: size mismatch");
  for (double g : grads)
    if (!std::isfinite(g)) throw TrainingDivergedError("adam_step: non-finite gradient");
  state.t += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    weights[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

}  // namespace degli
