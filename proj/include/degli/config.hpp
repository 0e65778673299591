// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "degli/solvers.hpp"
#include "degli/stft.hpp"
#include "degli/train.hpp"

namespace degli {

// Runtime configuration. File grammar: `key = value` lines grouped under
// `[section]` headers, `#` comments, blank lines ignored. `seed` may appear
// before any section. Unknown keys are rejected.
//
//   seed = 0
//   [stft]    window_length, hop_length, fft_size, sample_rate
//   [train]   epochs, batch_size, segment_length, snr_low_db, snr_high_db,
//             initial_lr, lr_decay_factor, patience_epochs,
//             validation_fraction, threads
//   [solver]  max_iterations, gamma, record_metrics_every
//   [paths]   corpus_dir, model_path, output_dir
struct Config {
  int window_length = 1024;
  int hop_length = 512;
  int fft_size = 1024;
  double sample_rate = 16000.0;

  TrainConfig train;
  SolverConfig solver;

  std::string corpus_dir;
  std::string model_path;
  std::string output_dir = ".";
  uint64_t seed = 0;

  StftParams stft_params() const {
    return StftParams::hann(window_length, hop_length, fft_size, sample_rate);
  }

  // Keep the single seed authoritative for every component.
  void propagate_seed() {
    train.seed = seed;
    solver.seed = seed;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_num(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

inline int parse_int(const std::string& v, const std::string& key) {
  const double d = parse_num(v, key);
  if (d != static_cast<double>(static_cast<long long>(d)))
    throw std::invalid_argument("config: expected integer for " + key + ": '" + v + "'");
  return static_cast<int>(d);
}

}  // namespace detail

inline Config parse_config(std::istream& in, const std::string& origin = "<config>") {
  Config cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "stft" && section != "train" && section != "solver" && section != "paths")
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));

    auto unknown = [&]() {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": unknown key '" +
                                  key + "' in section [" + section + "]");
    };
    if (section.empty()) {
      if (key == "seed") cfg.seed = static_cast<uint64_t>(detail::parse_num(val, key));
      else unknown();
    } else if (section == "stft") {
      if (key == "window_length") cfg.window_length = detail::parse_int(val, key);
      else if (key == "hop_length") cfg.hop_length = detail::parse_int(val, key);
      else if (key == "fft_size") cfg.fft_size = detail::parse_int(val, key);
      else if (key == "sample_rate") cfg.sample_rate = detail::parse_num(val, key);
      else unknown();
    } else if (section == "train") {
      if (key == "epochs") cfg.train.epochs = detail::parse_int(val, key);
      else if (key == "batch_size") cfg.train.batch_size = detail::parse_int(val, key);
      else if (key == "segment_length") cfg.train.segment_length = detail::parse_int(val, key);
      else if (key == "snr_low_db") cfg.train.snr_low_db = detail::parse_num(val, key);
      else if (key == "snr_high_db") cfg.train.snr_high_db = detail::parse_num(val, key);
      else if (key == "initial_lr") cfg.train.initial_lr = detail::parse_num(val, key);
      else if (key == "lr_decay_factor") cfg.train.lr_decay_factor = detail::parse_num(val, key);
      else if (key == "patience_epochs") cfg.train.patience_epochs = detail::parse_int(val, key);
      else if (key == "validation_fraction")
        cfg.train.validation_fraction = detail::parse_num(val, key);
      else if (key == "threads") cfg.train.threads = detail::parse_int(val, key);
      else unknown();
    } else if (section == "solver") {
      if (key == "max_iterations") cfg.solver.max_iterations = detail::parse_int(val, key);
      else if (key == "gamma") cfg.solver.gamma = detail::parse_num(val, key);
      else if (key == "record_metrics_every")
        cfg.solver.record_metrics_every = detail::parse_int(val, key);
      else unknown();
    } else if (section == "paths") {
      if (key == "corpus_dir") cfg.corpus_dir = val;
      else if (key == "model_path") cfg.model_path = val;
      else if (key == "output_dir") cfg.output_dir = val;
      else unknown();
    }
  }
  cfg.propagate_seed();
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return parse_config(in, path);
}

}  // namespace degli
