// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end: train the denoiser, reconstruct signals from
// amplitude spectrograms, compare solvers over an iteration grid, and
// inspect checkpoints.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "degli/ampfile.hpp"
#include "degli/checkpoint.hpp"
#include "degli/config.hpp"
#include "degli/corpus.hpp"
#include "degli/degli.hpp"
#include "degli/denoiser_net.hpp"
#include "degli/evaluate.hpp"
#include "degli/solvers.hpp"
#include "degli/train.hpp"
#include "degli/wav.hpp"

namespace {

namespace fs = std::filesystem;

degli::Config load_or_default(const std::string& path) {
  if (path.empty()) return degli::Config{};
  return degli::load_config(path);
}

bool is_ampl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[5] = {};
  in.read(magic, 5);
  return in && std::memcmp(magic, "AMPL1", 5) == 0;
}

std::vector<int> parse_grid(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("empty iteration grid");
  return out;
}

int cmd_train(const std::string& config_path, std::optional<uint64_t> seed_flag,
              int threads_flag) {
  degli::Config cfg = degli::load_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  if (threads_flag > 0) cfg.train.threads = threads_flag;
  cfg.propagate_seed();
  if (cfg.corpus_dir.empty())
    throw std::invalid_argument("train: config must set [paths] corpus_dir");
  if (!fs::is_directory(cfg.corpus_dir))
    throw std::invalid_argument("train: corpus_dir does not exist: " + cfg.corpus_dir);
  fs::create_directories(cfg.output_dir);
  const std::string model_path =
      cfg.model_path.empty() ? cfg.output_dir + "/model.ckpt" : cfg.model_path;
  const std::string log_path = cfg.output_dir + "/train_log.csv";

  degli::StftParams p = cfg.stft_params();
  degli::SplitCorpus corpus =
      degli::split_corpus(cfg.corpus_dir, cfg.train.segment_length,
                          cfg.train.validation_fraction, cfg.seed, cfg.sample_rate);
  std::cerr << "corpus: " << corpus.train.size() << " train / " << corpus.val.size()
            << " validation segments (" << corpus.train_files << "/" << corpus.val_files
            << " files)\n";

  degli::DenoiserModel model = degli::DenoiserModel::make_default();
  model.init_weights(degli::derive_seed(cfg.seed, 0x696e6974));

  std::vector<degli::EpochLog> log_rows;
  auto flush_log = [&] {
    std::ofstream os(log_path, std::ios::trunc);
    degli::write_train_log_csv(log_rows, os);
  };
  try {
    degli::TrainResult result =
        degli::train(corpus, model, p, cfg.train, &std::cerr,
                     [&](const degli::EpochLog& e) {
                       log_rows.push_back(e);
                       flush_log();
                     });
    degli::save_checkpoint(model, model_path);
    std::cout << "checkpoint: " << model_path << "\n"
              << "log: " << log_path << "\n"
              << "final validation loss: " << result.final_val_loss
              << " (zero-residual baseline " << result.baseline_val_loss << ")\n";
  } catch (const degli::TrainingDivergedError&) {
    flush_log();
    throw;
  }
  return 0;
}

int cmd_reconstruct(const std::string& config_path, const std::string& model_path,
                    const std::string& method_str, int iters, const std::string& in_path,
                    const std::string& out_path, const std::string& report_path,
                    double gamma_flag, const std::string& init_str,
                    std::optional<uint64_t> seed_flag) {
  degli::Config cfg = load_or_default(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  cfg.propagate_seed();
  degli::StftParams p = cfg.stft_params();
  degli::Method method = degli::parse_method(method_str);

  const bool have_model = !model_path.empty() && model_path != "none";
  if (method == degli::Method::Degli && !have_model)
    throw std::invalid_argument("reconstruct: --method degli requires --model <checkpoint>");
  if (method != degli::Method::Degli && have_model)
    std::cerr << "warning: --model is ignored for method '" << method_str << "'\n";

  degli::SolverConfig solver = cfg.solver;
  solver.max_iterations = iters;
  if (gamma_flag > 0) solver.gamma = gamma_flag;
  if (init_str == "random") solver.init = degli::PhaseInit::Random;
  else if (init_str != "zero")
    throw std::invalid_argument("reconstruct: --init must be zero or random");
  solver.seed = cfg.seed;

  degli::AmplitudeSpectrogram a;
  long out_length = 0;
  double rescale = 1.0;
  if (is_ampl_file(in_path)) {
    a = degli::load_amplitude(in_path);
    if (a.bins() != p.bins())
      throw std::invalid_argument("reconstruct: amplitude bins do not match stft params");
    out_length = static_cast<long>(a.frames() - 1) * p.hop_length + p.window_length;
  } else {
    degli::TimeSignal x = degli::load_wav(in_path, p.sample_rate);
    if (x.samples.empty()) throw std::invalid_argument("reconstruct: empty input signal");
    const double scale = degli::normalize_rms(x.samples);
    rescale = scale > 0 ? 1.0 / scale : 1.0;
    a = degli::magnitude(degli::stft(x, p));
    out_length = static_cast<long>(x.samples.size());
  }

  degli::ComplexSpectrogram init = degli::make_init(a, solver);
  degli::TimeSignal out;
  degli::ReconstructionReport report;
  if (method == degli::Method::Gla) {
    auto [sig, rep] = degli::gla_run(a, p, init, out_length, solver);
    out = std::move(sig);
    report = std::move(rep);
  } else if (method == degli::Method::Fgla) {
    auto [sig, rep] = degli::fgla_run(a, p, init, out_length, solver);
    out = std::move(sig);
    report = std::move(rep);
  } else {
    degli::NeuralDenoiser den(degli::load_checkpoint(model_path));
    auto [sig, rep] = degli::degli_run(a, p, init, out_length, iters, den,
                                       solver.record_metrics_every);
    out = std::move(sig);
    report = std::move(rep);
  }

  for (double& v : out.samples) v *= rescale;
  const long clipped = degli::save_wav(out, out_path);
  if (clipped > 0) std::cerr << "warning: " << clipped << " samples clipped on save\n";
  if (!report_path.empty()) {
    std::ofstream os(report_path, std::ios::trunc);
    report.write_csv(os);
  }
  if (!report.records.empty()) {
    const auto& last = report.records.back();
    std::cout << method_str << " " << last.iteration
              << " iterations: inconsistency " << last.inconsistency
              << ", spectral convergence " << last.spectral_convergence << ", "
              << last.seconds << " s\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& corpus_dir,
             const std::string& grid_str, const std::string& model_path,
             const std::string& methods_str, const std::string& out_path,
             const std::string& summary_path) {
  degli::Config cfg = load_or_default(config_path);
  degli::StftParams p = cfg.stft_params();
  if (!fs::is_directory(corpus_dir))
    throw std::invalid_argument("eval: corpus dir does not exist: " + corpus_dir);

  std::vector<degli::Method> methods;
  {
    std::stringstream ss(methods_str);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) methods.push_back(degli::parse_method(item));
  }
  std::vector<int> grid = parse_grid(grid_str);

  std::vector<degli::EvalUtterance> utts;
  for (const auto& f : degli::list_wavs(corpus_dir))
    utts.push_back({fs::path(f).filename().string(), degli::load_wav(f, p.sample_rate)});
  if (utts.empty()) throw std::invalid_argument("eval: no wav files in " + corpus_dir);

  std::optional<degli::NeuralDenoiser> den;
  if (!model_path.empty() && model_path != "none")
    den.emplace(degli::load_checkpoint(model_path));

  degli::EvalTable table = degli::evaluate_methods(
      utts, p, methods, grid, den ? &*den : nullptr, cfg.solver.gamma);
  for (const auto& n : table.notes) std::cerr << "note: " << n << "\n";

  {
    std::ofstream os(out_path, std::ios::trunc);
    table.write_csv(os);
  }
  auto summary = degli::summarize(table);
  if (!summary_path.empty()) {
    std::ofstream os(summary_path, std::ios::trunc);
    degli::write_summary_csv(summary, os);
  }
  std::cout << "method iters    mean_sc  median_sc   mean_snr  seconds\n";
  for (const auto& s : summary) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6s %5d %10.5f %10.5f %10.3f %8.3f\n",
                  degli::method_name(s.method), s.iterations, s.sc_mean, s.sc_median,
                  s.snr_mean, s.seconds_mean);
    std::cout << buf;
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_inspect(const std::string& model_path) {
  degli::DenoiserModel model = degli::load_checkpoint(model_path);
  std::cout << degli::architecture_descriptor(model).dump(2) << "\n"
            << "parameters: " << model.param_count() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase reconstruction from amplitude spectrograms (GLA, FGLA, DeGLI)"};
  app.require_subcommand(1);

  std::string config_path, model_path, method = "gla", in_path, out_path, report_path;
  std::string corpus_dir, grid = "1,2,5,10,32,100", methods = "gla,fgla,degli";
  std::string eval_out = "eval.csv", summary_path, init = "zero";
  int iters = 100, threads = 0;
  double gamma = 0.0;
  std::optional<uint64_t> seed;

  auto* t = app.add_subcommand("train", "train the denoiser on a wav corpus");
  t->add_option("--config", config_path, "config file")->required();
  t->add_option("--seed", seed, "override the config seed");
  t->add_option("--threads", threads, "worker threads (results do not depend on this)");

  auto* r = app.add_subcommand("reconstruct", "recover a signal from an amplitude spectrogram");
  r->add_option("--config", config_path, "config file");
  r->add_option("--model", model_path, "checkpoint path or 'none'");
  r->add_option("--method", method, "gla|fgla|degli")->required();
  r->add_option("--iters", iters, "iterations / stacked blocks")->required();
  r->add_option("--in", in_path, "input wav (self-reconstruction) or AMPL1 amplitude file")
      ->required();
  r->add_option("--out", out_path, "output wav")->required();
  r->add_option("--report", report_path, "write per-iteration metrics CSV");
  r->add_option("--gamma", gamma, "FGLA momentum (0,1)");
  r->add_option("--init", init, "zero|random phase init");
  r->add_option("--seed", seed, "seed for random init");

  auto* e = app.add_subcommand("eval", "compare methods over an iteration grid");
  e->add_option("--config", config_path, "config file");
  e->add_option("--corpus", corpus_dir, "directory of wav utterances")->required();
  e->add_option("--grid", grid, "comma-separated iteration counts");
  e->add_option("--model", model_path, "checkpoint for degli rows");
  e->add_option("--methods", methods, "comma-separated subset of gla,fgla,degli");
  e->add_option("--out", eval_out, "per-utterance CSV path");
  e->add_option("--summary", summary_path, "summary CSV path");

  auto* i = app.add_subcommand("inspect-model", "print architecture and parameter count");
  i->add_option("--model", model_path, "checkpoint path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (t->parsed()) return cmd_train(config_path, seed, threads);
    if (r->parsed())
      return cmd_reconstruct(config_path, model_path, method, iters, in_path, out_path,
                             report_path, gamma, init, seed);
    if (e->parsed())
      return cmd_eval(config_path, corpus_dir, grid, model_path, methods, eval_out,
                      summary_path);
    if (i->parsed()) return cmd_inspect(model_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
