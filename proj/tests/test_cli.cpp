// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Spawns the real CLI binary; DEGLI_CLI_PATH comes from the build.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "degli/ampfile.hpp"
#include "degli/checkpoint.hpp"
#include "degli/rng.hpp"
#include "degli/wav.hpp"
#include "support/speech_like.hpp"

using namespace degli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("degli_cli_" + std::to_string(Rng(std::random_device{}()).bits()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const TempDir& tmp, const std::string& args) {
  const std::string out_f = tmp.file("stdout.txt"), err_f = tmp.file("stderr.txt");
  const std::string cmd =
      std::string(DEGLI_CLI_PATH) + " " + args + " >" + out_f + " 2>" + err_f;
  const int status = std::system(cmd.c_str());
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return {status == -1 ? -1 : WEXITSTATUS(status), slurp(out_f), slurp(err_f)};
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// per-iteration csv without the wall-clock column
std::vector<std::string> metric_rows(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    rows.push_back(line.substr(0, last));
  }
  return rows;
}

}  // namespace

TEST_CASE("cli rejects degli without a model") {
  TempDir tmp;
  TimeSignal s{testsupport::speech_like(0.4, 1), 16000.0};
  save_wav(s, tmp.file("in.wav"));
  auto r = run_cli(tmp, "reconstruct --method degli --iters 2 --in " + tmp.file("in.wav") +
                            " --out " + tmp.file("out.wav"));
  CHECK(r.code != 0);
  CHECK(r.err.find("--model") != std::string::npos);
}

TEST_CASE("cli warns when gla gets a model") {
  TempDir tmp;
  TimeSignal s{testsupport::speech_like(0.4, 2), 16000.0};
  save_wav(s, tmp.file("in.wav"));
  auto model = DenoiserModel::make_default();
  model.init_weights(3);
  save_checkpoint(model, tmp.file("m.ckpt"));
  auto r = run_cli(tmp, "reconstruct --method gla --model " + tmp.file("m.ckpt") +
                            " --iters 2 --in " + tmp.file("in.wav") + " --out " +
                            tmp.file("out.wav"));
  CHECK(r.code == 0);
  CHECK(r.err.find("ignored") != std::string::npos);
  CHECK(fs::exists(tmp.file("out.wav")));
}

TEST_CASE("cli reconstruct is deterministic") {
  TempDir tmp;
  TimeSignal s{testsupport::speech_like(0.4, 4), 16000.0};
  save_wav(s, tmp.file("in.wav"));
  const std::string base = "reconstruct --method gla --iters 4 --in " + tmp.file("in.wav");
  auto r1 = run_cli(tmp, base + " --out " + tmp.file("o1.wav") + " --seed 5");
  auto r2 = run_cli(tmp, base + " --out " + tmp.file("o2.wav") + " --seed 5");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(read_bytes(tmp.file("o1.wav")) == read_bytes(tmp.file("o2.wav")));

  auto r3 = run_cli(tmp, "reconstruct --method gla --iters 4 --init random --seed 6 --in " +
                             tmp.file("in.wav") + " --out " + tmp.file("o3.wav"));
  auto r4 = run_cli(tmp, "reconstruct --method gla --iters 4 --init random --seed 6 --in " +
                             tmp.file("in.wav") + " --out " + tmp.file("o4.wav"));
  REQUIRE(r3.code == 0);
  CHECK(read_bytes(tmp.file("o3.wav")) == read_bytes(tmp.file("o4.wav")));
}

TEST_CASE("cli degli runs share their prefix across depths") {
  TempDir tmp;
  TimeSignal s{testsupport::speech_like(0.4, 7), 16000.0};
  save_wav(s, tmp.file("in.wav"));
  auto model = DenoiserModel::make_default();
  model.init_weights(8);
  save_checkpoint(model, tmp.file("m.ckpt"));

  const std::string base = "reconstruct --method degli --model " + tmp.file("m.ckpt") +
                           " --in " + tmp.file("in.wav");
  auto r10 = run_cli(tmp, base + " --iters 10 --out " + tmp.file("o10.wav") +
                              " --report " + tmp.file("r10.csv"));
  auto r5 = run_cli(tmp, base + " --iters 5 --out " + tmp.file("o5.wav") + " --report " +
                             tmp.file("r5.csv"));
  REQUIRE(r10.code == 0);
  REQUIRE(r5.code == 0);
  auto rows10 = metric_rows(tmp.file("r10.csv"));
  auto rows5 = metric_rows(tmp.file("r5.csv"));
  REQUIRE(rows10.size() == 10);
  REQUIRE(rows5.size() == 5);
  for (size_t i = 0; i < 5; ++i) CHECK(rows10[i] == rows5[i]);
}

TEST_CASE("cli reconstructs from an amplitude container") {
  TempDir tmp;
  TimeSignal s{testsupport::speech_like(0.4, 9), 16000.0};
  auto p = StftParams::defaults();
  auto a = magnitude(stft(s, p));
  save_amplitude(a, tmp.file("a.ampl"));
  auto r = run_cli(tmp, "reconstruct --method fgla --iters 3 --in " + tmp.file("a.ampl") +
                            " --out " + tmp.file("out.wav"));
  REQUIRE(r.code == 0);
  auto out = load_wav(tmp.file("out.wav"));
  CHECK(out.samples.size() ==
        static_cast<size_t>((a.frames() - 1) * p.hop_length + p.window_length));
}

TEST_CASE("cli eval produces the grid") {
  TempDir tmp;
  fs::create_directories(tmp.path / "corpus");
  for (int i = 0; i < 2; ++i) {
    TimeSignal s{testsupport::speech_like(0.5, 20 + static_cast<uint64_t>(i)), 16000.0};
    save_wav(s, (tmp.path / "corpus" / ("u" + std::to_string(i) + ".wav")).string());
  }
  auto r = run_cli(tmp, "eval --corpus " + (tmp.path / "corpus").string() +
                            " --grid 1,2 --methods gla,fgla --out " + tmp.file("eval.csv") +
                            " --summary " + tmp.file("summary.csv"));
  REQUIRE(r.code == 0);
  std::ifstream in(tmp.file("eval.csv"));
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "utterance,method,iterations,spectral_convergence,inconsistency,snr_db,seconds");
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);  // 2 utterances x 2 methods x 2 grid points
  CHECK(fs::exists(tmp.file("summary.csv")));
}

TEST_CASE("cli inspect-model prints the descriptor") {
  TempDir tmp;
  auto model = DenoiserModel::make_default();
  model.init_weights(33);
  save_checkpoint(model, tmp.file("m.ckpt"));
  auto r = run_cli(tmp, "inspect-model --model " + tmp.file("m.ckpt"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("degli-checkpoint") != std::string::npos);
  CHECK(r.out.find("parameters: 98242") != std::string::npos);
}

TEST_CASE("cli train smoke run with config") {
  TempDir tmp;
  fs::create_directories(tmp.path / "corpus");
  for (int i = 0; i < 2; ++i) {
    TimeSignal s{testsupport::speech_like(0.6, 30 + static_cast<uint64_t>(i)), 16000.0};
    save_wav(s, (tmp.path / "corpus" / ("u" + std::to_string(i) + ".wav")).string());
  }
  {
    std::ofstream cfgf(tmp.file("train.cfg"));
    cfgf << "seed = 4\n[stft]\nwindow_length = 256\nhop_length = 128\nfft_size = 256\n"
         << "[train]\nepochs = 1\nbatch_size = 2\nsegment_length = 4096\n"
         << "validation_fraction = 0.5\n"
         << "[paths]\ncorpus_dir = " << (tmp.path / "corpus").string() << "\n"
         << "output_dir = " << (tmp.path / "out1").string() << "\n";
  }
  auto r = run_cli(tmp, "train --config " + tmp.file("train.cfg"));
  REQUIRE(r.code == 0);
  CHECK(fs::exists(tmp.path / "out1" / "model.ckpt"));
  CHECK(fs::exists(tmp.path / "out1" / "train_log.csv"));
  auto model = load_checkpoint((tmp.path / "out1" / "model.ckpt").string());
  CHECK(model.param_count() == 98242);
}
