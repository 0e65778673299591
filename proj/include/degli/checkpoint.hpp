// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "degli/ampfile.hpp"
#include "degli/denoiser_net.hpp"

namespace degli {

// Model checkpoint ("DEGLI1"):
//   bytes 0..5  magic "DEGLI1"
//   u64 LE      length of the architecture descriptor
//   descriptor  UTF-8 JSON: layer list ({in, out, kernel_time, kernel_freq,
//               glu}), skip list ({from, to}), parameter_count
//   weights     parameter_count f64 LE, layer order (kernel [oc][ic][kt][kf]
//               row-major, then bias [oc])

inline nlohmann::json architecture_descriptor(const DenoiserModel& model) {
  nlohmann::json j;
  j["format"] = "degli-checkpoint";
  j["input_channels"] = 6;
  j["output_channels"] = 2;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : model.layers()) {
    j["layers"].push_back({{"in", l.in_ch},
                           {"out", l.out_ch},
                           {"kernel_time", l.kernel_time},
                           {"kernel_freq", l.kernel_freq},
                           {"glu", l.glu}});
  }
  j["skips"] = nlohmann::json::array();
  for (const auto& s : model.skips())
    j["skips"].push_back({{"from", s.from}, {"to", s.to}});
  j["parameter_count"] = model.param_count();
  return j;
}

inline void save_checkpoint(const DenoiserModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write file: " + path);
  os.write("DEGLI1", 6);
  const std::string desc = architecture_descriptor(model).dump();
  detail::wr_u64_le(os, desc.size());
  os.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  for (double w : model.weights()) detail::wr_f64_le(os, w);
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline DenoiserModel load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  char magic[6];
  is.read(magic, 6);
  if (!is || std::memcmp(magic, "DEGLI1", 6) != 0)
    throw std::runtime_error(path + ": not a DEGLI1 checkpoint");
  const uint64_t desc_len = detail::rd_u64_le(is);
  std::string desc(desc_len, '\0');
  is.read(desc.data(), static_cast<std::streamsize>(desc_len));
  if (!is) throw std::runtime_error(path + ": truncated descriptor");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(desc);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": bad descriptor: " + e.what());
  }
  std::vector<ConvLayerSpec> layers;
  for (const auto& l : j.at("layers")) {
    ConvLayerSpec spec;
    spec.in_ch = l.at("in").get<int>();
    spec.out_ch = l.at("out").get<int>();
    spec.kernel_time = l.at("kernel_time").get<int>();
    spec.kernel_freq = l.at("kernel_freq").get<int>();
    spec.glu = l.at("glu").get<bool>();
    layers.push_back(spec);
  }
  std::vector<SkipSpec> skips;
  for (const auto& s : j.at("skips"))
    skips.push_back({s.at("from").get<int>(), s.at("to").get<int>()});

  DenoiserModel model(std::move(layers), std::move(skips));
  const uint64_t expect = j.at("parameter_count").get<uint64_t>();
  if (expect != model.param_count())
    throw std::runtime_error(path + ": descriptor parameter_count does not match layers");
  for (double& w : model.weights()) w = detail::rd_f64_le(is);
  char extra;
  if (is.read(&extra, 1))
    throw std::runtime_error(path + ": trailing bytes after weights");
  return model;
}

}  // namespace degli
