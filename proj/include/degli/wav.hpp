// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "degli/types.hpp"

namespace degli {

namespace detail {

inline uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}
inline uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}
inline void wr_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}
inline void wr_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace detail

// Reads a mono RIFF/WAVE file: 16-bit PCM (normalized by 1/32768) or 32-bit
// IEEE float. Other rates, formats and channel counts are rejected rather
// than converted. Pass expected_rate <= 0 to accept any rate.
inline TimeSignal load_wav(const std::string& path, double expected_rate = 16000.0) {
  auto bytes = detail::read_file(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error(path + ": not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  size_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t len = detail::rd_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + len > bytes.size())
      throw std::runtime_error(path + ": truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw std::runtime_error(path + ": short fmt chunk");
      format = detail::rd_u16(bytes.data() + body);
      channels = detail::rd_u16(bytes.data() + body + 2);
      rate = detail::rd_u32(bytes.data() + body + 4);
      bits = detail::rd_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr)
    throw std::runtime_error(path + ": missing fmt or data chunk");
  if (channels != 1)
    throw std::runtime_error(path + ": expected mono, got " + std::to_string(channels) +
                             " channels");
  if (expected_rate > 0 && rate != static_cast<uint32_t>(expected_rate))
    throw std::runtime_error(path + ": sample rate " + std::to_string(rate) +
                             " Hz, expected " + std::to_string(static_cast<long>(expected_rate)));

  TimeSignal out;
  out.sample_rate = static_cast<double>(rate);
  if (format == 1 && bits == 16) {
    const size_t n = data_len / 2;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const int16_t v = static_cast<int16_t>(detail::rd_u16(data + 2 * i));
      out.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const size_t n = data_len / 4;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const uint32_t u = detail::rd_u32(data + 4 * i);
      out.samples[i] = static_cast<double>(std::bit_cast<float>(u));
    }
  } else {
    throw std::runtime_error(path + ": unsupported format (need PCM16 or float32), got format " +
                             std::to_string(format) + " / " + std::to_string(bits) + " bit");
  }
  return out;
}

// Writes a mono 32-bit float WAV. Samples outside [-1, 1] are clipped;
// returns the number of clipped samples.
inline long save_wav(const TimeSignal& signal, const std::string& path) {
  for (double v : signal.samples)
    if (!std::isfinite(v)) throw std::invalid_argument("save_wav: non-finite sample");
  if (signal.sample_rate <= 0)
    throw std::invalid_argument("save_wav: sample rate must be positive");

  long clipped = 0;
  const uint32_t n = static_cast<uint32_t>(signal.samples.size());
  const uint32_t data_len = n * 4;
  std::string buf;
  buf.reserve(44 + data_len);
  buf.append("RIFF");
  detail::wr_u32(buf, 36 + data_len);
  buf.append("WAVE");
  buf.append("fmt ");
  detail::wr_u32(buf, 16);
  detail::wr_u16(buf, 3);  // IEEE float
  detail::wr_u16(buf, 1);  // mono
  const uint32_t rate = static_cast<uint32_t>(signal.sample_rate);
  detail::wr_u32(buf, rate);
  detail::wr_u32(buf, rate * 4);
  detail::wr_u16(buf, 4);
  detail::wr_u16(buf, 32);
  buf.append("data");
  detail::wr_u32(buf, data_len);
  for (uint32_t i = 0; i < n; ++i) {
    double v = signal.samples[i];
    if (v > 1.0) { v = 1.0; ++clipped; }
    else if (v < -1.0) { v = -1.0; ++clipped; }
    detail::wr_u32(buf, std::bit_cast<uint32_t>(static_cast<float>(v)));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
  return clipped;
}

}  // namespace degli
