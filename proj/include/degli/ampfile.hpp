// Copyright 2026 degli authors
// Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "degli/types.hpp"

namespace degli {

// Amplitude container ("AMPL1"):
//   bytes 0..4   magic "AMPL1"
//   u32 LE       bins (F)
//   u32 LE       frames (T)
//   F*T f64 LE   amplitudes, frame-major (frame 0 bins ascending, then frame 1, ...)

namespace detail {

inline void wr_u32_le(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void wr_u64_le(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline void wr_f64_le(std::ostream& os, double d) {
  wr_u64_le(os, std::bit_cast<uint64_t>(d));
}

inline uint32_t rd_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("unexpected end of file");
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

inline uint64_t rd_u64_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("unexpected end of file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double rd_f64_le(std::istream& is) { return std::bit_cast<double>(rd_u64_le(is)); }

}  // namespace detail

inline void save_amplitude(const AmplitudeSpectrogram& a, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write file: " + path);
  os.write("AMPL1", 5);
  detail::wr_u32_le(os, static_cast<uint32_t>(a.bins()));
  detail::wr_u32_le(os, static_cast<uint32_t>(a.frames()));
  for (double v : a.data()) detail::wr_f64_le(os, v);
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline AmplitudeSpectrogram load_amplitude(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open file: " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "AMPL1", 5) != 0)
    throw std::runtime_error(path + ": not an AMPL1 file");
  const uint32_t bins = detail::rd_u32_le(is);
  const uint32_t frames = detail::rd_u32_le(is);
  if (bins == 0 || frames == 0) throw std::runtime_error(path + ": empty dimensions");
  AmplitudeSpectrogram a(static_cast<int>(bins), static_cast<int>(frames));
  for (double& v : a.data()) {
    v = detail::rd_f64_le(is);
    if (v < 0.0) throw std::runtime_error(path + ": negative amplitude entry");
  }
  return a;
}

}  // namespace degli
