// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "sodkit/error.hpp"
#include "sodkit/freq.hpp"

namespace sodkit {

// FTM1 tensor file: 8-byte magic "FTM1\0\0\0\0", u32 LE h, w, c, then h*w*c
// IEEE-754 binary32 LE values in row-major channel-last order.

inline constexpr std::array<char, 8> kFtmMagic{'F', 'T', 'M', '1', '\0', '\0', '\0', '\0'};
inline constexpr std::size_t kFtmHeaderBytes = 8 + 3 * 4;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_ftm(const FeatureTensor& t) {
  const auto limit = std::numeric_limits<std::uint32_t>::max();
  if (t.height() > limit || t.width() > limit || t.channels() > limit) {
    throw FormatError("tensor dimensions exceed the FTM1 32-bit limit");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFtmHeaderBytes + 4 * t.size());
  out.insert(out.end(), kFtmMagic.begin(), kFtmMagic.end());
  detail::put_u32(out, static_cast<std::uint32_t>(t.height()));
  detail::put_u32(out, static_cast<std::uint32_t>(t.width()));
  detail::put_u32(out, static_cast<std::uint32_t>(t.channels()));
  for (double v : t.data()) detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

inline FeatureTensor decode_ftm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kFtmHeaderBytes) {
    throw FormatError("FTM1: truncated header (" + std::to_string(bytes.size()) + " bytes)");
  }
  if (std::memcmp(bytes.data(), kFtmMagic.data(), kFtmMagic.size()) != 0) {
    throw FormatError("FTM1: bad magic");
  }
  const std::uint64_t h = detail::get_u32(bytes.data() + 8);
  const std::uint64_t w = detail::get_u32(bytes.data() + 12);
  const std::uint64_t c = detail::get_u32(bytes.data() + 16);
  if (h == 0 || w == 0 || c == 0) throw FormatError("FTM1: zero dimension");
  const std::uint64_t count = h * w * c;
  const std::uint64_t expected = kFtmHeaderBytes + 4 * count;
  if (bytes.size() != expected) {
    throw FormatError("FTM1: expected " + std::to_string(expected) + " bytes for " +
                      std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c) +
                      ", got " + std::to_string(bytes.size()));
  }
  std::vector<double> data(count);
  const std::uint8_t* p = bytes.data() + kFtmHeaderBytes;
  for (std::uint64_t n = 0; n < count; ++n, p += 4) {
    data[n] = std::bit_cast<float>(detail::get_u32(p));
  }
  return FeatureTensor(h, w, c, std::move(data));
}

inline void write_ftm(const std::filesystem::path& path, const FeatureTensor& t) {
  const auto bytes = encode_ftm(t);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("failed writing '" + path.string() + "'");
}

inline FeatureTensor read_ftm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path.string() + ": cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_ftm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace sodkit
