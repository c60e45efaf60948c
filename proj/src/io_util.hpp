#pragma once

// Little-endian binary stream helpers shared by the dataset and checkpoint
// readers/writers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "trajcast/errors.hpp"

namespace trajcast::detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

template <typename UInt>
void write_uint(std::ostream& out, UInt value) {
  unsigned char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(UInt));
}

template <typename UInt>
UInt read_uint(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(UInt))) {
    throw FormatError(std::string("truncated file while reading ") + what);
  }
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return value;
}

inline void write_f32(std::ostream& out, float value) {
  std::uint32_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  write_uint<std::uint32_t>(out, bits);
}

inline float read_f32(std::istream& in, const char* what) {
  const std::uint32_t bits = read_uint<std::uint32_t>(in, what);
  float value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

inline void write_magic(std::ostream& out, const char magic[4]) {
  out.write(magic, 4);
}

inline void expect_magic(std::istream& in, const char magic[4],
                         const std::string& path) {
  char got[4];
  if (!in.read(got, 4)) {
    throw FormatError("'" + path + "': truncated file while reading magic");
  }
  if (std::memcmp(got, magic, 4) != 0) {
    throw FormatError("'" + path + "': bad magic bytes (expected " +
                      std::string(magic, 4) + ")");
  }
}

inline void expect_version(std::istream& in, std::uint32_t expected,
                           const std::string& path) {
  const std::uint32_t got = read_uint<std::uint32_t>(in, "version");
  if (got != expected) {
    throw FormatError("'" + path + "': unsupported format version " +
                      std::to_string(got) + " (expected " +
                      std::to_string(expected) + ")");
  }
}

}  // namespace trajcast::detail
