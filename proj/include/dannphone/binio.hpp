// dannphone/binio.hpp

// Copyright 2026  The dannphone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Little-endian byte encoding shared by the binary file formats, plus whole
// file reads and writes.

#ifndef DANNPHONE_BINIO_HPP_
#define DANNPHONE_BINIO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "dannphone/error.hpp"

namespace dannphone {

inline void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string &out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
inline void put_f64s(std::string &out, std::span<const double> v) {
  for (double x : v) put_f64(out, x);
}

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string_view origin)
      : bytes_(bytes), origin_(origin) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  double f64() { return std::bit_cast<double>(take(8)); }
  void f64s(std::span<double> out) {
    need(out.size() * 8);
    for (double &x : out) x = f64();
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > remaining())
      fail(ErrorKind::kParse, origin_, ": truncated at byte ", pos_, " (wanted ", n,
           " more, ", remaining(), " left)");
  }
  std::uint64_t take(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::string read_file_bytes(const std::filesystem::path &path);
/// Writes through a temporary file and renames it into place.
void write_file_bytes(const std::filesystem::path &path, std::string_view bytes);

}  // namespace dannphone

#endif  // DANNPHONE_BINIO_HPP_
