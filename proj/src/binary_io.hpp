// Copyright 2026 The ASRF Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASRF_SRC_BINARY_IO_HPP_
#define ASRF_SRC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "asrf/error.hpp"

namespace asrf::detail {

// Little-endian reader that reports failures with file name and byte offset.
class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    Require(static_cast<bool>(in_), ErrorCode::kIo,
            "cannot open '" + path.string() + "' for reading");
  }

  std::uint64_t offset() const noexcept { return offset_; }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    read_bytes(got.data(), got.size(), "magic");
    if (got != magic) {
      fail("bad magic (expected \"" + std::string(magic) + "\")", 0);
    }
  }

  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    read_bytes(b, 4, what);
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
           std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
  }

  float f32(const char* what) {
    return std::bit_cast<float>(u32(what));
  }

  std::string string(std::size_t n, const char* what) {
    std::string s(n, '\0');
    read_bytes(s.data(), n, what);
    return s;
  }

  [[noreturn]] void fail(const std::string& what, std::uint64_t at) const {
    Fail(ErrorCode::kFormat,
         path_.string() + " at offset " + std::to_string(at) + ": " + what);
  }

 private:
  void read_bytes(void* dst, std::size_t n, const char* what) {
    const std::uint64_t start = offset_;
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      fail(std::string("truncated while reading ") + what, start);
    }
    offset_ += n;
  }

  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t offset_ = 0;
};

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    Require(static_cast<bool>(out_), ErrorCode::kIo,
            "cannot open '" + path.string() + "' for writing");
  }

  void bytes(std::string_view s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

  void u32(std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff),
                       static_cast<char>((v >> 24) & 0xff)};
    out_.write(b, 4);
  }

  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  void close() {
    out_.close();
    Require(!out_.fail(), ErrorCode::kIo, "failed writing '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace asrf::detail

#endif  // ASRF_SRC_BINARY_IO_HPP_
