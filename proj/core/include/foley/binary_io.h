// Copyright (c) 2026 The foleysynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOLEY_BINARY_IO_H_
#define FOLEY_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace foley::bin {

// Little-endian writer into a growing byte buffer.
class Writer {
 public:
  void u32(std::uint32_t v);
  void f32(float v);
  void f32s(std::span<const float> v);
  void bytes(std::span<const unsigned char> v);
  void text(const std::string& s);

  const std::vector<unsigned char>& buffer() const { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

// Bounds-checked little-endian reader; throws FormatError on truncation.
class Reader {
 public:
  explicit Reader(std::span<const unsigned char> data) : data_(data) {}

  std::uint32_t u32();
  float f32();
  void f32s(std::span<float> out);
  std::string text(std::size_t n);
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const unsigned char> data_;
  std::size_t pos_ = 0;
};

std::uint32_t magic(const char (&tag)[5]);

std::vector<unsigned char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace foley::bin

#endif  // FOLEY_BINARY_IO_H_
