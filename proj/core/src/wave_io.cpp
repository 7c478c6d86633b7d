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

#include "foley/wave_io.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "foley/errors.h"

namespace foley {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const unsigned char* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

std::string format_name(std::uint16_t code) {
  switch (code) {
    case kFormatPcm: return "PCM";
    case kFormatFloat: return "IEEE float";
    case 6: return "A-law";
    case 7: return "mu-law";
    default: return "code " + std::to_string(code);
  }
}

}  // namespace

std::int16_t quantize_sample(double x) {
  double v = std::nearbyint(x * 32768.0);
  if (v > 32767.0) v = 32767.0;
  if (v < -32768.0) v = -32768.0;
  return static_cast<std::int16_t>(v);
}

Waveform decode_wav(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
    throw FormatError("not a RIFF/WAVE container");
  }
  bool have_fmt = false;
  int rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    std::uint32_t len = get_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (tag_is(chunk, "fmt ")) {
      if (len < 16 || body + len > bytes.size()) throw FormatError("truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      std::uint16_t code = get_u16(f);
      std::uint16_t channels = get_u16(f + 2);
      std::uint32_t sr = get_u32(f + 4);
      std::uint16_t bits = get_u16(f + 14);
      if (code == kFormatExtensible) {
        if (len < 26) throw FormatError("truncated WAVE_FORMAT_EXTENSIBLE fmt chunk");
        code = get_u16(f + 24);
      }
      if (code != kFormatPcm) {
        throw UnsupportedFormatError("unsupported audio_format: " + format_name(code) +
                                     " (only 16-bit PCM is accepted)");
      }
      if (channels != 1) {
        throw UnsupportedFormatError("unsupported channels: " + std::to_string(channels) +
                                     " (only mono is accepted)");
      }
      if (bits != 16) {
        throw UnsupportedFormatError("unsupported bits_per_sample: " + std::to_string(bits) +
                                     " (only 16 is accepted)");
      }
      if (sr == 0) throw FormatError("sample_rate is zero");
      rate = static_cast<int>(sr);
      have_fmt = true;
    } else if (tag_is(chunk, "data")) {
      if (body + len > bytes.size()) throw FormatError("truncated data chunk");
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) throw FormatError("missing fmt chunk");
  if (data == nullptr) throw FormatError("missing data chunk");
  if (data_len % 2 != 0) throw FormatError("data chunk length is not a multiple of the frame size");

  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(data_len / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    auto v = static_cast<std::int16_t>(get_u16(data + 2 * i));
    w.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return w;
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<unsigned char> encode_wav(const Waveform& w) {
  if (w.sample_rate <= 0) throw ValidationError("sample_rate must be positive");
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw NumericError("cannot encode non-finite sample");
  }
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : w.samples) put_u16(out, static_cast<std::uint16_t>(quantize_sample(s)));
  return out;
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  auto bytes = encode_wav(w);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void validate_training_format(const Waveform& w, int expected_rate, std::size_t expected_len) {
  if (w.sample_rate != expected_rate) {
    throw ValidationError("sample rate " + std::to_string(w.sample_rate) + " Hz, expected " +
                          std::to_string(expected_rate) + " Hz");
  }
  if (w.samples.size() != expected_len) {
    throw ValidationError("length " + std::to_string(w.samples.size()) + " samples, expected " +
                          std::to_string(expected_len));
  }
}

}  // namespace foley
