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

#ifndef FOLEY_WAVE_IO_H_
#define FOLEY_WAVE_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace foley {

// Mono audio with samples in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Decodes a RIFF/WAVE file holding 16-bit mono PCM. Samples are scaled by
// 1/32768. Throws FormatError on a malformed container and
// UnsupportedFormatError (naming the field) for any other encoding.
Waveform read_wav(const std::filesystem::path& path);

// Decodes from an in-memory RIFF image; read_wav is a thin wrapper.
Waveform decode_wav(const std::vector<unsigned char>& bytes);

// Encodes as 16-bit mono PCM. Samples are clamped to [-1, 32767/32768] and
// rounded to the nearest step.
std::vector<unsigned char> encode_wav(const Waveform& w);

void write_wav(const Waveform& w, const std::filesystem::path& path);

// Throws ValidationError unless rate and length match exactly.
void validate_training_format(const Waveform& w, int expected_rate,
                              std::size_t expected_len);

std::int16_t quantize_sample(double x);

}  // namespace foley

#endif  // FOLEY_WAVE_IO_H_
