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

#ifndef FOLEY_EVENT_FEATURE_H_
#define FOLEY_EVENT_FEATURE_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "foley/wave_io.h"

namespace foley {

// Frame-level envelope of a waveform: one non-negative value per analysis
// window of `window` samples, windows advancing by `hop` samples. Only
// windows that lie entirely inside the signal are produced.
struct EventFeature {
  std::vector<double> values;
  int window = 0;
  int hop = 0;
  int source_rate = 0;

  std::size_t frame_count() const { return values.size(); }
  bool same_geometry(const EventFeature& other) const {
    return window == other.window && hop == other.hop && values.size() == other.values.size();
  }
};

// Defaults used for 22.05 kHz material.
inline constexpr int kDefaultWindow = 512;
inline constexpr int kDefaultHop = 128;

// floor((len - window) / hop) + 1; throws DomainError when len < window.
std::size_t frame_count(std::size_t signal_len, int window, int hop);

// values[i] = sqrt(mean(x[i*hop .. i*hop + window - 1]^2))
EventFeature extract_rms(const Waveform& w, int window = kDefaultWindow, int hop = kDefaultHop);

// Square of extract_rms.
EventFeature extract_power(const Waveform& w, int window = kDefaultWindow, int hop = kDefaultHop);

EventFeature scale_gain(const EventFeature& f, double gain);

// Right-pads with the last value to a multiple of `blocks`, splits into equal
// contiguous blocks and returns the max of each.
std::vector<double> block_pool(const EventFeature& f, int blocks);

// Serialization. CSV holds one value per row under a "value" header. The
// binary form is a 16-byte header (magic "FEV1", window, hop, count as LE
// uint32) followed by count LE float32 values.
void write_feature_csv(const EventFeature& f, const std::filesystem::path& path);
EventFeature read_feature_csv(const std::filesystem::path& path, int window, int hop,
                              int source_rate);
std::vector<unsigned char> encode_feature(const EventFeature& f);
EventFeature decode_feature(const std::vector<unsigned char>& bytes);
void write_feature_bin(const EventFeature& f, const std::filesystem::path& path);
EventFeature read_feature_bin(const std::filesystem::path& path);

}  // namespace foley

#endif  // FOLEY_EVENT_FEATURE_H_
