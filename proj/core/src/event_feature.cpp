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

#include "foley/event_feature.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "foley/binary_io.h"
#include "foley/errors.h"

namespace foley {
namespace {

void check_geometry(int window, int hop) {
  if (window < 1) throw DomainError("window must be >= 1, got " + std::to_string(window));
  if (hop < 1) throw DomainError("hop must be >= 1, got " + std::to_string(hop));
}

}  // namespace

std::size_t frame_count(std::size_t signal_len, int window, int hop) {
  check_geometry(window, hop);
  if (signal_len < static_cast<std::size_t>(window)) {
    throw DomainError("signal too short: " + std::to_string(signal_len) +
                      " samples, window is " + std::to_string(window));
  }
  return (signal_len - static_cast<std::size_t>(window)) / static_cast<std::size_t>(hop) + 1;
}

EventFeature extract_rms(const Waveform& w, int window, int hop) {
  EventFeature f = extract_power(w, window, hop);
  for (double& v : f.values) v = std::sqrt(v);
  return f;
}

EventFeature extract_power(const Waveform& w, int window, int hop) {
  const std::size_t frames = frame_count(w.samples.size(), window, hop);
  EventFeature f;
  f.window = window;
  f.hop = hop;
  f.source_rate = w.sample_rate;
  f.values.resize(frames);
  const double* x = w.samples.data();
  for (std::size_t i = 0; i < frames; ++i) {
    const double* frame = x + i * static_cast<std::size_t>(hop);
    double acc = 0.0;
    for (int t = 0; t < window; ++t) acc += frame[t] * frame[t];
    f.values[i] = acc / window;
  }
  return f;
}

EventFeature scale_gain(const EventFeature& f, double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw DomainError("gain must be a positive finite number, got " + std::to_string(gain));
  }
  EventFeature out = f;
  for (double& v : out.values) v *= gain;
  return out;
}

std::vector<double> block_pool(const EventFeature& f, int blocks) {
  const auto frames = static_cast<int>(f.values.size());
  if (blocks < 1) throw DomainError("block count must be >= 1");
  if (blocks > frames) {
    throw DomainError("block count " + std::to_string(blocks) + " exceeds frame count " +
                      std::to_string(frames));
  }
  const int block_len = (frames + blocks - 1) / blocks;
  std::vector<double> pooled(blocks);
  for (int b = 0; b < blocks; ++b) {
    double m = -std::numeric_limits<double>::infinity();
    for (int p = b * block_len; p < (b + 1) * block_len; ++p) {
      m = std::max(m, f.values[std::min(p, frames - 1)]);
    }
    pooled[b] = m;
  }
  return pooled;
}

void write_feature_csv(const EventFeature& f, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "value\n" << std::setprecision(9);
  for (double v : f.values) out << v << '\n';
  bin::write_text_file(path, out.str());
}

EventFeature read_feature_csv(const std::filesystem::path& path, int window, int hop,
                              int source_rate) {
  std::istringstream in(bin::read_text_file(path));
  EventFeature f;
  f.window = window;
  f.hop = hop;
  f.source_rate = source_rate;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "value") continue;
    }
    try {
      f.values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad CSV value '" + line + "'");
    }
  }
  return f;
}

std::vector<unsigned char> encode_feature(const EventFeature& f) {
  bin::Writer w;
  w.u32(bin::magic("FEV1"));
  w.u32(static_cast<std::uint32_t>(f.window));
  w.u32(static_cast<std::uint32_t>(f.hop));
  w.u32(static_cast<std::uint32_t>(f.values.size()));
  for (double v : f.values) w.f32(static_cast<float>(v));
  return w.buffer();
}

EventFeature decode_feature(const std::vector<unsigned char>& bytes) {
  bin::Reader r(bytes);
  if (r.u32() != bin::magic("FEV1")) throw FormatError("bad event-feature magic");
  EventFeature f;
  f.window = static_cast<int>(r.u32());
  f.hop = static_cast<int>(r.u32());
  const std::uint32_t count = r.u32();
  std::vector<float> raw(count);
  r.f32s(raw);
  f.values.assign(raw.begin(), raw.end());
  return f;
}

void write_feature_bin(const EventFeature& f, const std::filesystem::path& path) {
  bin::write_file(path, encode_feature(f));
}

EventFeature read_feature_bin(const std::filesystem::path& path) {
  return decode_feature(bin::read_file(path));
}

}  // namespace foley
