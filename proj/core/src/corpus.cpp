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

#include "foley/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "foley/binary_io.h"
#include "foley/errors.h"

namespace foley {

namespace fs = std::filesystem;

std::string archetype_name(Archetype a) {
  switch (a) {
    case Archetype::kImpulsive:
      return "impulsive";
    case Archetype::kTransient:
      return "transient";
    case Archetype::kStationary:
      return "stationary";
  }
  return "?";
}

std::string carrier_name(Carrier c) {
  switch (c) {
    case Carrier::kNoise:
      return "noise";
    case Carrier::kSine:
      return "sine";
    case Carrier::kChirp:
      return "chirp";
  }
  return "?";
}

LabeledClip synth_clip(const SynthSpec& spec, int sample_rate, double duration) {
  if (sample_rate <= 0 || !(duration > 0.0)) {
    throw DomainError("synth clip needs a positive rate and duration");
  }
  const std::size_t ne = spec.events.size();
  if (spec.decays.size() != ne || spec.amplitudes.size() != ne) {
    throw DomainError("synth spec has " + std::to_string(ne) + " events but " +
                      std::to_string(spec.decays.size()) + " decays and " +
                      std::to_string(spec.amplitudes.size()) + " amplitudes");
  }
  for (std::size_t e = 0; e < ne; ++e) {
    if (!(spec.events[e] >= 0.0 && spec.events[e] < duration)) {
      throw DomainError("event at " + std::to_string(spec.events[e]) + " s lies outside a " +
                        std::to_string(duration) + " s clip");
    }
    if (!(spec.decays[e] > 0.0)) throw DomainError("event decay must be positive");
  }

  const auto n = static_cast<std::size_t>(std::lround(duration * sample_rate));
  const double rate = sample_rate;
  nn::Rng rng(spec.seed);

  std::vector<double> carrier(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i / rate;
    switch (spec.carrier) {
      case Carrier::kNoise:
        carrier[i] = rng.normal() * 0.5;
        break;
      case Carrier::kSine:
        carrier[i] = std::sin(2.0 * std::numbers::pi * spec.frequency * t);
        break;
      case Carrier::kChirp: {
        const double f = spec.frequency * (2.0 - 1.5 * t / duration);
        phase += 2.0 * std::numbers::pi * f / rate;
        carrier[i] = std::sin(phase);
        break;
      }
    }
  }

  std::vector<double> env(n, 0.0);
  if (spec.archetype == Archetype::kStationary) {
    double mean_amp = 0.0;
    for (double a : spec.amplitudes) mean_amp += a;
    if (ne > 0) mean_amp /= static_cast<double>(ne);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = i / rate;
      double v = spec.bed * mean_amp;
      for (std::size_t e = 0; e < ne; ++e) {
        const double z = (t - spec.events[e]) / spec.decays[e];
        v += spec.amplitudes[e] * std::exp(-0.5 * z * z);
      }
      env[i] = v;
    }
  } else {
    const double attack = (spec.archetype == Archetype::kImpulsive ? 0.002 : 0.001) * rate;
    for (std::size_t e = 0; e < ne; ++e) {
      const auto onset = static_cast<std::size_t>(std::lround(spec.events[e] * rate));
      const double tau = spec.decays[e] * rate;
      for (std::size_t i = onset; i < n; ++i) {
        const double k = static_cast<double>(i - onset);
        const double g = k < attack ? k / attack : std::exp(-(k - attack) / tau);
        if (g < 1e-6 && k > attack) break;
        env[i] += spec.amplitudes[e] * g;
      }
    }
  }

  LabeledClip clip;
  clip.wave.sample_rate = sample_rate;
  clip.wave.samples.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    clip.wave.samples[i] = env[i] * carrier[i];
    peak = std::max(peak, std::abs(clip.wave.samples[i]));
  }
  if (peak > 0.99) {
    for (double& v : clip.wave.samples) v *= 0.99 / peak;
  }
  clip.class_id = spec.class_id;
  clip.class_name = spec.class_name;
  clip.spec = spec;
  return clip;
}

SynthSpec random_spec(Archetype a, nn::Rng& rng, double duration, double min_gap) {
  SynthSpec s;
  s.archetype = a;
  int lo_count = 1;
  int hi_count = 3;
  double d_lo = 0.04;
  double d_hi = 0.15;
  double a_lo = 0.4;
  double a_hi = 0.9;
  switch (a) {
    case Archetype::kImpulsive:
      s.carrier = Carrier::kChirp;
      s.frequency = rng.uniform(100.0, 250.0);
      break;
    case Archetype::kTransient:
      s.carrier = Carrier::kNoise;
      lo_count = 2;
      hi_count = 6;
      d_lo = 0.01;
      d_hi = 0.025;
      a_lo = 0.3;
      break;
    case Archetype::kStationary:
      s.carrier = Carrier::kNoise;
      d_lo = 0.012;
      d_hi = 0.03;
      a_lo = 0.3;
      a_hi = 0.8;
      break;
  }
  const int count = lo_count + rng.uniform_int(hi_count - lo_count + 1);
  // Short clips (the tiny preset) shrink the margins proportionally.
  const double lo = std::min(0.05, 0.1 * duration);
  const double hi = duration - std::min(0.15, 0.3 * duration);
  for (int attempt = 0; attempt < 1000 && static_cast<int>(s.events.size()) < count; ++attempt) {
    const double t = rng.uniform(lo, hi);
    const bool clear = std::all_of(s.events.begin(), s.events.end(),
                                   [&](double e) { return std::abs(e - t) >= min_gap; });
    if (clear) s.events.push_back(t);
  }
  std::sort(s.events.begin(), s.events.end());
  for (std::size_t e = 0; e < s.events.size(); ++e) {
    s.decays.push_back(rng.uniform(d_lo, d_hi));
    s.amplitudes.push_back(rng.uniform(a_lo, a_hi));
  }
  s.seed = rng.next_u64();
  return s;
}

int event_frame(Archetype a, double time, int sample_rate, int window, int hop,
                std::size_t frames) {
  const double lead = a == Archetype::kStationary ? window / 2.0 : window / 4.0;
  const double pos = (time * sample_rate - lead) / hop;
  const long f = std::lround(pos);
  return static_cast<int>(std::clamp<long>(f, 0, static_cast<long>(frames) - 1));
}

Corpus synth_corpus(const SynthCorpusConfig& cfg) {
  if (cfg.per_class < 1) throw DomainError("per_class must be >= 1");
  static const std::pair<const char*, Archetype> kClasses[] = {
      {"impact", Archetype::kImpulsive},
      {"steps", Archetype::kTransient},
      {"rain", Archetype::kStationary},
  };
  Corpus c;
  nn::Rng rng(cfg.seed);
  int id = 0;
  for (const auto& [name, arch] : kClasses) {
    c.class_names.emplace_back(name);
    for (int i = 0; i < cfg.per_class; ++i) {
      SynthSpec s = random_spec(arch, rng, cfg.duration);
      s.class_id = id;
      s.class_name = name;
      LabeledClip clip = synth_clip(s, cfg.sample_rate, cfg.duration);
      clip.source = std::string("synth/") + name + "/" + std::to_string(i);
      c.clips.push_back(std::move(clip));
    }
    ++id;
  }
  return c;
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::map<std::string, int> counters;
  std::ostringstream manifest;
  manifest << "path,class_name\n";
  for (const LabeledClip& clip : corpus.clips) {
    const int idx = counters[clip.class_name]++;
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%04d.wav", clip.class_name.c_str(), idx);
    const fs::path rel = fs::path(clip.class_name) / name;
    fs::create_directories(dir / clip.class_name, ec);
    if (ec) throw IoError("cannot create " + (dir / clip.class_name).string());
    write_wav(clip.wave, dir / rel);
    manifest << rel.generic_string() << "," << clip.class_name << "\n";
  }
  bin::write_text_file(dir / "manifest.csv", manifest.str());
}

namespace {

bool is_wav(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".wav";
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Corpus load_directory(const fs::path& root, const LoadOptions& opt) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::vector<std::pair<fs::path, std::string>> entries;
  const fs::path manifest = root / "manifest.csv";
  if (fs::is_regular_file(manifest)) {
    std::istringstream in(bin::read_text_file(manifest));
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty()) continue;
      if (header) {
        header = false;
        if (line.rfind("path", 0) == 0) continue;
      }
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) {
        throw FormatError("manifest line without a class column: " + line);
      }
      entries.emplace_back(root / trim(line.substr(0, comma)), trim(line.substr(comma + 1)));
    }
  } else {
    for (const auto& d : fs::directory_iterator(root)) {
      if (!d.is_directory()) continue;
      for (const auto& f : fs::directory_iterator(d.path())) {
        if (f.is_regular_file() && is_wav(f.path())) {
          entries.emplace_back(f.path(), d.path().filename().string());
        }
      }
    }
  }
  std::sort(entries.begin(), entries.end());

  Corpus c;
  std::set<std::string> names;
  for (const auto& e : entries) names.insert(e.second);
  if (!fs::is_regular_file(manifest)) {
    for (const auto& d : fs::directory_iterator(root)) {
      if (d.is_directory()) names.insert(d.path().filename().string());
    }
  }
  c.class_names.assign(names.begin(), names.end());
  std::map<std::string, int> per_class;
  for (const auto& n : c.class_names) per_class[n] = 0;

  for (const auto& [path, cls] : entries) {
    try {
      LabeledClip clip;
      clip.wave = read_wav(path);
      if (opt.sample_rate > 0) {
        validate_training_format(clip.wave, opt.sample_rate,
                                 opt.length > 0 ? opt.length : clip.wave.size());
      }
      clip.class_name = cls;
      clip.class_id = static_cast<int>(
          std::lower_bound(c.class_names.begin(), c.class_names.end(), cls) -
          c.class_names.begin());
      clip.source = path.generic_string();
      c.clips.push_back(std::move(clip));
      ++per_class[cls];
    } catch (const Error& err) {
      c.failed.push_back(path.generic_string() + ": " + err.what());
    }
  }
  if (c.clips.empty()) c.warnings.push_back("no clips found under " + root.string());
  for (const auto& [name, count] : per_class) {
    if (count == 0) c.warnings.push_back("class '" + name + "' has no clips");
  }
  return c;
}

SplitResult split(const std::vector<LabeledClip>& clips, double val_fraction,
                  std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw DomainError("val_fraction must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < clips.size(); ++i) by_class[clips[i].class_id].push_back(i);

  nn::Rng rng(seed);
  std::vector<bool> to_val(clips.size(), false);
  SplitResult r;
  for (auto& [cls, idx] : by_class) {
    if (idx.size() < 2) {
      r.warnings.push_back("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                           " item(s); all kept for training");
      continue;
    }
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng.uniform_int(static_cast<int>(i + 1))]);
    }
    auto nval = static_cast<std::size_t>(std::lround(val_fraction * idx.size()));
    nval = std::clamp<std::size_t>(nval, 1, idx.size() - 1);
    for (std::size_t k = 0; k < nval; ++k) to_val[idx[k]] = true;
  }
  for (std::size_t i = 0; i < clips.size(); ++i) {
    (to_val[i] ? r.val : r.train).push_back(clips[i]);
  }
  return r;
}

std::string fingerprint(const std::vector<LabeledClip>& clips) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const LabeledClip& c : clips) {
    mix(&c.class_id, sizeof(c.class_id));
    mix(c.class_name.data(), c.class_name.size());
    mix(&c.wave.sample_rate, sizeof(c.wave.sample_rate));
    for (double v : c.wave.samples) {
      const float f = static_cast<float>(v);
      mix(&f, sizeof(f));
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const EventFeature& FeatureCache::get(const LabeledClip& clip, int window, int hop) {
  auto key = std::make_tuple(clip.source, window, hop);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, extract_rms(clip.wave, window, hop)).first;
  return it->second;
}

BatchStream::BatchStream(const std::vector<LabeledClip>& clips, int batch_size, int window,
                         int hop, FeatureCache& cache)
    : clips_(clips), batch_size_(batch_size), window_(window), hop_(hop), cache_(cache) {
  if (batch_size < 1) throw DomainError("batch size must be >= 1");
  order_.resize(clips.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  pos_ = order_.size();
}

void BatchStream::start_epoch(nn::Rng& rng) {
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  for (std::size_t i = order_.size(); i > 1; --i) {
    std::swap(order_[i - 1], order_[rng.uniform_int(static_cast<int>(i))]);
  }
  pos_ = 0;
}

bool BatchStream::next(Batch& out) {
  out.clips.clear();
  out.features.clear();
  if (pos_ >= order_.size()) return false;
  const std::size_t end = std::min(order_.size(), pos_ + static_cast<std::size_t>(batch_size_));
  for (; pos_ < end; ++pos_) {
    const LabeledClip& c = clips_[order_[pos_]];
    out.clips.push_back(&c);
    out.features.push_back(&cache_.get(c, window_, hop_));
  }
  return true;
}

std::size_t BatchStream::batches_per_epoch() const {
  return (order_.size() + batch_size_ - 1) / batch_size_;
}

}  // namespace foley
