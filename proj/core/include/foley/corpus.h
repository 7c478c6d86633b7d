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

#ifndef FOLEY_CORPUS_H_
#define FOLEY_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "foley/event_feature.h"
#include "foley/nn/tensor.h"
#include "foley/wave_io.h"

namespace foley {

enum class Archetype {
  kImpulsive,   // one or a few hits with long exponential tails
  kTransient,   // trains of short clicks
  kStationary,  // noise bed with slow swells
};

enum class Carrier { kNoise, kSine, kChirp };

std::string archetype_name(Archetype a);
std::string carrier_name(Carrier c);

struct SynthSpec {
  Archetype archetype = Archetype::kImpulsive;
  Carrier carrier = Carrier::kNoise;
  // Event onsets (impulsive, transient) or swell centres (stationary), seconds.
  std::vector<double> events;
  // Per-event decay constant (impulsive, transient) or swell width
  // (stationary), seconds.
  std::vector<double> decays;
  std::vector<double> amplitudes;
  double frequency = 220.0;
  // Stationary only: bed level relative to the mean swell amplitude.
  double bed = 0.25;
  std::uint64_t seed = 0;
  int class_id = 0;
  std::string class_name;
};

struct LabeledClip {
  Waveform wave;
  int class_id = 0;
  std::string class_name;
  // File path for loaded clips, "synth/<class>/<index>" for synthesized ones.
  std::string source;
  std::optional<SynthSpec> spec;
};

// Renders a clip of `duration` seconds. DomainError when an event lies
// outside [0, duration) or the per-event vectors disagree in length.
LabeledClip synth_clip(const SynthSpec& spec, int sample_rate, double duration);

// Random spec of the given archetype with events kept `min_gap` seconds
// apart inside [min(0.05, 0.1 d), d - min(0.15, 0.3 d)] for duration d.
SynthSpec random_spec(Archetype a, nn::Rng& rng, double duration, double min_gap = 0.1);

// Frame where the RMS feature of event `time` (seconds) is expected to peak:
// round((time * rate - window / 4) / hop) for onsets, window / 2 in place
// of window / 4 for stationary swell centres; clamped to the valid range.
int event_frame(Archetype a, double time, int sample_rate, int window, int hop,
                std::size_t frames);

struct Corpus {
  std::vector<std::string> class_names;
  std::vector<LabeledClip> clips;
  std::vector<std::string> warnings;
  // Files that could not be decoded or validated, with the reason.
  std::vector<std::string> failed;
};

struct SynthCorpusConfig {
  int per_class = 200;
  int sample_rate = 8000;
  double duration = 1.0;
  std::uint64_t seed = 1;
};

// Three classes (impact, steps, rain) mapped onto the three archetypes.
Corpus synth_corpus(const SynthCorpusConfig& cfg);

// Writes <dir>/<class>/<class>_<index>.wav plus <dir>/manifest.csv.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

struct LoadOptions {
  // When non-zero, every clip must have this rate / length.
  int sample_rate = 0;
  std::size_t length = 0;
};

// Reads <root>/manifest.csv (columns path,class_name) when present, else a
// folder-per-class tree. Classes are sorted by name; clips are ordered by
// path.
Corpus load_directory(const std::filesystem::path& root, const LoadOptions& opt = {});

struct SplitResult {
  std::vector<LabeledClip> train;
  std::vector<LabeledClip> val;
  std::vector<std::string> warnings;
};

// Stratified per class; each side keeps input order.
SplitResult split(const std::vector<LabeledClip>& clips, double val_fraction,
                  std::uint64_t seed);

// Stable content hash of a clip list (hex FNV-1a over labels and samples).
std::string fingerprint(const std::vector<LabeledClip>& clips);

class FeatureCache {
 public:
  const EventFeature& get(const LabeledClip& clip, int window, int hop);
  std::size_t size() const { return cache_.size(); }

 private:
  std::map<std::tuple<std::string, int, int>, EventFeature> cache_;
};

struct Batch {
  std::vector<const LabeledClip*> clips;
  std::vector<const EventFeature*> features;
  std::size_t size() const { return clips.size(); }
};

// Epoch-wise shuffled batches; the last partial batch is kept.
class BatchStream {
 public:
  BatchStream(const std::vector<LabeledClip>& clips, int batch_size, int window, int hop,
              FeatureCache& cache);

  void start_epoch(nn::Rng& rng);
  bool next(Batch& out);
  std::size_t batches_per_epoch() const;

 private:
  const std::vector<LabeledClip>& clips_;
  int batch_size_;
  int window_;
  int hop_;
  FeatureCache& cache_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

}  // namespace foley

#endif  // FOLEY_CORPUS_H_
