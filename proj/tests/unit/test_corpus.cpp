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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "foley/corpus.h"
#include "foley/errors.h"
#include "test_util.h"

namespace foley {
namespace {

namespace fs = std::filesystem;
using nn::Rng;

constexpr int kRate = 8000;
constexpr int kW = 256;
constexpr int kH = 64;

Waveform tone(int n, double f = 300.0, int rate = kRate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (int i = 0; i < n; ++i) w.samples[i] = 0.3 * std::sin(2 * 3.141592653589793 * f * i / rate);
  return w;
}

TEST(Synth, ZeroEventsIsSilent) {
  for (Archetype a : {Archetype::kImpulsive, Archetype::kTransient, Archetype::kStationary}) {
    SynthSpec s;
    s.archetype = a;
    const LabeledClip c = synth_clip(s, kRate, 1.0);
    EXPECT_EQ(c.wave.samples.size(), 8000u);
    for (double v : extract_rms(c.wave, kW, kH).values) EXPECT_LT(v, 1e-9);
  }
}

TEST(Synth, SingleImpulsiveEventPeaksAtOnset) {
  for (Carrier car : {Carrier::kNoise, Carrier::kSine, Carrier::kChirp}) {
    SynthSpec s;
    s.archetype = Archetype::kImpulsive;
    s.carrier = car;
    s.events = {0.5};
    s.decays = {0.08};
    s.amplitudes = {0.8};
    s.seed = 3;
    const EventFeature f = extract_rms(synth_clip(s, kRate, 1.0).wave, kW, kH);
    const int argmax = static_cast<int>(std::max_element(f.values.begin(), f.values.end()) -
                                        f.values.begin());
    const int want = event_frame(Archetype::kImpulsive, 0.5, kRate, kW, kH, f.frame_count());
    EXPECT_LE(std::abs(argmax - want), 2) << carrier_name(car);
    // Independent of the helper: onset sample 4000 lies in frames whose
    // window [64 i, 64 i + 256) covers it, i.e. 59..62.
    EXPECT_GE(argmax, 59 - 2);
    EXPECT_LE(argmax, 62 + 2);
  }
}

TEST(Synth, DeterministicAndValidated) {
  Rng rng(1);
  const SynthSpec s = random_spec(Archetype::kTransient, rng, 1.0);
  EXPECT_EQ(synth_clip(s, kRate, 1.0).wave.samples, synth_clip(s, kRate, 1.0).wave.samples);
  SynthSpec bad = s;
  bad.events.back() = 1.2;
  EXPECT_THROW(synth_clip(bad, kRate, 1.0), DomainError);
  bad = s;
  bad.decays.pop_back();
  EXPECT_THROW(synth_clip(bad, kRate, 1.0), DomainError);
}

TEST(Synth, PeaksMatchSpecOverRandomSpecs) {
  Rng rng(2);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Archetype a = static_cast<Archetype>(trial % 3);
    const SynthSpec s = random_spec(a, rng, 1.0);
    const LabeledClip c = synth_clip(s, kRate, 1.0);
    for (double v : c.wave.samples) ASSERT_LE(std::abs(v), 1.0);
    const EventFeature f = extract_rms(c.wave, kW, kH);
    const int frames = static_cast<int>(f.frame_count());
    // Events are >= 0.1 s = 12.5 frames apart; search half of that around each.
    for (double t : s.events) {
      const int want = event_frame(a, t, kRate, kW, kH, f.frame_count());
      const int lo = std::max(0, want - 6), hi = std::min(frames - 1, want + 6);
      int best = lo;
      for (int i = lo; i <= hi; ++i) {
        if (f.values[i] > f.values[best]) best = i;
      }
      EXPECT_LE(std::abs(best - want), 2)
          << archetype_name(a) << " trial " << trial << " event " << t;
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(SynthCorpus, ShapeOrderAndDeterminism) {
  SynthCorpusConfig cfg;
  cfg.per_class = 5;
  const Corpus a = synth_corpus(cfg);
  EXPECT_EQ(a.class_names, (std::vector<std::string>{"impact", "steps", "rain"}));
  ASSERT_EQ(a.clips.size(), 15u);
  EXPECT_EQ(a.clips[0].class_id, 0);
  EXPECT_EQ(a.clips[14].class_id, 2);
  EXPECT_EQ(a.clips[7].source, "synth/steps/2");
  for (const LabeledClip& c : a.clips) EXPECT_NO_THROW(validate_training_format(c.wave, 8000, 8000));
  EXPECT_EQ(fingerprint(a.clips), fingerprint(synth_corpus(cfg).clips));
  cfg.seed = 2;
  EXPECT_NE(fingerprint(a.clips), fingerprint(synth_corpus(cfg).clips));
}

TEST(LoadDirectory, SevenFoldersGiveSevenClasses) {
  testing::TempDir dir;
  const std::vector<std::string> names = {"DogBark", "Footstep", "GunShot", "Keyboard",
                                          "MovingMotorVehicle", "Rain", "Sneeze_Cough"};
  for (auto it = names.rbegin(); it != names.rend(); ++it) {
    fs::create_directories(dir / *it);
    write_wav(tone(800), dir / *it / "b.wav");
    write_wav(tone(800, 500.0), dir / *it / "a.wav");
  }
  const Corpus c = load_directory(dir.path());
  EXPECT_EQ(c.class_names, names);
  ASSERT_EQ(c.clips.size(), 14u);
  EXPECT_EQ(c.clips[0].class_name, "DogBark");
  EXPECT_EQ(fs::path(c.clips[0].source).filename(), "a.wav");
  EXPECT_EQ(c.clips[13].class_id, 6);
}

TEST(LoadDirectory, EmptyRootWarns) {
  testing::TempDir dir;
  const Corpus c = load_directory(dir.path());
  EXPECT_TRUE(c.clips.empty());
  EXPECT_FALSE(c.warnings.empty());
}

TEST(LoadDirectory, DuplicateNamesKeptEmptyClassWarnsBadFilesListed) {
  testing::TempDir dir;
  fs::create_directories(dir / "x");
  fs::create_directories(dir / "y");
  fs::create_directories(dir / "z");
  write_wav(tone(800), dir / "x" / "same.wav");
  write_wav(tone(800, 440.0), dir / "y" / "same.wav");
  {
    std::ofstream bad(dir / "y" / "broken.wav");
    bad << "not a wav";
  }
  const Corpus c = load_directory(dir.path());
  ASSERT_EQ(c.clips.size(), 2u);
  EXPECT_NE(c.clips[0].class_id, c.clips[1].class_id);
  EXPECT_NE(c.clips[0].wave.samples, c.clips[1].wave.samples);
  ASSERT_EQ(c.failed.size(), 1u);
  EXPECT_NE(c.failed[0].find("broken.wav"), std::string::npos);
  EXPECT_FALSE(c.warnings.empty());
}

TEST(LoadDirectory, ManifestAndFormatChecks) {
  testing::TempDir dir;
  SynthCorpusConfig cfg;
  cfg.per_class = 2;
  const Corpus src = synth_corpus(cfg);
  write_corpus(src, dir.path());
  ASSERT_TRUE(fs::exists(dir / "manifest.csv"));
  LoadOptions opt;
  opt.sample_rate = 8000;
  opt.length = 8000;
  const Corpus back = load_directory(dir.path(), opt);
  ASSERT_EQ(back.clips.size(), 6u);
  EXPECT_EQ(back.class_names, (std::vector<std::string>{"impact", "rain", "steps"}));
  opt.length = 4000;
  const Corpus wrong = load_directory(dir.path(), opt);
  EXPECT_TRUE(wrong.clips.empty());
  EXPECT_EQ(wrong.failed.size(), 6u);
}

std::vector<LabeledClip> labeled(int classes, int per_class) {
  std::vector<LabeledClip> out;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      LabeledClip clip;
      clip.class_id = c;
      clip.class_name = "c" + std::to_string(c);
      clip.source = clip.class_name + "/" + std::to_string(i);
      clip.wave = tone(64, 100.0 + i);
      out.push_back(clip);
    }
  }
  return out;
}

std::multiset<std::string> sources(const std::vector<LabeledClip>& v) {
  std::multiset<std::string> s;
  for (const auto& c : v) s.insert(c.source);
  return s;
}

TEST(Split, StratifiedNinetyFiveFive) {
  const auto clips = labeled(3, 100);
  const SplitResult r = split(clips, 0.05, 7);
  std::map<int, int> tr, va;
  for (const auto& c : r.train) ++tr[c.class_id];
  for (const auto& c : r.val) ++va[c.class_id];
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(tr[c], 95);
    EXPECT_EQ(va[c], 5);
  }
}

TEST(Split, TwoItemsHalfAndTinyClasses) {
  const SplitResult r = split(labeled(1, 2), 0.5, 1);
  EXPECT_EQ(r.train.size(), 1u);
  EXPECT_EQ(r.val.size(), 1u);
  const SplitResult one = split(labeled(2, 1), 0.5, 1);
  EXPECT_EQ(one.train.size(), 2u);
  EXPECT_TRUE(one.val.empty());
  EXPECT_EQ(one.warnings.size(), 2u);
  EXPECT_THROW(split(labeled(1, 4), 0.0, 1), DomainError);
  EXPECT_THROW(split(labeled(1, 4), 1.0, 1), DomainError);
}

TEST(Split, PartitionLawAndDeterminism) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto clips = labeled(1 + rng.uniform_int(4), 1 + rng.uniform_int(30));
    const double frac = rng.uniform(0.05, 0.95);
    const SplitResult r = split(clips, frac, trial);
    auto all = sources(r.train);
    const auto val = sources(r.val);
    for (const auto& s : val) EXPECT_EQ(all.count(s), 0u);
    all.insert(val.begin(), val.end());
    EXPECT_EQ(all, sources(clips));
    EXPECT_EQ(sources(split(clips, frac, trial).val), val);
  }
}

TEST(Batches, SizesOrderAndCacheCoherence) {
  const auto clips = labeled(2, 5);
  FeatureCache cache;
  BatchStream stream(clips, 4, 16, 8, cache);
  EXPECT_EQ(stream.batches_per_epoch(), 3u);
  auto epoch = [&](std::uint64_t seed) {
    Rng rng(seed);
    stream.start_epoch(rng);
    std::vector<std::size_t> sizes;
    std::vector<std::string> order;
    Batch b;
    while (stream.next(b)) {
      sizes.push_back(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        order.push_back(b.clips[i]->source);
        const EventFeature direct = extract_rms(b.clips[i]->wave, 16, 8);
        EXPECT_EQ(b.features[i]->values, direct.values);
      }
    }
    EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 4, 2}));
    return order;
  };
  const auto a = epoch(5);
  EXPECT_EQ(epoch(5), a);
  EXPECT_NE(epoch(6), a);
  EXPECT_EQ(cache.size(), clips.size());
}

}  // namespace
}  // namespace foley
