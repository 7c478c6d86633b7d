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

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "foley/corpus.h"
#include "foley/errors.h"
#include "foley/metrics.h"
#include "foley/wave_io.h"
#include "test_util.h"

namespace foley {
namespace {

namespace fs = std::filesystem;
using nn::Rng;

EventFeature feature(std::vector<double> v, int w = 512, int h = 128) {
  EventFeature f;
  f.values = std::move(v);
  f.window = w;
  f.hop = h;
  f.source_rate = 22050;
  return f;
}

EventFeature random_feature(Rng& rng, int k) {
  std::vector<double> v(k);
  for (double& x : v) x = std::abs(rng.normal());
  return feature(v);
}

TEST(EventL1, Examples) {
  EXPECT_EQ(event_l1(feature({0.1, 0.5, 0.3}), feature({0.1, 0.5, 0.3})), 0.0);
  EXPECT_EQ(event_l1(feature({1, 1}), feature({0, 0})), 1.0);
  EXPECT_NEAR(event_l1(feature({0.2, 0.7, 0.0, 1.0}), feature({0.1, 0.9, 0.5, 1.0})), 0.2, 1e-12);
}

TEST(EventL1, GeometryMismatchIsDomainError) {
  EXPECT_THROW(event_l1(feature({1, 2}), feature({1, 2, 3})), DomainError);
  EXPECT_THROW(event_l1(feature({1, 2}, 512, 128), feature({1, 2}, 256, 128)), DomainError);
  EXPECT_THROW(event_l1(feature({1, 2}, 512, 128), feature({1, 2}, 512, 64)), DomainError);
  EXPECT_THROW(event_l1(feature({}), feature({})), DomainError);
}

TEST(EventL1, MetricPropertiesAndScaling) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + rng.uniform_int(50);
    const EventFeature a = random_feature(rng, k), b = random_feature(rng, k),
                       c = random_feature(rng, k);
    const double ab = event_l1(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(ab, event_l1(b, a));
    EXPECT_EQ(event_l1(a, a), 0.0);
    EXPECT_GT(ab, 0.0);
    EXPECT_LE(event_l1(a, c), ab + event_l1(b, c) + 1e-12);
    const double s = rng.uniform(0.0, 5.0);
    EXPECT_NEAR(event_l1(scale_gain(a, s), scale_gain(b, s)), s * ab, 1e-12 * (1.0 + s * ab));
  }
}

EmbeddingSet gaussian_set(Rng& rng, int items, int dim, double shift = 0.0) {
  EmbeddingSet e;
  e.items = items;
  e.dim = dim;
  e.data.resize(static_cast<std::size_t>(items) * dim);
  for (int i = 0; i < items; ++i) {
    for (int d = 0; d < dim; ++d) e.data[i * dim + d] = rng.normal() * (1.0 + 0.3 * d) + shift;
  }
  return e;
}

TEST(Frechet, IdenticalSetsGiveZero) {
  Rng rng(2);
  const EmbeddingSet a = gaussian_set(rng, 200, 8);
  EXPECT_NEAR(frechet_distance(a, a), 0.0, 1e-8);
}

TEST(Frechet, OneDimensionalClosedForm) {
  // Two points at +-1/sqrt(2): sample mean 0, unbiased variance 1.
  const double c = 1.0 / std::sqrt(2.0);
  EmbeddingSet a{2, 1, {-c, c}};
  EmbeddingSet b{2, 1, {1.0 - c, 1.0 + c}};
  EXPECT_NEAR(frechet_distance(a, b), 1.0, 1e-12);
  // N(0,1) vs N(0,4): (1 - 2)^2 = 1.
  EmbeddingSet d{2, 1, {-2 * c, 2 * c}};
  EXPECT_NEAR(frechet_distance(a, d), 1.0, 1e-12);
}

TEST(Frechet, SymmetricAndRotationInvariant) {
  Rng rng(3);
  const int dim = 5;
  const EmbeddingSet a = gaussian_set(rng, 300, dim);
  const EmbeddingSet b = gaussian_set(rng, 250, dim, 0.4);
  const double ab = frechet_distance(a, b);
  EXPECT_GT(ab, 0.0);
  EXPECT_NEAR(ab, frechet_distance(b, a), 1e-8);

  // Random orthogonal matrix by Gram-Schmidt.
  std::vector<std::vector<double>> q(dim, std::vector<double>(dim));
  for (int i = 0; i < dim; ++i) {
    for (double& v : q[i]) v = rng.normal();
    for (int j = 0; j < i; ++j) {
      double d = 0.0;
      for (int k = 0; k < dim; ++k) d += q[i][k] * q[j][k];
      for (int k = 0; k < dim; ++k) q[i][k] -= d * q[j][k];
    }
    double n = 0.0;
    for (double v : q[i]) n += v * v;
    for (double& v : q[i]) v /= std::sqrt(n);
  }
  auto rotate = [&](const EmbeddingSet& s) {
    EmbeddingSet r = s;
    for (int it = 0; it < s.items; ++it) {
      for (int i = 0; i < dim; ++i) {
        double v = 0.0;
        for (int k = 0; k < dim; ++k) v += q[i][k] * s.row(it)[k];
        r.data[it * dim + i] = v;
      }
    }
    return r;
  };
  EXPECT_NEAR(frechet_distance(rotate(a), rotate(b)), ab, 1e-6);
}

TEST(Frechet, Errors) {
  Rng rng(4);
  EXPECT_THROW(frechet_distance(gaussian_set(rng, 10, 3), gaussian_set(rng, 10, 4)), DomainError);
  EXPECT_THROW(frechet_distance(gaussian_set(rng, 1, 3), gaussian_set(rng, 10, 3)), DomainError);
}

TEST(Embeddings, RoundTripAndCorruption) {
  Rng rng(5);
  EmbeddingSet e = gaussian_set(rng, 7, 3);
  for (double& v : e.data) v = static_cast<float>(v);
  testing::TempDir dir;
  write_embeddings(e, dir / "e.fem");
  const EmbeddingSet back = read_embeddings(dir / "e.fem");
  EXPECT_EQ(back.items, 7);
  EXPECT_EQ(back.dim, 3);
  EXPECT_EQ(back.data, e.data);
  auto bytes = encode_embeddings(e);
  bytes.pop_back();
  EXPECT_THROW(decode_embeddings(bytes), FormatError);
}

ProbMatrix probs(int items, int classes, std::vector<double> d) { return {items, classes, std::move(d)}; }

TEST(InceptionScore, ClosedForms) {
  EXPECT_NEAR(inception_score(probs(3, 2, {0.3, 0.7, 0.3, 0.7, 0.3, 0.7})), 1.0, 1e-12);
  for (int c : {2, 3, 7}) {
    std::vector<double> d(static_cast<std::size_t>(c) * c, 0.0);
    for (int i = 0; i < c; ++i) d[i * c + i] = 1.0;
    EXPECT_NEAR(inception_score(probs(c, c, d)), static_cast<double>(c), 1e-9);
  }
}

TEST(InceptionScore, BoundsOnRandomInputs) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int items = 2 + rng.uniform_int(30), c = 2 + rng.uniform_int(6);
    ProbMatrix p{items, c, std::vector<double>(static_cast<std::size_t>(items) * c)};
    for (int i = 0; i < items; ++i) {
      double s = 0.0;
      for (int k = 0; k < c; ++k) s += p.data[i * c + k] = std::exp(2.0 * rng.normal());
      for (int k = 0; k < c; ++k) p.data[i * c + k] /= s;
    }
    const int splits = 1 + rng.uniform_int(std::min(items, 4));
    const double is = inception_score(p, splits);
    EXPECT_GE(is, 1.0 - 1e-9);
    EXPECT_LE(is, c + 1e-9);
  }
}

TEST(InceptionScore, Errors) {
  EXPECT_THROW(inception_score(probs(2, 2, {0.5, 0.6, 0.5, 0.5})), DomainError);
  EXPECT_THROW(inception_score(probs(2, 2, {1.2, -0.2, 0.5, 0.5})), DomainError);
  EXPECT_THROW(inception_score(probs(2, 2, {0.5, 0.5, 0.5, 0.5}), 3), DomainError);
  EXPECT_THROW(inception_score(probs(2, 2, {0.5, 0.5, 0.5, 0.5}), 0), DomainError);
}

TEST(ProbCsv, RoundTripWithHeader) {
  testing::TempDir dir;
  {
    std::ofstream out(dir / "p.csv");
    out << "a,b,c\n0.2,0.3,0.5\n1,0,0\n";
  }
  const ProbMatrix p = read_prob_csv(dir / "p.csv");
  EXPECT_EQ(p.items, 2);
  EXPECT_EQ(p.classes, 3);
  EXPECT_EQ(p.data[2], 0.5);
  write_prob_csv(p, dir / "q.csv");
  EXPECT_EQ(read_prob_csv(dir / "q.csv").data, p.data);
}

// Reference tree of synthesized clips: <root>/<class>/<class>_<i>.wav.
void write_reference(const fs::path& root, int per_class) {
  SynthCorpusConfig cfg;
  cfg.per_class = per_class;
  cfg.seed = 5;
  write_corpus(synth_corpus(cfg), root);
}

TEST(EvaluateRun, CopiesScoreZeroWithOneRowPerClassPlusMean) {
  testing::TempDir dir;
  write_reference(dir / "ref", 3);
  fs::copy(dir / "ref", dir / "gen", fs::copy_options::recursive);
  fs::remove(dir / "gen" / "manifest.csv");
  const EvalReport r = evaluate_run(dir / "gen", dir / "ref");
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.mean().cls, "mean");
  EXPECT_EQ(*r.mean().e_l1, 0.0);
  EXPECT_FALSE(r.mean().fad.has_value());
  EXPECT_TRUE(r.missing.empty());
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "class,E-L1,FAD,IS,n_items,missing");
  EXPECT_NE(csv.find("n/a"), std::string::npos);
}

TEST(EvaluateRun, ShuffledPairingScoresWorse) {
  testing::TempDir dir;
  write_reference(dir / "ref", 4);
  for (const auto& cls : fs::directory_iterator(dir / "ref")) {
    if (!cls.is_directory()) continue;
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(cls.path())) files.push_back(f.path());
    std::sort(files.begin(), files.end());
    const fs::path out = dir / "gen" / cls.path().filename();
    fs::create_directories(out);
    // Rotate names by one.
    for (std::size_t i = 0; i < files.size(); ++i) {
      fs::copy_file(files[i], out / files[(i + 1) % files.size()].filename());
    }
  }
  testing::TempDir dir2;
  fs::copy(dir / "ref", dir2 / "gen", fs::copy_options::recursive);
  const double matched = *evaluate_run(dir2 / "gen", dir / "ref").mean().e_l1;
  const double shuffled = *evaluate_run(dir / "gen", dir / "ref").mean().e_l1;
  EXPECT_LT(matched, shuffled);
}

TEST(EvaluateRun, MissingPairsListedAndFeatureTargetsAccepted) {
  testing::TempDir dir;
  write_reference(dir / "ref", 2);
  fs::copy(dir / "ref", dir / "gen", fs::copy_options::recursive);
  // An orphan generated file and a reference given only as a feature.
  fs::copy_file(dir / "gen" / "rain" / "rain_0000.wav", dir / "gen" / "rain" / "extra.wav");
  const Waveform w = read_wav(dir / "ref" / "steps" / "steps_0000.wav");
  write_feature_bin(extract_rms(w), dir / "ref" / "steps" / "steps_0000.fev");
  fs::remove(dir / "ref" / "steps" / "steps_0000.wav");
  const EvalReport r = evaluate_run(dir / "gen", dir / "ref");
  ASSERT_EQ(r.missing.size(), 1u);
  EXPECT_NE(r.missing[0].find("extra"), std::string::npos);
  EXPECT_EQ(r.mean().missing, 1);
  // .fev stores float32 values.
  EXPECT_NEAR(*r.mean().e_l1, 0.0, 1e-6);
}

TEST(EvaluateRun, FadAndIsFromSuppliedFiles) {
  testing::TempDir dir;
  write_reference(dir / "ref", 2);
  fs::copy(dir / "ref", dir / "gen", fs::copy_options::recursive);
  Rng rng(7);
  fs::create_directories(dir / "emb_gen");
  fs::create_directories(dir / "emb_ref");
  fs::create_directories(dir / "probs");
  for (const std::string cls : {"impact", "steps", "rain"}) {
    const EmbeddingSet e = gaussian_set(rng, 20, 4);
    write_embeddings(e, dir / "emb_gen" / (cls + ".fem"));
    write_embeddings(e, dir / "emb_ref" / (cls + ".fem"));
    write_prob_csv(probs(2, 2, {1, 0, 0, 1}), dir / "probs" / (cls + ".csv"));
  }
  EvalOptions opt;
  opt.gen_embeddings = dir / "emb_gen";
  opt.ref_embeddings = dir / "emb_ref";
  opt.gen_probs = dir / "probs";
  const EvalReport r = evaluate_run(dir / "gen", dir / "ref", opt);
  ASSERT_TRUE(r.mean().fad.has_value());
  EXPECT_NEAR(*r.mean().fad, 0.0, 1e-6);
  EXPECT_NEAR(*r.mean().is, 2.0, 1e-9);
}

}  // namespace
}  // namespace foley
