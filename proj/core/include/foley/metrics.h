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

#ifndef FOLEY_METRICS_H_
#define FOLEY_METRICS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "foley/event_feature.h"

namespace foley {

// (1/k) sum |E_i - E'_i|; DomainError unless both share (W, h, k).
double event_l1(const EventFeature& target, const EventFeature& generated);

// Row-major [items x dim].
struct EmbeddingSet {
  int items = 0;
  int dim = 0;
  std::vector<double> data;

  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
};

// Binary container: magic "FEM1", dim, items (LE uint32), then items * dim
// LE float32 values row by row.
std::vector<unsigned char> encode_embeddings(const EmbeddingSet& e);
EmbeddingSet decode_embeddings(const std::vector<unsigned char>& bytes);
void write_embeddings(const EmbeddingSet& e, const std::filesystem::path& path);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2) with
// unbiased covariances.
double frechet_distance(const EmbeddingSet& a, const EmbeddingSet& b);

// Row-major [items x classes] of class probabilities.
struct ProbMatrix {
  int items = 0;
  int classes = 0;
  std::vector<double> data;

  const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * classes; }
};

// CSV with one row per item and one column per class; an optional header
// row of non-numeric labels is skipped.
ProbMatrix read_prob_csv(const std::filesystem::path& path);
void write_prob_csv(const ProbMatrix& p, const std::filesystem::path& path);

// Mean over `splits` contiguous chunks of exp(mean KL(p(y|x) || p(y))).
double inception_score(const ProbMatrix& p, int splits = 1);

struct EvalOptions {
  int window = kDefaultWindow;
  int hop = kDefaultHop;
  // Optional per-class inputs: <dir>/<class>.fem and <dir>/<class>.csv.
  std::optional<std::filesystem::path> gen_embeddings;
  std::optional<std::filesystem::path> ref_embeddings;
  std::optional<std::filesystem::path> gen_probs;
  int is_splits = 1;
};

struct ReportRow {
  std::string cls;
  std::optional<double> e_l1;
  std::optional<double> fad;
  std::optional<double> is;
  int n_items = 0;
  int missing = 0;
};

struct EvalReport {
  std::vector<ReportRow> rows;  // one per class, then "mean"
  std::vector<std::string> missing;
  std::vector<std::string> warnings;

  const ReportRow& mean() const { return rows.back(); }
  // Columns: class,E-L1,FAD,IS,n_items,missing. Absent values print "n/a".
  std::string to_csv() const;
};

// Pairs <gen>/<class>/<stem>.wav with <ref>/<class>/<stem>.wav (whose RMS
// feature is the target) or <ref>/<class>/<stem>.fev (the target itself).
// Generated files without a partner are listed and skipped. The mean row
// averages the class-wise scores.
EvalReport evaluate_run(const std::filesystem::path& generated,
                        const std::filesystem::path& reference, const EvalOptions& opt = {});

}  // namespace foley

#endif  // FOLEY_METRICS_H_
