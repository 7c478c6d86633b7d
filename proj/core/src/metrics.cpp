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

#include "foley/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "foley/binary_io.h"
#include "foley/errors.h"
#include "foley/wave_io.h"

namespace foley {

namespace fs = std::filesystem;

double event_l1(const EventFeature& target, const EventFeature& generated) {
  if (!target.same_geometry(generated)) {
    throw DomainError("event features differ in geometry: (W=" + std::to_string(target.window) +
                      ", h=" + std::to_string(target.hop) + ", " +
                      std::to_string(target.frame_count()) + " frames) vs (W=" +
                      std::to_string(generated.window) + ", h=" + std::to_string(generated.hop) +
                      ", " + std::to_string(generated.frame_count()) + " frames)");
  }
  const std::size_t k = target.frame_count();
  if (k == 0) throw DomainError("event features are empty");
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::abs(target.values[i] - generated.values[i]);
  return acc / static_cast<double>(k);
}

// ---- embeddings ------------------------------------------------------------

std::vector<unsigned char> encode_embeddings(const EmbeddingSet& e) {
  if (e.data.size() != static_cast<std::size_t>(e.items) * e.dim) {
    throw ShapeError("embedding set holds " + std::to_string(e.data.size()) + " values for " +
                     std::to_string(e.items) + " x " + std::to_string(e.dim));
  }
  bin::Writer w;
  w.u32(bin::magic("FEM1"));
  w.u32(static_cast<std::uint32_t>(e.dim));
  w.u32(static_cast<std::uint32_t>(e.items));
  for (double v : e.data) w.f32(static_cast<float>(v));
  return w.buffer();
}

EmbeddingSet decode_embeddings(const std::vector<unsigned char>& bytes) {
  bin::Reader r(bytes);
  if (r.u32() != bin::magic("FEM1")) throw FormatError("not an embedding file (bad magic)");
  EmbeddingSet e;
  e.dim = static_cast<int>(r.u32());
  e.items = static_cast<int>(r.u32());
  const std::size_t n = static_cast<std::size_t>(e.items) * e.dim;
  if (r.remaining() != n * 4) {
    throw FormatError("embedding payload has " + std::to_string(r.remaining()) +
                      " bytes, header implies " + std::to_string(n * 4));
  }
  e.data.resize(n);
  for (double& v : e.data) v = r.f32();
  return e;
}

void write_embeddings(const EmbeddingSet& e, const fs::path& path) {
  bin::write_file(path, encode_embeddings(e));
}

EmbeddingSet read_embeddings(const fs::path& path) {
  return decode_embeddings(bin::read_file(path));
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

void fit_gaussian(const EmbeddingSet& s, Vec& mu, Mat& cov) {
  if (s.items < 2) throw DomainError("embedding set needs at least 2 items");
  if (s.data.size() != static_cast<std::size_t>(s.items) * s.dim) {
    throw ShapeError("embedding set size does not match items x dim");
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      s.data.data(), s.items, s.dim);
  if (!x.allFinite()) throw DomainError("embedding set contains non-finite values");
  mu = x.colwise().mean().transpose();
  const Mat centered = x.rowwise() - mu.transpose();
  cov = (centered.transpose() * centered) / static_cast<double>(s.items - 1);
}

// Eigen-decomposes a symmetric PSD matrix, clamping slightly negative
// eigenvalues to zero.
Vec psd_eigenvalues(const Mat& m, Mat* vectors) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, vectors ? Eigen::ComputeEigenvectors
                                                   : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  Vec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0.0) {
      if (ev[i] < -1e-8) {
        throw NumericError("covariance product is not positive semi-definite (eigenvalue " +
                           std::to_string(ev[i]) + ")");
      }
      ev[i] = 0.0;
    }
  }
  if (vectors) *vectors = es.eigenvectors();
  return ev;
}

}  // namespace

double frechet_distance(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.dim != b.dim) {
    throw DomainError("embedding dims differ: " + std::to_string(a.dim) + " vs " +
                      std::to_string(b.dim));
  }
  Vec mu_a, mu_b;
  Mat cov_a, cov_b;
  fit_gaussian(a, mu_a, cov_a);
  fit_gaussian(b, mu_b, cov_b);

  Mat vecs;
  const Vec ev = psd_eigenvalues(cov_a, &vecs);
  const Mat sqrt_a = vecs * ev.cwiseSqrt().asDiagonal() * vecs.transpose();
  Mat m = sqrt_a * cov_b * sqrt_a;
  m = 0.5 * (m + m.transpose());
  const double tr_sqrt = psd_eigenvalues(m, nullptr).cwiseSqrt().sum();
  const double d = (mu_a - mu_b).squaredNorm() + cov_a.trace() + cov_b.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, d);
}

// ---- inception score -------------------------------------------------------

ProbMatrix read_prob_csv(const fs::path& path) {
  std::istringstream in(bin::read_text_file(path));
  ProbMatrix p;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::logic_error&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError(path.string() + ": non-numeric probability row");
    }
    first = false;
    if (p.classes == 0) p.classes = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != p.classes) {
      throw FormatError(path.string() + ": ragged probability rows");
    }
    p.data.insert(p.data.end(), row.begin(), row.end());
    ++p.items;
  }
  return p;
}

void write_prob_csv(const ProbMatrix& p, const fs::path& path) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < p.items; ++i) {
    for (int c = 0; c < p.classes; ++c) out << (c ? "," : "") << p.row(i)[c];
    out << "\n";
  }
  bin::write_text_file(path, out.str());
}

double inception_score(const ProbMatrix& p, int splits) {
  if (p.items < 1 || p.classes < 1) throw DomainError("empty probability matrix");
  if (splits < 1 || splits > p.items) {
    throw DomainError("splits must lie in [1, items], got " + std::to_string(splits));
  }
  for (int i = 0; i < p.items; ++i) {
    double sum = 0.0;
    for (int c = 0; c < p.classes; ++c) {
      const double v = p.row(i)[c];
      if (!(v >= 0.0)) throw DomainError("probability row " + std::to_string(i) + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw DomainError("probability row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
  double score = 0.0;
  for (int s = 0; s < splits; ++s) {
    const int lo = static_cast<int>(static_cast<long>(s) * p.items / splits);
    const int hi = static_cast<int>(static_cast<long>(s + 1) * p.items / splits);
    std::vector<double> marginal(p.classes, 0.0);
    for (int i = lo; i < hi; ++i) {
      for (int c = 0; c < p.classes; ++c) marginal[c] += p.row(i)[c];
    }
    for (double& m : marginal) m /= (hi - lo);
    double kl = 0.0;
    for (int i = lo; i < hi; ++i) {
      for (int c = 0; c < p.classes; ++c) {
        const double v = p.row(i)[c];
        if (v > 0.0) kl += v * (std::log(v) - std::log(marginal[c]));
      }
    }
    score += std::exp(kl / (hi - lo));
  }
  return score / splits;
}

// ---- run evaluation --------------------------------------------------------

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8g", *v);
  return buf;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& vs) {
  double s = 0.0;
  int n = 0;
  for (const auto& v : vs) {
    if (v) {
      s += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / n;
}

std::vector<fs::path> sorted_wavs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().extension() == ".wav") out.push_back(f.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "class,E-L1,FAD,IS,n_items,missing\n";
  for (const ReportRow& r : rows) {
    out << r.cls << "," << fmt_opt(r.e_l1) << "," << fmt_opt(r.fad) << "," << fmt_opt(r.is) << ","
        << r.n_items << "," << r.missing << "\n";
  }
  return out.str();
}

EvalReport evaluate_run(const fs::path& generated, const fs::path& reference,
                        const EvalOptions& opt) {
  if (!fs::is_directory(generated)) throw IoError("not a directory: " + generated.string());
  if (!fs::is_directory(reference)) throw IoError("not a directory: " + reference.string());

  std::vector<std::pair<std::string, fs::path>> classes;
  if (!sorted_wavs(generated).empty()) classes.emplace_back("all", fs::path());
  for (const auto& d : fs::directory_iterator(generated)) {
    if (d.is_directory()) classes.emplace_back(d.path().filename().string(), d.path().filename());
  }
  std::sort(classes.begin(), classes.end());

  EvalReport report;
  std::vector<std::optional<double>> l1s, fads, iss;
  int total_items = 0;
  int total_missing = 0;
  for (const auto& [cls, rel] : classes) {
    ReportRow row;
    row.cls = cls;
    double acc = 0.0;
    for (const fs::path& gen_path : sorted_wavs(generated / rel)) {
      const fs::path stem = gen_path.stem();
      const fs::path ref_wav = reference / rel / (stem.string() + ".wav");
      const fs::path ref_fev = reference / rel / (stem.string() + ".fev");
      EventFeature target;
      if (fs::is_regular_file(ref_fev)) {
        target = read_feature_bin(ref_fev);
      } else if (fs::is_regular_file(ref_wav)) {
        target = extract_rms(read_wav(ref_wav), opt.window, opt.hop);
      } else {
        report.missing.push_back((rel / gen_path.filename()).generic_string());
        ++row.missing;
        continue;
      }
      const EventFeature gen = extract_rms(read_wav(gen_path), target.window, target.hop);
      acc += event_l1(target, gen);
      ++row.n_items;
    }
    if (row.n_items > 0) row.e_l1 = acc / row.n_items;

    if (opt.gen_embeddings && opt.ref_embeddings) {
      const fs::path ge = *opt.gen_embeddings / (cls + ".fem");
      const fs::path re = *opt.ref_embeddings / (cls + ".fem");
      if (fs::is_regular_file(ge) && fs::is_regular_file(re)) {
        row.fad = frechet_distance(read_embeddings(ge), read_embeddings(re));
      } else {
        report.warnings.push_back("no embeddings for class '" + cls + "'");
      }
    }
    if (opt.gen_probs) {
      const fs::path pp = *opt.gen_probs / (cls + ".csv");
      if (fs::is_regular_file(pp)) {
        row.is = inception_score(read_prob_csv(pp), opt.is_splits);
      } else {
        report.warnings.push_back("no class probabilities for class '" + cls + "'");
      }
    }
    l1s.push_back(row.e_l1);
    fads.push_back(row.fad);
    iss.push_back(row.is);
    total_items += row.n_items;
    total_missing += row.missing;
    report.rows.push_back(std::move(row));
  }
  if (!report.missing.empty()) {
    report.warnings.push_back(std::to_string(report.missing.size()) +
                              " generated file(s) had no reference and were skipped");
  }
  ReportRow mean;
  mean.cls = "mean";
  mean.e_l1 = mean_of(l1s);
  mean.fad = mean_of(fads);
  mean.is = mean_of(iss);
  mean.n_items = total_items;
  mean.missing = total_missing;
  report.rows.push_back(std::move(mean));
  return report;
}

}  // namespace foley
