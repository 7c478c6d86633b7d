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

#include "foley/commands.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "foley/binary_io.h"
#include "foley/corpus.h"
#include "foley/errors.h"
#include "foley/event_feature.h"
#include "foley/metrics.h"
#include "foley/nn/checkpoint.h"
#include "foley/unet.h"
#include "foley/wave_io.h"

namespace foley::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void make_dirs(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
}

json kv_json(const std::string& text) {
  json j = json::object();
  for (const auto& [k, v] : parse_key_values(text)) j[k] = v;
  return j;
}

void write_manifest(const fs::path& path, const json& j) {
  bin::write_text_file(path, j.dump(2) + "\n");
}

// Loads or synthesizes the corpus and aligns the model's class vocabulary.
Corpus obtain_corpus(const CorpusFlags& flags, ModelConfig& cfg, std::uint64_t seed) {
  Corpus corpus;
  if (flags.corpus) {
    corpus = load_directory(*flags.corpus,
                            {cfg.sample_rate, static_cast<std::size_t>(cfg.sample_len)});
    for (const auto& f : corpus.failed) std::cerr << "skipped: " << f << "\n";
  } else {
    SynthCorpusConfig sc;
    sc.per_class = flags.per_class;
    sc.sample_rate = cfg.sample_rate;
    sc.duration = static_cast<double>(cfg.sample_len) / cfg.sample_rate;
    sc.seed = seed;
    corpus = synth_corpus(sc);
  }
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
  if (corpus.clips.empty()) throw ValidationError("corpus has no usable clips");
  cfg.class_count = static_cast<int>(corpus.class_names.size());
  cfg.class_names = corpus.class_names;
  cfg.validate();
  return corpus;
}

std::map<std::string, std::string> parse_overrides(const std::vector<std::string>& items) {
  std::map<std::string, std::string> kv;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

int class_index(const ModelConfig& cfg, const std::string& name) {
  for (int i = 0; i < static_cast<int>(cfg.class_names.size()); ++i) {
    if (cfg.class_names[i] == name) return i;
  }
  std::string valid;
  for (const auto& n : cfg.class_names) valid += (valid.empty() ? "" : ", ") + n;
  throw ValidationError("unknown class '" + name + "'; valid classes: " + valid);
}

std::string loss_csv(const std::vector<std::pair<int, double>>& rows) {
  std::string out = "epoch,mean_loss\n";
  for (const auto& [e, l] : rows) out += std::to_string(e) + "," + fmt(l) + "\n";
  return out;
}

std::vector<std::pair<int, double>> read_loss_csv(const fs::path& path, int up_to) {
  std::vector<std::pair<int, double>> rows;
  if (!fs::is_regular_file(path)) return rows;
  std::istringstream in(bin::read_text_file(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const int e = std::stoi(line.substr(0, comma));
    if (e <= up_to) rows.emplace_back(e, std::stod(line.substr(comma + 1)));
  }
  return rows;
}

}  // namespace

ModelConfig ModelFlags::build() const {
  ModelConfig cfg;
  if (preset == "tiny") {
    cfg = ModelConfig::tiny();
  } else if (preset == "paper") {
    cfg = ModelConfig::paper_scale();
  } else if (preset != "toy") {
    throw ValidationError("unknown preset '" + preset + "' (toy, tiny, paper)");
  }
  if (cond_mode) cfg.cond_mode = parse_cond_mode(*cond_mode);
  if (placement) cfg.placement = parse_placement(*placement);
  if (blocks) cfg.blocks = *blocks;
  if (channels) cfg.channels = parse_int_list(*channels);
  if (strides) cfg.strides = parse_int_list(*strides);
  if (kernel) cfg.kernel = *kernel;
  if (feature_window) cfg.feature_window = *feature_window;
  if (feature_hop) cfg.feature_hop = *feature_hop;
  cfg.apply(parse_overrides(set));
  cfg.validate();
  return cfg;
}

void cmd_extract(const Globals& g, const ExtractArgs& a) {
  const Waveform w = read_wav(a.audio);
  const EventFeature f = scale_gain(extract_rms(w, a.window, a.hop), a.gain);
  fs::path out = a.output;
  if (out.empty()) out = g.out / (a.audio.stem().string() + ".fev");
  if (out.has_parent_path()) make_dirs(out.parent_path());
  if (out.extension() == ".csv") {
    write_feature_csv(f, out);
  } else {
    write_feature_bin(f, out);
  }
  std::cout << out.string() << ": " << f.frame_count() << " frames (W=" << f.window
            << ", h=" << f.hop << ")\n";
}

void cmd_synth_corpus(const Globals& g, const SynthArgs& a) {
  SynthCorpusConfig sc;
  sc.per_class = a.per_class;
  sc.sample_rate = a.sample_rate;
  sc.duration = a.duration;
  sc.seed = g.seed;
  const Corpus c = synth_corpus(sc);
  write_corpus(c, g.out);
  std::cout << "wrote " << c.clips.size() << " clips in " << c.class_names.size()
            << " classes to " << g.out.string() << "\n";
}

void cmd_train(const Globals& g, const TrainArgs& a) {
  const auto t0 = Clock::now();
  ModelConfig cfg = a.model.build();
  cfg.init_seed = g.seed;
  const Corpus corpus = obtain_corpus(a.corpus, cfg, g.seed);
  const SplitResult parts = split(corpus.clips, a.corpus.val_fraction, g.seed);
  for (const auto& w : parts.warnings) std::cerr << "warning: " << w << "\n";

  TrainConfig tc = a.train;
  tc.seed = g.seed;
  UNet<float> model(cfg);
  Trainer trainer(model, tc);
  const fs::path ckpt = g.out / "checkpoint";
  std::vector<std::pair<int, double>> losses;
  if (a.resume) {
    trainer.resume(*a.resume);
    losses = read_loss_csv(g.out / "loss.csv", trainer.epoch());
    std::cerr << "resumed at epoch " << trainer.epoch() << "\n";
  }
  make_dirs(g.out);

  json manifest;
  manifest["command"] = "train";
  manifest["seed"] = g.seed;
  manifest["model_config"] = kv_json(cfg.to_text());
  manifest["train_config"] = kv_json(tc.to_text());
  manifest["checkpoint"] = ckpt.generic_string();
  manifest["corpus_fingerprint"] = fingerprint(corpus.clips);
  manifest["corpus_clips"] = corpus.clips.size();
  manifest["train_clips"] = parts.train.size();
  manifest["params"] = model.params().count();

  FeatureCache cache;
  BatchStream stream(parts.train, tc.batch, cfg.feature_window, cfg.feature_hop, cache);
  try {
    while (trainer.epoch() < tc.epochs) {
      const EpochStats st = trainer.train_epoch(stream);
      losses.emplace_back(st.epoch, st.mean_loss);
      trainer.save(ckpt);
      bin::write_text_file(g.out / "loss.csv", loss_csv(losses));
      std::cerr << "epoch " << st.epoch << "/" << tc.epochs << " loss " << fmt(st.mean_loss)
                << "\n";
    }
  } catch (const NumericError& e) {
    manifest["status"] = std::string("aborted: ") + e.what();
    manifest["timings"] = {{"total_seconds", seconds_since(t0)}};
    write_manifest(g.out / "manifest.json", manifest);
    throw;
  }
  bin::write_text_file(g.out / "loss.csv", loss_csv(losses));
  if (trainer.epoch() == 0) trainer.save(ckpt);
  manifest["status"] = "ok";
  manifest["metrics"] = {{"final_loss", losses.empty() ? json(nullptr) : json(losses.back().second)}};
  manifest["timings"] = {{"total_seconds", seconds_since(t0)}};
  write_manifest(g.out / "manifest.json", manifest);
}

void cmd_generate(const Globals& g, const GenerateArgs& a) {
  const auto t0 = Clock::now();
  const auto model = load_model(a.checkpoint);
  const ModelConfig& cfg = model->config();
  if (a.condition && a.from_audio) {
    throw ValidationError("give either --condition or --from-audio, not both");
  }
  if (a.count < 1) throw ValidationError("--count must be >= 1");

  std::optional<int> class_id;
  if (a.class_name) class_id = class_index(cfg, *a.class_name);

  std::optional<EventFeature> feature;
  std::string stem = "sample";
  if (a.condition) {
    feature = a.condition->extension() == ".csv"
                  ? read_feature_csv(*a.condition, cfg.feature_window, cfg.feature_hop,
                                     cfg.sample_rate)
                  : read_feature_bin(*a.condition);
    stem = a.condition->stem().string();
  } else if (a.from_audio) {
    Waveform w = read_wav(*a.from_audio);
    if (w.sample_rate != cfg.sample_rate) {
      throw ValidationError(a.from_audio->string() + " is " + std::to_string(w.sample_rate) +
                            " Hz; the model expects " + std::to_string(cfg.sample_rate) + " Hz");
    }
    if (w.size() != static_cast<std::size_t>(cfg.sample_len)) {
      std::cerr << "note: fitting " << w.size() << " samples to " << cfg.sample_len << "\n";
      w.samples.resize(cfg.sample_len, 0.0);
    }
    feature = extract_rms(w, cfg.feature_window, cfg.feature_hop);
    stem = a.from_audio->stem().string();
  }
  if (feature) feature = scale_gain(*feature, a.gain);
  if (a.name) stem = *a.name;

  SamplerConfig sc = a.sampler;
  sc.seed = g.seed;
  sc.validate();
  make_dirs(g.out);
  for (int k = 0; k < a.count; ++k) {
    SamplerConfig item = sc;
    item.seed = sc.seed + static_cast<std::uint64_t>(k);
    const Waveform w = generate(*model, class_id, feature ? &*feature : nullptr, item);
    const fs::path out =
        g.out / (a.count == 1 ? stem + ".wav" : stem + "_" + std::to_string(k) + ".wav");
    write_wav(w, out);
    std::cout << out.string() << "\n";
  }
  std::cerr << "generated " << a.count << " clip(s) in " << fmt(seconds_since(t0)) << " s\n";
}

void cmd_eval(const Globals& g, const EvalArgs& a) {
  EvalOptions opt;
  opt.window = a.window;
  opt.hop = a.hop;
  opt.gen_embeddings = a.gen_embeddings;
  opt.ref_embeddings = a.ref_embeddings;
  opt.gen_probs = a.probs;
  opt.is_splits = a.splits;
  const EvalReport report = evaluate_run(a.generated, a.reference, opt);
  for (const auto& m : report.missing) std::cerr << "missing reference: " << m << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  make_dirs(g.out);
  const std::string csv = report.to_csv();
  bin::write_text_file(g.out / "report.csv", csv);
  std::cout << csv;
}

void cmd_sweep_blocks(const Globals& g, const SweepArgs& a) {
  const auto t0 = Clock::now();
  ModelConfig base_cfg = a.model.build();
  base_cfg.init_seed = g.seed;
  const Corpus corpus = obtain_corpus(a.corpus, base_cfg, g.seed);
  const SplitResult parts = split(corpus.clips, a.corpus.val_fraction, g.seed);
  const std::vector<int> ns = parse_int_list(a.blocks);
  for (int n : ns) {
    if (n < 1) throw ValidationError("block counts must be >= 1");
  }
  std::optional<std::vector<nn::NamedArray>> base;
  if (a.base) {
    base = nn::load_arrays(*a.base / "params.fck");
    ModelConfig saved = ModelConfig::from_text(bin::read_text_file(*a.base / "config.txt"));
    saved.blocks = base_cfg.blocks;
    saved.init_seed = base_cfg.init_seed;
    if (saved.to_text() != base_cfg.to_text()) {
      throw ValidationError("base checkpoint config differs from the sweep config beyond N");
    }
  }

  FeatureCache cache;
  const std::size_t n_eval = std::min<std::size_t>(parts.val.size(), a.eval_count);
  std::string csv = "N,E-L1,infer_seconds,params\n";
  json rows = json::array();
  for (int n : ns) {
    ModelConfig cfg = base_cfg;
    cfg.blocks = n;
    cfg.validate();
    UNet<float> model(cfg);
    if (base) nn::import_params(model.params(), *base);
    TrainConfig tc = a.train;
    tc.seed = g.seed;
    Trainer trainer(model, tc);
    BatchStream stream(parts.train, tc.batch, cfg.feature_window, cfg.feature_hop, cache);
    while (trainer.epoch() < tc.epochs) trainer.train_epoch(stream);

    double l1 = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_eval; ++i) {
      const LabeledClip& clip = parts.val[i];
      const EventFeature& f = cache.get(clip, cfg.feature_window, cfg.feature_hop);
      SamplerConfig sc;
      sc.steps = a.steps;
      sc.guidance = a.guidance;
      sc.seed = g.seed + i;
      const auto ts = Clock::now();
      const Waveform w = generate(model, clip.class_id, &f, sc);
      best = std::min(best, seconds_since(ts));
      l1 += event_l1(f, extract_rms(w, cfg.feature_window, cfg.feature_hop));
    }
    const double mean_l1 = n_eval > 0 ? l1 / n_eval : 0.0;
    const double infer = n_eval > 0 ? best : 0.0;
    csv += std::to_string(n) + "," + fmt(mean_l1) + "," + fmt(infer) + "," +
           std::to_string(model.params().count()) + "\n";
    rows.push_back({{"N", n}, {"E-L1", mean_l1}, {"infer_seconds", infer}});
    std::cerr << "N=" << n << " E-L1 " << fmt(mean_l1) << " infer " << fmt(infer) << " s\n";
  }
  make_dirs(g.out);
  bin::write_text_file(g.out / "sweep.csv", csv);
  std::cout << csv;

  json manifest;
  manifest["command"] = "sweep-blocks";
  manifest["seed"] = g.seed;
  manifest["model_config"] = kv_json(base_cfg.to_text());
  manifest["train_config"] = kv_json(a.train.to_text());
  manifest["corpus_fingerprint"] = fingerprint(corpus.clips);
  manifest["checkpoint"] = a.base ? json(a.base->generic_string()) : json(nullptr);
  manifest["metrics"] = rows;
  manifest["timings"] = {{"total_seconds", seconds_since(t0)}};
  write_manifest(g.out / "manifest.json", manifest);
}

void cmd_describe(const Globals&, const DescribeArgs& a) {
  const ModelConfig cfg =
      a.checkpoint ? ModelConfig::from_text(bin::read_text_file(*a.checkpoint / "config.txt"))
                   : a.model.build();
  std::cout << describe(cfg).text;
}

}  // namespace foley::cli
