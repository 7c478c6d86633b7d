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

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "foley/commands.h"
#include "foley/errors.h"

namespace {

using foley::cli::ModelFlags;
using foley::cli::CorpusFlags;

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--preset", m.preset, "Base model config: toy, tiny or paper")
      ->capture_default_str();
  app->add_option("--cond-mode", m.cond_mode, "Temporal conditioning: none, film, tfilm, bfilm");
  app->add_option("--placement", m.placement, "Temporal layers in every-block or up-blocks");
  app->add_option("--blocks", m.blocks, "Temporal block count N");
  app->add_option("--channels", m.channels, "Channels per level, comma separated");
  app->add_option("--strides", m.strides, "Strides per level, comma separated");
  app->add_option("--kernel", m.kernel, "Convolution kernel size");
  app->add_option("--feature-window", m.feature_window, "Event feature window W (samples)");
  app->add_option("--feature-hop", m.feature_hop, "Event feature hop h (samples)");
  app->add_option("--set", m.set, "Any model config key=value (repeatable)");
}

void add_corpus_flags(CLI::App* app, CorpusFlags& c) {
  app->add_option("--corpus", c.corpus, "Corpus directory (manifest.csv or folder per class)");
  app->add_option("--per-class", c.per_class, "Clips per class when synthesizing")
      ->capture_default_str();
  app->add_option("--val-fraction", c.val_fraction, "Held-out fraction per class")
      ->capture_default_str();
}

void add_train_flags(CLI::App* app, foley::TrainConfig& t) {
  app->add_option("--epochs", t.epochs)->capture_default_str();
  app->add_option("--batch", t.batch)->capture_default_str();
  app->add_option("--lr", t.adam.lr)->capture_default_str();
  app->add_option("--clip-norm", t.adam.clip_norm, "Global gradient-norm clip (<= 0 disables)")
      ->capture_default_str();
  app->add_option("--cond-drop-p", t.cond_drop_p,
                  "Probability of dropping class and events together")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foley: event-guided Foley sound synthesis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a key=value file");

  foley::cli::Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  foley::cli::ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Compute the RMS event feature of a WAV file");
  extract->add_option("audio", ex.audio)->required()->check(CLI::ExistingFile);
  extract->add_option("--window", ex.window)->capture_default_str();
  extract->add_option("--hop", ex.hop)->capture_default_str();
  extract->add_option("--gain", ex.gain)->capture_default_str();
  extract->add_option("-o,--output", ex.output,
                      "Feature file (.csv for text, anything else binary); "
                      "default <out>/<stem>.fev");

  foley::cli::SynthArgs sy;
  auto* synth = app.add_subcommand("synth-corpus", "Write the synthetic training corpus");
  synth->add_option("--per-class", sy.per_class)->capture_default_str();
  synth->add_option("--rate", sy.sample_rate)->capture_default_str();
  synth->add_option("--duration", sy.duration)->capture_default_str();

  foley::cli::TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a model; writes <out>/checkpoint");
  add_model_flags(train, tr.model);
  add_corpus_flags(train, tr.corpus);
  add_train_flags(train, tr.train);
  train->add_option("--resume", tr.resume, "Checkpoint directory to continue from");

  foley::cli::GenerateArgs ge;
  auto* gen = app.add_subcommand("generate", "Sample WAVs from a trained checkpoint");
  gen->add_option("--checkpoint", ge.checkpoint)->required();
  gen->add_option("--class", ge.class_name, "Class name; omit for the unconditional class");
  gen->add_option("--condition", ge.condition, "Event feature file (.fev or .csv)");
  gen->add_option("--from-audio", ge.from_audio, "Take the event feature from this WAV");
  gen->add_option("--gain", ge.gain, "Scale applied to the event feature")->capture_default_str();
  gen->add_option("--count", ge.count)->capture_default_str();
  gen->add_option("--name", ge.name, "Output file stem");
  gen->add_option("--steps", ge.sampler.steps)->capture_default_str();
  gen->add_option("--guidance", ge.sampler.guidance)->capture_default_str();

  foley::cli::EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score generated clips; writes <out>/report.csv");
  eval->add_option("--generated", ev.generated)->required();
  eval->add_option("--reference", ev.reference)->required();
  eval->add_option("--window", ev.window)->capture_default_str();
  eval->add_option("--hop", ev.hop)->capture_default_str();
  eval->add_option("--gen-embeddings", ev.gen_embeddings, "Directory of <class>.fem files");
  eval->add_option("--ref-embeddings", ev.ref_embeddings, "Directory of <class>.fem files");
  eval->add_option("--probs", ev.probs, "Directory of <class>.csv probability files");
  eval->add_option("--splits", ev.splits)->capture_default_str();

  foley::cli::SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep-blocks", "Train and score one model per block count");
  add_model_flags(sweep, sw.model);
  add_corpus_flags(sweep, sw.corpus);
  add_train_flags(sweep, sw.train);
  sweep->add_option("--blocks-list", sw.blocks)->capture_default_str();
  sweep->add_option("--base", sw.base, "Checkpoint to fine-tune every N from");
  sweep->add_option("--eval-count", sw.eval_count)->capture_default_str();
  sweep->add_option("--steps", sw.steps)->capture_default_str();
  sweep->add_option("--guidance", sw.guidance)->capture_default_str();

  foley::cli::DescribeArgs de;
  auto* desc = app.add_subcommand("describe", "Print a model summary and parameter counts");
  add_model_flags(desc, de.model);
  desc->add_option("--checkpoint", de.checkpoint, "Describe a saved model instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*extract) foley::cli::cmd_extract(g, ex);
    if (*synth) foley::cli::cmd_synth_corpus(g, sy);
    if (*train) foley::cli::cmd_train(g, tr);
    if (*gen) foley::cli::cmd_generate(g, ge);
    if (*eval) foley::cli::cmd_eval(g, ev);
    if (*sweep) foley::cli::cmd_sweep_blocks(g, sw);
    if (*desc) foley::cli::cmd_describe(g, de);
  } catch (const foley::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const foley::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
