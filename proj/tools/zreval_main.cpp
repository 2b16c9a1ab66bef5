// zreval_main.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Everything goes through the C API in zreval.h;
// this translation unit deliberately uses no internal headers.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "zreval.h"

namespace {

// exit codes: 0 success, 2 input problem, 3 internal failure
int exit_code(zr_status status) {
  switch (status) {
    case ZR_OK:
      return 0;
    case ZR_ERR_INTERNAL:
      return 3;
    default:
      return 2;
  }
}

int fail(zr_status status) {
  std::fprintf(stderr, "zreval: %s\n", zr_last_error());
  return exit_code(status);
}

struct Track1Args {
  std::string phones, words, features, manifest, batch, out = "track1_report";
  std::string metric = "cosine", mode = "both", language = "default";
  double min_duration = 0.0;
  std::uint64_t seed = 0;
  std::size_t cap = 10000;
  int workers = 0;
};

struct Track2Args {
  std::string phones, words, classes, batch, out = "track2_report";
  std::string language = "default";
  std::size_t chunk_size = 1000;
  int workers = 0;
};

int run_track1(const Track1Args& args) {
  zr_track1_options options;
  zr_track1_options_init(&options);
  options.metric = args.metric == "kl" ? ZR_METRIC_KL : ZR_METRIC_COSINE;
  options.mode = args.mode == "within"
                     ? ZR_MODE_WITHIN
                     : (args.mode == "across" ? ZR_MODE_ACROSS : ZR_MODE_BOTH);
  options.min_duration = args.min_duration;
  options.seed = args.seed;
  options.triplet_cap = args.cap;
  options.workers = args.workers;
  options.language = args.language.c_str();
  options.manifest_path = args.manifest.empty() ? nullptr : args.manifest.c_str();

  zr_report* report = nullptr;
  zr_status status = ZR_OK;
  if (!args.batch.empty()) {
    status = zr_track1_run_batch(args.batch.c_str(), &options, &report);
  } else {
    zr_alignment* alignment = nullptr;
    zr_features* features = nullptr;
    status = zr_alignment_load(args.phones.c_str(), args.words.c_str(),
                               &alignment);
    if (status == ZR_OK)
      status = zr_features_load(args.features.c_str(),
                                options.metric == ZR_METRIC_KL, &features);
    if (status == ZR_OK)
      status = zr_track1_run(alignment, features, &options, &report);
    zr_features_free(features);
    zr_alignment_free(alignment);
  }
  if (status != ZR_OK) return fail(status);
  status = zr_report_write(report, args.out.c_str());
  zr_report_free(report);
  if (status != ZR_OK) return fail(status);
  std::printf("wrote %s.json and %s.csv\n", args.out.c_str(), args.out.c_str());
  return 0;
}

int run_track2(const Track2Args& args) {
  zr_track2_options options;
  zr_track2_options_init(&options);
  options.chunk_size = args.chunk_size;
  options.workers = args.workers;
  options.language = args.language.c_str();

  zr_report* report = nullptr;
  zr_status status = ZR_OK;
  if (!args.batch.empty()) {
    status = zr_track2_run_batch(args.batch.c_str(), &options, &report);
  } else {
    zr_alignment* alignment = nullptr;
    zr_classes* classes = nullptr;
    status = zr_alignment_load(args.phones.c_str(), args.words.c_str(),
                               &alignment);
    if (status == ZR_OK)
      status = zr_classes_load(args.classes.c_str(), alignment, &classes);
    if (status == ZR_OK)
      status = zr_track2_run(alignment, classes, &options, &report);
    zr_classes_free(classes);
    zr_alignment_free(alignment);
  }
  if (status != ZR_OK) return fail(status);
  status = zr_report_write(report, args.out.c_str());
  zr_report_free(report);
  if (status != ZR_OK) return fail(status);
  std::printf("wrote %s.json and %s.csv\n", args.out.c_str(), args.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zreval: evaluation toolkit for zero-resource speech systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", zr_version());

  // ---- gen ----
  std::string gen_config, gen_out;
  std::int64_t gen_seed = -1;
  bool gen_dump_config = false;
  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  gen->add_option("--config", gen_config, "generator config (key = value)");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", gen_seed, "override the configured seed");
  gen->add_flag("--dump-config", gen_dump_config,
                "print the default config and exit");

  // ---- validate ----
  std::string v_phones, v_words, v_features, v_classes, v_manifest,
      v_metric = "cosine";
  auto* val = app.add_subcommand("validate", "check inputs without scoring");
  val->add_option("--phones", v_phones, "phone alignment file")->required();
  val->add_option("--words", v_words, "word alignment file")->required();
  val->add_option("--features", v_features, "feature directory");
  val->add_option("--classes", v_classes, "class file");
  val->add_option("--manifest", v_manifest, "subset manifest");
  val->add_option("--metric", v_metric, "cosine|kl (kl checks posteriorgrams)");

  // ---- track1 ----
  Track1Args t1;
  auto* track1 = app.add_subcommand("track1", "ABX subword discriminability");
  track1->add_option("--phones", t1.phones, "phone alignment file");
  track1->add_option("--words", t1.words, "word alignment file");
  track1->add_option("--features", t1.features, "feature directory");
  track1->add_option("--manifest", t1.manifest, "duration-subset manifest");
  track1->add_option("--batch", t1.batch, "batch JSON (multi-language run)");
  track1->add_option("--out", t1.out, "report path prefix");
  track1->add_option("--metric", t1.metric, "cosine|kl");
  track1->add_option("--mode", t1.mode, "within|across|both");
  track1->add_option("--language", t1.language, "language label");
  track1->add_option("--min-duration", t1.min_duration,
                     "drop items with shorter center phones (seconds)");
  track1->add_option("--seed", t1.seed, "seed for cell subsampling");
  track1->add_option("--cap", t1.cap, "exhaustive triplet cap per cell");
  track1->add_option("--workers", t1.workers,
                     "worker threads (0 = ZREVAL_WORKERS or hardware)");

  // ---- track2 ----
  Track2Args t2;
  auto* track2 = app.add_subcommand("track2", "spoken term discovery scoring");
  track2->add_option("--phones", t2.phones, "phone alignment file");
  track2->add_option("--words", t2.words, "word alignment file");
  track2->add_option("--classes", t2.classes, "discovered class file");
  track2->add_option("--batch", t2.batch, "batch JSON (multi-language run)");
  track2->add_option("--out", t2.out, "report path prefix");
  track2->add_option("--language", t2.language, "language label");
  track2->add_option("--chunk-size", t2.chunk_size,
                     "utterances per chunk (0 = exact evaluation)");
  track2->add_option("--workers", t2.workers,
                     "worker threads (0 = ZREVAL_WORKERS or hardware)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    if (gen_dump_config) {
      char* text = nullptr;
      const zr_status status = zr_synth_default_config(&text);
      if (status != ZR_OK) return fail(status);
      std::printf("%s", text);
      zr_string_free(text);
      return 0;
    }
    if (gen_out.empty()) {
      std::fprintf(stderr, "zreval: gen requires --out\n");
      return 2;
    }
    const zr_status status = zr_synth_generate(
        gen_config.empty() ? nullptr : gen_config.c_str(), gen_seed,
        gen_out.c_str());
    if (status != ZR_OK) return fail(status);
    std::printf("generated corpus under %s\n", gen_out.c_str());
    return 0;
  }

  if (val->parsed()) {
    char* diagnostics = nullptr;
    const zr_status status = zr_validate(
        v_phones.c_str(), v_words.c_str(),
        v_features.empty() ? nullptr : v_features.c_str(),
        v_classes.empty() ? nullptr : v_classes.c_str(),
        v_manifest.empty() ? nullptr : v_manifest.c_str(),
        v_metric == "kl" ? ZR_METRIC_KL : ZR_METRIC_COSINE, &diagnostics);
    if (diagnostics != nullptr) {
      std::printf("%s", diagnostics);
      zr_string_free(diagnostics);
    }
    return status == ZR_OK ? 0 : exit_code(status);
  }

  if (track1->parsed()) {
    if (t1.batch.empty() &&
        (t1.phones.empty() || t1.words.empty() || t1.features.empty())) {
      std::fprintf(stderr,
                   "zreval: track1 requires --phones/--words/--features or "
                   "--batch\n");
      return 2;
    }
    return run_track1(t1);
  }

  if (track2->parsed()) {
    if (t2.batch.empty() &&
        (t2.phones.empty() || t2.words.empty() || t2.classes.empty())) {
      std::fprintf(stderr,
                   "zreval: track2 requires --phones/--words/--classes or "
                   "--batch\n");
      return 2;
    }
    return run_track2(t2);
  }

  return 0;
}
