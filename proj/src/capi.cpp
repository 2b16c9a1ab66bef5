// capi.cpp
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

#include "zreval.h"

#include <cstring>
#include <string>
#include <vector>

#include "zreval/corpus.hpp"
#include "zreval/error.hpp"
#include "zreval/formats.hpp"
#include "zreval/report.hpp"
#include "zreval/runner.hpp"
#include "zreval/synth.hpp"
#include "zreval/version.hpp"

// opaque handle definitions
struct zr_alignment {
  zreval::GoldAlignment value;
};
struct zr_features {
  zreval::FeatureStore value;
};
struct zr_classes {
  std::vector<zreval::ClassGroup> value;
};
struct zr_report {
  zreval::ScoreReport value;
};

namespace {

thread_local std::string g_last_error;

zr_status status_of(const zreval::Error& e) {
  switch (e.kind()) {
    case zreval::ErrorKind::io:
      return ZR_ERR_IO;
    case zreval::ErrorKind::parse:
      return ZR_ERR_PARSE;
    case zreval::ErrorKind::validation:
      return ZR_ERR_VALIDATION;
    case zreval::ErrorKind::invalid_argument:
      return ZR_ERR_INVALID;
    default:
      return ZR_ERR_INTERNAL;
  }
}

template <typename Fn>
zr_status guarded(Fn&& fn) {
  try {
    fn();
    return ZR_OK;
  } catch (const zreval::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ZR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ZR_ERR_INTERNAL;
  }
}

zr_status invalid_arg(const char* message) {
  g_last_error = message;
  return ZR_ERR_INVALID;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

zreval::Track1Options convert(const zr_track1_options& o) {
  zreval::Track1Options out;
  out.metric = o.metric == ZR_METRIC_KL ? zreval::FrameMetric::kl
                                        : zreval::FrameMetric::cosine;
  out.within = (o.mode & ZR_MODE_WITHIN) != 0;
  out.across = (o.mode & ZR_MODE_ACROSS) != 0;
  out.min_duration = o.min_duration;
  out.seed = o.seed;
  out.triplet_cap = o.triplet_cap;
  out.workers = o.workers;
  return out;
}

}  // namespace

extern "C" {

const char* zr_version(void) { return ZREVAL_VERSION; }

const char* zr_last_error(void) { return g_last_error.c_str(); }

void zr_string_free(char* s) { delete[] s; }

zr_status zr_alignment_load(const char* phone_path, const char* word_path,
                            zr_alignment** out) {
  if (phone_path == nullptr || word_path == nullptr || out == nullptr)
    return invalid_arg("zr_alignment_load: NULL argument");
  return guarded([&] {
    auto* handle = new zr_alignment{zreval::load_alignment(phone_path, word_path)};
    *out = handle;
  });
}

size_t zr_alignment_utterance_count(const zr_alignment* a) {
  return a == nullptr ? 0 : a->value.size();
}

void zr_alignment_free(zr_alignment* a) { delete a; }

zr_status zr_features_load(const char* dir, int require_posteriorgram,
                           zr_features** out) {
  if (dir == nullptr || out == nullptr)
    return invalid_arg("zr_features_load: NULL argument");
  return guarded([&] {
    auto* handle =
        new zr_features{zreval::read_features(dir, require_posteriorgram != 0)};
    *out = handle;
  });
}

size_t zr_features_dimension(const zr_features* f) {
  return f == nullptr ? 0 : f->value.dimension();
}

void zr_features_free(zr_features* f) { delete f; }

zr_status zr_classes_load(const char* path, const zr_alignment* alignment,
                          zr_classes** out) {
  if (path == nullptr || alignment == nullptr || out == nullptr)
    return invalid_arg("zr_classes_load: NULL argument");
  return guarded([&] {
    auto* handle =
        new zr_classes{zreval::read_classes(path, alignment->value)};
    *out = handle;
  });
}

size_t zr_classes_count(const zr_classes* c) {
  return c == nullptr ? 0 : c->value.size();
}

void zr_classes_free(zr_classes* c) { delete c; }

void zr_track1_options_init(zr_track1_options* options) {
  if (options == nullptr) return;
  options->metric = ZR_METRIC_COSINE;
  options->mode = ZR_MODE_BOTH;
  options->min_duration = 0.0;
  options->seed = 0;
  options->triplet_cap = 10000;
  options->workers = 0;
  options->language = nullptr;
  options->manifest_path = nullptr;
}

zr_status zr_track1_run(const zr_alignment* alignment,
                        const zr_features* features,
                        const zr_track1_options* options, zr_report** out) {
  if (alignment == nullptr || features == nullptr || options == nullptr ||
      out == nullptr)
    return invalid_arg("zr_track1_run: NULL argument");
  return guarded([&] {
    const std::string language =
        options->language != nullptr ? options->language : "default";
    const std::string manifest =
        options->manifest_path != nullptr ? options->manifest_path : "";
    zreval::ScoreReport report = zreval::run_track1_loaded(
        alignment->value, features->value, language, manifest,
        convert(*options));
    *out = new zr_report{std::move(report)};
  });
}

zr_status zr_track1_run_batch(const char* batch_path,
                              const zr_track1_options* options,
                              zr_report** out) {
  if (batch_path == nullptr || options == nullptr || out == nullptr)
    return invalid_arg("zr_track1_run_batch: NULL argument");
  return guarded([&] {
    const auto specs = zreval::parse_track1_batch(batch_path);
    zreval::ScoreReport report =
        zreval::run_track1(specs, convert(*options));
    *out = new zr_report{std::move(report)};
  });
}

void zr_track2_options_init(zr_track2_options* options) {
  if (options == nullptr) return;
  options->chunk_size = 1000;
  options->workers = 0;
  options->language = nullptr;
}

zr_status zr_track2_run(const zr_alignment* alignment,
                        const zr_classes* classes,
                        const zr_track2_options* options, zr_report** out) {
  if (alignment == nullptr || classes == nullptr || options == nullptr ||
      out == nullptr)
    return invalid_arg("zr_track2_run: NULL argument");
  return guarded([&] {
    zreval::Track2Options t2;
    t2.chunk_size = options->chunk_size;
    t2.workers = options->workers;
    const std::string language =
        options->language != nullptr ? options->language : "default";
    zreval::ScoreReport report = zreval::run_track2_loaded(
        alignment->value, classes->value, language, t2);
    *out = new zr_report{std::move(report)};
  });
}

zr_status zr_track2_run_batch(const char* batch_path,
                              const zr_track2_options* options,
                              zr_report** out) {
  if (batch_path == nullptr || options == nullptr || out == nullptr)
    return invalid_arg("zr_track2_run_batch: NULL argument");
  return guarded([&] {
    const auto specs = zreval::parse_track2_batch(batch_path);
    zreval::Track2Options t2;
    t2.chunk_size = options->chunk_size;
    t2.workers = options->workers;
    zreval::ScoreReport report = zreval::run_track2(specs, t2);
    *out = new zr_report{std::move(report)};
  });
}

zr_status zr_report_write(const zr_report* report, const char* path_prefix) {
  if (report == nullptr || path_prefix == nullptr)
    return invalid_arg("zr_report_write: NULL argument");
  return guarded([&] { zreval::write_report(report->value, path_prefix); });
}

zr_status zr_report_json(const zr_report* report, char** out) {
  if (report == nullptr || out == nullptr)
    return invalid_arg("zr_report_json: NULL argument");
  return guarded([&] { *out = dup_string(report->value.to_json()); });
}

zr_status zr_report_metric(const zr_report* report, int track,
                           const char* language, const char* subset,
                           const char* name, double* out) {
  if (report == nullptr || language == nullptr || subset == nullptr ||
      name == nullptr || out == nullptr)
    return invalid_arg("zr_report_metric: NULL argument");
  return guarded(
      [&] { *out = report->value.metric(track, language, subset, name); });
}

void zr_report_free(zr_report* report) { delete report; }

zr_status zr_validate(const char* phone_path, const char* word_path,
                      const char* features_dir, const char* classes_path,
                      const char* manifest_path, zr_metric metric,
                      char** diagnostics) {
  if (phone_path == nullptr || word_path == nullptr)
    return invalid_arg("zr_validate: phone and word paths are required");
  zreval::ValidateSpec spec;
  spec.phone_path = phone_path;
  spec.word_path = word_path;
  if (features_dir != nullptr) spec.features_dir = features_dir;
  if (classes_path != nullptr) spec.classes_path = classes_path;
  if (manifest_path != nullptr) spec.manifest_path = manifest_path;
  spec.metric = metric == ZR_METRIC_KL ? zreval::FrameMetric::kl
                                       : zreval::FrameMetric::cosine;
  bool ok = false;
  const zr_status status = guarded([&] {
    const zreval::ValidationReport report = zreval::validate(spec);
    ok = report.ok();
    if (diagnostics != nullptr) *diagnostics = dup_string(report.text());
  });
  if (status != ZR_OK) return status;
  if (!ok) {
    g_last_error = "validation failed";
    return ZR_ERR_VALIDATION;
  }
  return ZR_OK;
}

zr_status zr_synth_generate(const char* config_path, int64_t seed_override,
                            const char* out_dir) {
  if (out_dir == nullptr) return invalid_arg("zr_synth_generate: NULL out_dir");
  return guarded([&] {
    zreval::SynthConfig cfg = config_path != nullptr
                                  ? zreval::load_synth_config(config_path)
                                  : zreval::SynthConfig{};
    if (seed_override >= 0)
      cfg.seed = static_cast<std::uint64_t>(seed_override);
    const zreval::SynthCorpus corpus = zreval::generate(cfg);
    zreval::write_corpus(corpus, out_dir);
  });
}

zr_status zr_synth_default_config(char** out) {
  if (out == nullptr) return invalid_arg("zr_synth_default_config: NULL out");
  return guarded(
      [&] { *out = dup_string(zreval::synth_config_text(zreval::SynthConfig{})); });
}

}  // extern "C"
