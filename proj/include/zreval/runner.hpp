// runner.hpp
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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zreval/corpus.hpp"
#include "zreval/formats.hpp"
#include "zreval/kernel.hpp"
#include "zreval/report.hpp"

namespace zreval {

// End-to-end runs: load inputs, evaluate, assemble the report. A run over
// several languages produces per-language rows plus an unweighted "avg"
// row. Reports are bitwise-identical across worker counts and across runs
// with the same inputs and seed.

struct Track1Spec {
  std::string language = "default";
  std::string phone_path, word_path;
  std::string features_dir;
  std::string manifest_path;  // empty: score everything as one subset "all"
};

struct Track1Options {
  FrameMetric metric = FrameMetric::cosine;
  bool within = true;
  bool across = true;
  double min_duration = 0.0;
  std::uint64_t seed = 0;
  std::size_t triplet_cap = 10000;
  int workers = 0;  // 0: ZREVAL_WORKERS or hardware concurrency
};

ScoreReport run_track1(std::span<const Track1Spec> specs,
                       const Track1Options& options);

// Same evaluation over already-loaded inputs (the C API path). Posteriorgram
// validation for KL mode happens at feature-load time.
ScoreReport run_track1_loaded(const GoldAlignment& g,
                              const FeatureStore& features,
                              const std::string& language,
                              const std::string& manifest_path,
                              const Track1Options& options);

struct Track2Spec {
  std::string language = "default";
  std::string phone_path, word_path;
  std::string classes_path;
};

struct Track2Options {
  std::size_t chunk_size = 1000;  // 0 = exact
  int workers = 0;
};

ScoreReport run_track2(std::span<const Track2Spec> specs,
                       const Track2Options& options);

ScoreReport run_track2_loaded(const GoldAlignment& g,
                              std::span<const ClassGroup> classes,
                              const std::string& language,
                              const Track2Options& options);

// Batch manifests: a JSON array of objects with keys
//   track 1: language, phones, words, features, manifest (optional)
//   track 2: language, phones, words, classes
std::vector<Track1Spec> parse_track1_batch(const std::string& path);
std::vector<Track2Spec> parse_track2_batch(const std::string& path);

struct ValidateSpec {
  std::string phone_path, word_path;  // required
  std::string features_dir;           // optional
  std::string classes_path;           // optional
  std::string manifest_path;          // optional
  FrameMetric metric = FrameMetric::cosine;  // kl adds posteriorgram checks
};

struct ValidationReport {
  std::vector<std::string> checked;      // artifacts parsed
  std::vector<std::string> diagnostics;  // empty iff everything is valid
  bool ok() const { return diagnostics.empty(); }
  std::string text() const;
};

// Runs every parser in check-only mode and cross-validates the artifacts
// against the alignment. Never throws on bad input; every problem becomes a
// named diagnostic.
ValidationReport validate(const ValidateSpec& spec);

}  // namespace zreval
