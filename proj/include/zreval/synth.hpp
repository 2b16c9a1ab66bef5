// synth.hpp
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
#include <string>
#include <vector>

#include "zreval/corpus.hpp"
#include "zreval/formats.hpp"
#include "zreval/rng.hpp"

namespace zreval {

// Synthetic corpus generation: a deterministic stand-in for real speech
// corpora at desk scale. Speaker structure defaults to a small "family" of
// high-volume speakers plus lower-volume "outsiders"; utterances are drawn
// per duration subset; words come from a fixed random lexicon of distinct
// phone sequences.

enum class FeatureModel { onehot_gold, prototype_offset, random_features };

FeatureModel feature_model_from_string(const std::string& name);
const char* to_string(FeatureModel m);

struct SubsetSpec {
  std::string name;
  double weight = 1.0;
  double dur_min = 1.0;  // utterance target duration range, seconds
  double dur_max = 2.0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int phone_inventory = 25;
  std::string silence_symbol = "sil";
  int lexicon_size = 200;
  int word_len_min = 3;
  int word_len_max = 8;
  int family_speakers = 4;
  double family_minutes_min = 20.0;
  double family_minutes_max = 25.0;
  int outsider_speakers = 8;
  double outsider_minutes_min = 10.0;
  double outsider_minutes_max = 10.5;
  double phone_dur_min = 0.03;
  double phone_dur_max = 0.18;
  double silence_prob = 0.15;
  double silence_dur_min = 0.05;
  double silence_dur_max = 0.4;
  std::vector<SubsetSpec> subsets = {{"1s", 0.6, 0.8, 1.5},
                                     {"10s", 0.3, 8.0, 12.0},
                                     {"120s", 0.1, 100.0, 140.0}};
  FeatureModel feature_model = FeatureModel::onehot_gold;
  int feature_dim = 12;  // prototype_offset and random models
  double frame_period = 0.01;
  double noise_sigma = 0.3;       // prototype_offset
  double offset_magnitude = 1.0;  // prototype_offset

  void validate() const;  // throws on inconsistent settings
};

// `key = value` text form ('#' comments allowed; unknown keys rejected).
SynthConfig parse_synth_config_text(const std::string& text);
SynthConfig load_synth_config(const std::string& path);
std::string synth_config_text(const SynthConfig& cfg);

struct SynthCorpus {
  GoldAlignment alignment;
  FeatureStore features;
  std::vector<ClassGroup> topline_classes;  // one class per gold word type
  SubsetManifest manifest;
  SynthConfig config;
};

// Deterministic for a fixed config: per-speaker speech totals land inside
// the configured minute ranges, word tokens are drawn from the lexicon, and
// features cover every utterance.
SynthCorpus generate(const SynthConfig& cfg);

// Writes phones.txt, words.txt, features/, classes_topline.txt,
// manifest.txt and synth_config.txt under dir.
void write_corpus(const SynthCorpus& corpus, const std::string& dir);

// A randomized term-discovery submission over the alignment: a mix of
// word-aligned spans, arbitrary intervals and duplicated fragments, grouped
// into classes. Exercises every fragment-handling path in the evaluators.
std::vector<ClassGroup> random_classes(const GoldAlignment& g, Rng& rng,
                                       std::size_t n_fragments);

}  // namespace zreval
