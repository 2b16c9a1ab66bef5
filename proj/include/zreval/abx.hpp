// abx.hpp
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
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "zreval/corpus.hpp"
#include "zreval/event_log.hpp"
#include "zreval/formats.hpp"
#include "zreval/kernel.hpp"

namespace zreval {

// Minimal-pair ABX evaluation over triphone tokens: extract every window of
// three consecutive non-silence gold phones, build scoring cells for phone
// pairs that differ in the central sound, score each cell as the fraction of
// (A, B, X) triplets where X lands closer to its own category, and average
// the cell scores up the (speaker, context, phone-pair) hierarchy.

struct TriphoneItem {
  std::string left, center, right;
  std::string speaker;
  Fragment fragment;  // spans exactly the three phones
};

enum class SpeakerMode { within, across };

// One directional scoring unit: discriminability of `center_from` against
// `center_against` in a fixed context and speaker configuration. A and X
// tokens have category center_from, B tokens center_against; in across mode
// A/B come from speaker_ab and X from speaker_x.
struct AbxCell {
  SpeakerMode mode = SpeakerMode::within;
  std::string center_from, center_against;
  std::string left, right;
  std::string speaker_ab, speaker_x;  // equal in within mode
  std::vector<int> a_items, b_items, x_items;  // indices into the item list

  std::string key() const;  // stable identifier (seeding, diagnostics)
};

struct AbxOptions {
  FrameMetric metric = FrameMetric::cosine;
  double min_duration = 0.0;          // drop items with shorter center phone
  std::uint64_t seed = 0;             // drives cell subsampling only
  std::size_t triplet_cap = 10000;    // exhaustive up to this many triplets
  int workers = 1;
};

struct AbxResult {
  bool has_within = false, has_across = false;
  double within_error = 0.0, across_error = 0.0;
  std::size_t cell_count = 0;          // scored cells, both modes
  std::size_t scored_triplets = 0;     // total (A,B,X) comparisons
  std::map<std::pair<std::string, std::string>, double> within_pair_errors;
  std::map<std::pair<std::string, std::string>, double> across_pair_errors;
};

// Every window of 3 consecutive non-silence phones (silences and temporal
// gaps break the window), with speaker and exact interval. Items whose
// center phone is shorter than min_duration are excluded.
std::vector<TriphoneItem> extract_items(const GoldAlignment& g,
                                        double min_duration = 0.0);

// Groups items into directional cells. A within cell needs at least two
// tokens of the A/X category (X must be a distinct token from A) and one B
// token; an across cell needs one token of each role, with A/B and X taken
// from an ordered pair of distinct speakers.
std::vector<AbxCell> build_cells(std::span<const TriphoneItem> items,
                                 SpeakerMode mode);

// Fraction of valid (A, B, X) triplets with dtw(A, X) < dtw(B, X), ties
// counted 1/2. Cells beyond triplet_cap are subsampled deterministically
// from (seed, cell key). `scored` receives the number of comparisons made.
double score_cell(const AbxCell& cell, std::span<const TriphoneItem> items,
                  const FeatureStore& features, const AbxOptions& options,
                  EventLog* log, std::size_t* scored = nullptr);

struct ScoredCell {
  const AbxCell* cell;
  double score;
};

// Symmetrizes directions per (speaker configuration, context, unordered
// pair), then averages over speaker configurations, then contexts, then
// pairs; error = 1 - grand mean. Rejects an empty cell list.
AbxResult aggregate(std::span<const ScoredCell> scored);

// Full pipeline for one utterance subset: extract, build cells for the
// requested modes, score them in parallel and aggregate. `utterances` of
// nullptr means the whole corpus.
AbxResult run_abx(const GoldAlignment& g, const FeatureStore& features,
                  const std::set<std::string>* utterances, bool within,
                  bool across, const AbxOptions& options, EventLog& log);

}  // namespace zreval
