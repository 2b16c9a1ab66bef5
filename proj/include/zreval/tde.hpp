// tde.hpp
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
#include "zreval/event_log.hpp"

namespace zreval {

// Term-discovery evaluation: matching quality (NED, coverage), lexicon
// quality (grouping and type scores) and word segmentation quality (token
// and boundary scores), in exact or chunked mode.
//
// Division-by-zero policy everywhere: a precision/recall whose denominator
// is empty is reported as 0 and logged; an undefined NED is reported as 1
// and logged; F with P = R = 0 is 0.

// Fragment types (transcriptions) appearing in metrics are restricted to
// this length range, and the discoverable region is built from n-grams of
// the same range.
inline constexpr int kNgramMin = 3;
inline constexpr int kNgramMax = 20;

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

struct MatchingScores {
  double ned = 0.0;
  double coverage = 0.0;      // capped at 1
  double coverage_raw = 0.0;  // as computed
};

struct TdeResult {
  double ned = 0.0;
  double coverage = 0.0;
  double coverage_raw = 0.0;
  PRF grouping, type, token, boundary;
  std::size_t words_found = 0;  // distinct nonempty fragment transcriptions
  std::size_t pairs = 0;        // within-class fragment pairs
};

struct TdeOptions {
  std::size_t chunk_size = 1000;  // 0 = exact single-pass evaluation
  int workers = 1;
};

// Deduplicated fragments plus the two pair sets the lexicon metrics are
// defined over: clus_pairs holds every unordered within-class pair of
// distinct fragments; goldclus_pairs holds every unordered pair of
// discovered fragments with identical nonempty transcriptions that do not
// overlap in time. Pairs are (fragment id, fragment id) with id < id.
struct PairSets {
  std::vector<Fragment> fragments;
  std::vector<std::vector<std::string>> transcriptions;  // per fragment id
  std::vector<std::pair<std::uint32_t, std::uint32_t>> clus_pairs;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> goldclus_pairs;
};

PairSets build_pair_sets(std::span<const ClassGroup> classes,
                         const GoldAlignment& g);

// NED: mean over within-class pairs of levenshtein / max transcription
// length (pairs of two empty transcriptions are skipped and logged).
// Coverage: |union of fragments ∩ discoverable| / |discoverable| where the
// discoverable region is the union of recurring 3..20-gram intervals.
MatchingScores eval_matching(std::span<const ClassGroup> classes,
                             const GoldAlignment& g, EventLog* log = nullptr);

// Weighted cluster-purity precision and inverse-fragmentation recall over
// the pair sets. Because gold pairs are transcription-pure, the weighted
// per-type sum reduces exactly to |clus ∩ goldclus| over the set size, which
// is how it is computed (in exact integer arithmetic).
PRF grouping_scores(const PairSets& sets, EventLog* log = nullptr);

// Set comparison of distinct discovered fragment transcriptions against the
// gold lexicon of word transcriptions, both restricted to 3..20 phones.
PRF type_scores(std::span<const ClassGroup> classes, const GoldAlignment& g,
                EventLog* log = nullptr);

// A discovered fragment (3..20 phones) is a token hit iff its snapped phone
// index range coincides with a gold word's phone span in the same utterance.
// Recall counts each matched gold token once.
PRF token_scores(std::span<const ClassGroup> classes, const GoldAlignment& g,
                 EventLog* log = nullptr);

// Boundary points are gold phone boundary indices; fragment edges snap to
// the first included phone's start and the last included phone's end. Gold
// boundaries are word edges plus utterance edges.
PRF boundary_scores(std::span<const ClassGroup> classes,
                    const GoldAlignment& g, EventLog* log = nullptr);

// Splits the utterance list into chunks of chunk_size in corpus order,
// computes every score per chunk over that chunk's fragments and gold
// content, and reports the unweighted mean over chunks where the score is
// defined. F-scores are averaged per chunk, so the reported F is not the
// harmonic mean of the reported P and R. chunk_size 0 (or >= corpus size)
// recovers the exact single-pass scores. Counts (words_found, pairs) are
// global, not per chunk.
TdeResult eval_chunked(std::span<const ClassGroup> classes,
                       const GoldAlignment& g, const TdeOptions& options,
                       EventLog& log);

}  // namespace zreval
