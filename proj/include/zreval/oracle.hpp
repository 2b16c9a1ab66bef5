// oracle.hpp
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

#include <set>
#include <span>
#include <string>

#include "zreval/abx.hpp"
#include "zreval/corpus.hpp"
#include "zreval/formats.hpp"
#include "zreval/tde.hpp"

namespace zreval::oracle {

// Reference implementations that recompute every score by direct
// enumeration. They deliberately share no scoring code with the main
// modules (only the domain types): the dissimilarities, the edge-inclusion
// rule, the pair sets and the aggregations are all re-derived here with
// naive quadratic-or-worse algorithms. Guarded to small corpora so they can
// never be mistaken for the production path.

inline constexpr std::size_t kMaxOracleUtterances = 50;

// Whole-corpus ABX recomputation. `utterances` of nullptr means all.
// Rejects corpora above kMaxOracleUtterances and cells whose triplet count
// exceeds triplet_guard (the main path would subsample there; oracle
// comparisons must stay exhaustive).
AbxResult oracle_abx(const GoldAlignment& g, const FeatureStore& features,
                     const std::set<std::string>* utterances,
                     FrameMetric metric, double min_duration = 0.0,
                     std::size_t triplet_guard = 10000);

// Exact-mode (single pass) recomputation of the full score row.
TdeResult oracle_tde(std::span<const ClassGroup> classes,
                     const GoldAlignment& g);

}  // namespace zreval::oracle
