// kernel.hpp
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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "zreval/event_log.hpp"

namespace zreval {

using FrameVector = std::vector<double>;

// Frame-level dissimilarity used inside DTW: cosine for embeddings and
// signal-type features, symmetrized KL for posteriorgrams.
enum class FrameMetric { cosine, kl };

FrameMetric frame_metric_from_string(const std::string& name);
const char* to_string(FrameMetric m);

// Floor applied to posteriorgram entries (then renormalized) so that zero
// probabilities stay finite under KL.
inline constexpr double kKlEpsilon = 1e-10;

/// Cosine distance 1 - cos(u, v), clamped into [0, 2].
///
/// Bitwise-equal inputs return exactly 0, which in turn makes the DTW
/// identity exact. A zero-norm operand yields 1, the maximally uninformative
/// value; dtw() logs that condition once per run.
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// Symmetrized KL divergence 0.5 * (KL(p~||q~) + KL(q~||p~)) where p~, q~
/// are the inputs floored at kKlEpsilon and renormalized. Rejects negative
/// entries. Symmetric bitwise; 0 exactly iff the floored inputs are equal.
double kl_dissimilarity(std::span<const double> p, std::span<const double> q);

/// Dynamic time warping dissimilarity between two frame sequences.
///
/// Minimum over monotone warping paths -- steps diagonal, right, down, with
/// both endpoints anchored -- of the summed frame dissimilarity divided by
/// the number of path cells. The length-normalized objective is minimized
/// directly (DP stratified by path length), so the result is well defined
/// even when several raw-sum-optimal paths have different lengths, and it is
/// comparable across sequence lengths.
///
/// Rejects empty sequences and mismatched dimensions.
double dtw(std::span<const FrameVector> x, std::span<const FrameVector> y,
           FrameMetric metric, EventLog* log = nullptr);

/// Edit distance with unit insertion/deletion/substitution costs. Empty
/// sequences are allowed.
std::size_t levenshtein(std::span<const std::string> a,
                        std::span<const std::string> b);

}  // namespace zreval
