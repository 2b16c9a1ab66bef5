// formats.hpp
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

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "zreval/corpus.hpp"
#include "zreval/kernel.hpp"

namespace zreval {

// Parsers and writers for the exchange artifacts. All parsers reject rather
// than repair; every rejection names file and line. Text round-trips are the
// identity up to canonical whitespace.
//
// Feature files: one `<utt>.fea` per utterance, each line
//   `time v1 ... vd`
// with strictly increasing times (frame centers) and a constant dimension.
//
// Class files: blocks separated by blank lines,
//   `Class <id>` then one `utt onset offset` line per fragment.
//
// Subset manifests: header `utt subset`, one record per utterance.

struct FeatureSequence {
  std::string utterance;
  std::vector<double> times;       // strictly increasing frame centers
  std::vector<FrameVector> frames;  // same length as times
};

class FeatureStore {
 public:
  FeatureStore() = default;

  void add(FeatureSequence seq);
  bool has(const std::string& utterance) const {
    return index_.find(utterance) != index_.end();
  }
  const FeatureSequence& at(const std::string& utterance) const;
  std::span<const FeatureSequence> sequences() const { return sequences_; }
  std::size_t dimension() const { return dimension_; }
  bool empty() const { return sequences_.empty(); }

 private:
  std::vector<FeatureSequence> sequences_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
};

// Reads every `*.fea` file under `dir` (sorted by name). Enforces monotone
// times, rectangular rows and a consistent dimension across files. With
// `require_posteriorgram`, additionally enforces non-negative entries
// summing to 1 within 1e-6 on every frame.
FeatureStore read_features(const std::string& dir,
                           bool require_posteriorgram = false);

void write_features(const FeatureStore& store, const std::string& dir);

// Reads a class file and validates every fragment against the alignment.
std::vector<ClassGroup> read_classes(const std::string& path,
                                     const GoldAlignment& g);

void write_classes(std::span<const ClassGroup> classes,
                   const std::string& path);

struct SubsetManifest {
  std::vector<std::pair<std::string, std::string>> rows;  // (utt, subset)
  std::unordered_map<std::string, std::string> subset_of;

  // subset names in canonical order: 1s, 10s, 120s first, then the rest in
  // lexicographic order
  std::vector<std::string> subset_names() const;
  std::vector<std::string> utterances_in(const std::string& subset) const;
};

SubsetManifest read_manifest(const std::string& path, const GoldAlignment* g);
void write_manifest(const SubsetManifest& manifest, const std::string& path);

// Canonical subset ordering shared by manifest handling and report layout.
int subset_rank(const std::string& subset);
// Presentation label used in CSV headers (120s renders as 2min).
std::string subset_display(const std::string& subset);

}  // namespace zreval
