// corpus.hpp
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
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zreval/ticks.hpp"

namespace zreval {

// Time-aligned phone-level and word-level transcriptions with speaker
// identity: the ground truth every metric is computed against. All values
// are immutable after construction and safe for shared concurrent reads.

struct PhoneSegment {
  std::string phone;
  double start = 0.0;
  double end = 0.0;
};

struct WordSegment {
  std::string word;
  double start = 0.0;
  double end = 0.0;
};

struct Utterance {
  std::string id;
  std::string speaker;
  double duration = 0.0;  // end of the last phone segment
  std::vector<PhoneSegment> phones;  // sorted, non-overlapping
  std::vector<WordSegment> words;    // partition of the non-silence span
  // word index -> [first, last] phone index, filled during validation
  std::vector<std::pair<int, int>> word_phone_spans;
};

// A time interval inside one utterance, as proposed by a term-discovery
// system or derived from gold words.
struct Fragment {
  std::string utterance;
  double onset = 0.0;
  double offset = 0.0;
};

// A labeled set of fragments claimed to be tokens of one type.
struct ClassGroup {
  std::string class_id;
  std::vector<Fragment> fragments;
};

inline const std::set<std::string>& default_silence_symbols() {
  static const std::set<std::string> s = {"sil", "spn", "noise"};
  return s;
}

class GoldAlignment {
 public:
  GoldAlignment() : silence_(default_silence_symbols()) {}
  GoldAlignment(std::vector<Utterance> utterances,
                std::set<std::string> silence_symbols);

  std::span<const Utterance> utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }

  bool has(const std::string& id) const {
    return index_.find(id) != index_.end();
  }
  const Utterance& at(const std::string& id) const;
  int index_of(const std::string& id) const;  // -1 when absent

  const std::set<std::string>& speakers() const { return speakers_; }
  const std::set<std::string>& silence_symbols() const { return silence_; }
  bool is_silence(const std::string& symbol) const {
    return silence_.find(symbol) != silence_.end();
  }

  // Checks every structural invariant (ordering, overlap, word/phone
  // boundary agreement, partition of the non-silence span) and fills the
  // word_phone_spans index. Throws Error on the first violation.
  void validate();

 private:
  std::vector<Utterance> utterances_;  // file order
  std::unordered_map<std::string, std::size_t> index_;
  std::set<std::string> speakers_;
  std::set<std::string> silence_;
};

// Reads the two-file alignment format (phones and words). Each file starts
// with the header line `utt speaker start end symbol` followed by one
// whitespace-separated record per segment, grouped by utterance and sorted
// by start time. Rejects malformed lines, overlapping segments and
// word/phone boundary mismatches, naming file and line.
GoldAlignment load_alignment(
    const std::string& phone_path, const std::string& word_path,
    std::set<std::string> silence_symbols = default_silence_symbols());

// Writes the canonical form of the same format (times with microsecond
// precision, single-space separators).
void write_alignment(const GoldAlignment& g, const std::string& phone_path,
                     const std::string& word_path);

// Returns the utterance or throws a validation error naming the fragment;
// also checks onset < offset and containment in [0, duration].
const Utterance& resolve_fragment(const Fragment& f, const GoldAlignment& g);

// Gold phone symbols covered by the fragment, silences excluded. A phone
// fully inside [onset, offset] is always included; an edge phone partially
// covered is included iff its overlap exceeds 30 ms or exceeds 50% of the
// phone's own duration (both strict, compared on 0.1 ms ticks).
std::vector<std::string> fragment_phone_transcription(const Fragment& f,
                                                      const GoldAlignment& g);

// [first, last] phone indices (into Utterance::phones) of the non-silence
// phones included by the transcription rule; {-1, -2} when none.
std::pair<int, int> fragment_phone_span(const Fragment& f,
                                        const GoldAlignment& g);

// Same inclusion rule applied to the word tier.
std::vector<std::string> fragment_word_transcription(const Fragment& f,
                                                     const GoldAlignment& g);

// All phone n-grams (n in [n_min, n_max], silence breaks contiguity) that
// occur at least twice corpus-wide, with every occurrence interval. The
// union of these intervals is the "discoverable" region used by coverage.
std::map<std::vector<std::string>, std::vector<Fragment>> ngram_occurrences(
    const GoldAlignment& g, int n_min, int n_max);

// Same, restricted to a subset of utterances (used by chunked evaluation;
// recurrence is counted within the subset).
std::map<std::vector<std::string>, std::vector<Fragment>> ngram_occurrences(
    const GoldAlignment& g, std::span<const int> utterance_indices, int n_min,
    int n_max);

}  // namespace zreval
