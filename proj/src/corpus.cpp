// corpus.cpp
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

#include "zreval/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "zreval/error.hpp"

namespace zreval {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  for (std::string tok; iss >> tok;) out.push_back(tok);
  return out;
}

double parse_time(const std::string& tok, const std::string& file, int line) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    fail_parse(file, line, "non-numeric time '" + tok + "'");
  return v;
}

struct RawRecord {
  std::string utt, speaker, symbol;
  double start, end;
  int line;
};

// header `utt speaker start end symbol`, then whitespace-separated records
std::vector<RawRecord> read_segment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open alignment file", path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) fail_parse(path, 1, "empty file, header expected");
  ++lineno;
  const auto header = split_ws(line);
  const std::vector<std::string> expected = {"utt", "speaker", "start", "end",
                                             "symbol"};
  if (header != expected)
    fail_parse(path, 1, "bad header (expected 'utt speaker start end symbol')");

  std::vector<RawRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 5)
      fail_parse(path, lineno,
                 "malformed record: expected 5 fields, got " +
                     std::to_string(toks.size()));
    RawRecord r;
    r.utt = toks[0];
    r.speaker = toks[1];
    r.start = parse_time(toks[2], path, lineno);
    r.end = parse_time(toks[3], path, lineno);
    r.symbol = toks[4];
    r.line = lineno;
    if (r.symbol.empty()) fail_parse(path, lineno, "empty symbol");
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace

GoldAlignment::GoldAlignment(std::vector<Utterance> utterances,
                             std::set<std::string> silence_symbols)
    : utterances_(std::move(utterances)), silence_(std::move(silence_symbols)) {
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& u = utterances_[i];
    if (!index_.emplace(u.id, i).second)
      fail_validation("duplicate utterance id '" + u.id + "'");
    speakers_.insert(u.speaker);
  }
}

const Utterance& GoldAlignment::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    fail_validation("unknown utterance '" + id + "'");
  return utterances_[it->second];
}

int GoldAlignment::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<int>(it->second);
}

void GoldAlignment::validate() {
  for (auto& u : utterances_) {
    if (u.phones.empty())
      fail_validation("utterance '" + u.id + "' has no phone segments");
    Ticks prev_end = 0;
    for (std::size_t i = 0; i < u.phones.size(); ++i) {
      const auto& p = u.phones[i];
      const Ticks s = to_ticks(p.start), e = to_ticks(p.end);
      if (s >= e)
        fail_validation("utterance '" + u.id + "': phone '" + p.phone +
                        "' has end <= start at " + std::to_string(p.start));
      if (s < 0)
        fail_validation("utterance '" + u.id + "': negative start time");
      if (i > 0 && s < prev_end)
        fail_validation("utterance '" + u.id +
                        "': overlapping phone segments near " +
                        std::to_string(p.start));
      prev_end = e;
    }
    u.duration = u.phones.back().end;

    // words: sorted, non-overlapping, snapped to phone boundaries,
    // internally contiguous and silence-free
    u.word_phone_spans.clear();
    u.word_phone_spans.reserve(u.words.size());
    Ticks prev_word_end = -1;
    std::size_t phone_cursor = 0;
    std::vector<bool> covered(u.phones.size(), false);
    for (const auto& w : u.words) {
      const Ticks ws = to_ticks(w.start), we = to_ticks(w.end);
      if (ws >= we)
        fail_validation("utterance '" + u.id + "': word '" + w.word +
                        "' has end <= start");
      if (ws < prev_word_end)
        fail_validation("utterance '" + u.id +
                        "': overlapping or unsorted word segments near " +
                        std::to_string(w.start));
      prev_word_end = we;
      while (phone_cursor < u.phones.size() &&
             to_ticks(u.phones[phone_cursor].start) < ws)
        ++phone_cursor;
      if (phone_cursor >= u.phones.size() ||
          to_ticks(u.phones[phone_cursor].start) != ws)
        fail_validation("utterance '" + u.id + "': word '" + w.word +
                        "' start does not coincide with a phone boundary");
      std::size_t i = phone_cursor;
      Ticks cur = ws;
      while (true) {
        if (i >= u.phones.size() || to_ticks(u.phones[i].start) != cur)
          fail_validation("utterance '" + u.id + "': word '" + w.word +
                          "' is not a contiguous phone sequence");
        if (is_silence(u.phones[i].phone))
          fail_validation("utterance '" + u.id + "': word '" + w.word +
                          "' spans a silence segment");
        covered[i] = true;
        cur = to_ticks(u.phones[i].end);
        if (cur == we) break;
        if (cur > we)
          fail_validation("utterance '" + u.id + "': word '" + w.word +
                          "' end does not coincide with a phone boundary");
        ++i;
      }
      u.word_phone_spans.emplace_back(static_cast<int>(phone_cursor),
                                      static_cast<int>(i));
    }
    for (std::size_t i = 0; i < u.phones.size(); ++i) {
      if (!is_silence(u.phones[i].phone) && !covered[i])
        fail_validation("utterance '" + u.id + "': phone '" +
                        u.phones[i].phone + "' at " +
                        std::to_string(u.phones[i].start) +
                        " is not covered by any word");
    }
  }
}

GoldAlignment load_alignment(const std::string& phone_path,
                             const std::string& word_path,
                             std::set<std::string> silence_symbols) {
  const auto phone_records = read_segment_file(phone_path);
  const auto word_records = read_segment_file(word_path);

  std::vector<Utterance> utterances;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& r : phone_records) {
    if (utterances.empty() || utterances.back().id != r.utt) {
      if (index.find(r.utt) != index.end())
        fail_parse(phone_path, r.line,
                   "utterance '" + r.utt +
                       "' appears in non-contiguous blocks (records must be "
                       "sorted by utterance)");
      index.emplace(r.utt, utterances.size());
      Utterance u;
      u.id = r.utt;
      u.speaker = r.speaker;
      utterances.push_back(std::move(u));
    }
    Utterance& u = utterances.back();
    if (u.speaker != r.speaker)
      fail_parse(phone_path, r.line,
                 "utterance '" + r.utt + "' has inconsistent speakers ('" +
                     u.speaker + "' vs '" + r.speaker + "')");
    u.phones.push_back(PhoneSegment{r.symbol, r.start, r.end});
  }

  for (const auto& r : word_records) {
    auto it = index.find(r.utt);
    if (it == index.end())
      fail_parse(word_path, r.line,
                 "utterance '" + r.utt + "' not present in the phone file");
    Utterance& u = utterances[it->second];
    if (u.speaker != r.speaker)
      fail_parse(word_path, r.line,
                 "utterance '" + r.utt + "' speaker mismatch with phone file");
    u.words.push_back(WordSegment{r.symbol, r.start, r.end});
  }

  GoldAlignment g(std::move(utterances), std::move(silence_symbols));
  g.validate();
  return g;
}

namespace {

void format_time(char* buf, std::size_t n, double t) {
  std::snprintf(buf, n, "%.6f", t);
}

}  // namespace

void write_alignment(const GoldAlignment& g, const std::string& phone_path,
                     const std::string& word_path) {
  char a[64], b[64];
  {
    std::ofstream out(phone_path);
    if (!out) fail_io("cannot write alignment file", phone_path);
    out << "utt speaker start end symbol\n";
    for (const auto& u : g.utterances())
      for (const auto& p : u.phones) {
        format_time(a, sizeof a, p.start);
        format_time(b, sizeof b, p.end);
        out << u.id << ' ' << u.speaker << ' ' << a << ' ' << b << ' '
            << p.phone << '\n';
      }
  }
  {
    std::ofstream out(word_path);
    if (!out) fail_io("cannot write alignment file", word_path);
    out << "utt speaker start end symbol\n";
    for (const auto& u : g.utterances())
      for (const auto& w : u.words) {
        format_time(a, sizeof a, w.start);
        format_time(b, sizeof b, w.end);
        out << u.id << ' ' << u.speaker << ' ' << a << ' ' << b << ' '
            << w.word << '\n';
      }
  }
}

const Utterance& resolve_fragment(const Fragment& f, const GoldAlignment& g) {
  if (!g.has(f.utterance))
    fail_validation("fragment references unknown utterance '" + f.utterance +
                    "'");
  const Utterance& u = g.at(f.utterance);
  const Ticks on = to_ticks(f.onset), off = to_ticks(f.offset);
  if (on >= off)
    fail_validation("fragment " + f.utterance + " [" +
                    std::to_string(f.onset) + ", " + std::to_string(f.offset) +
                    ") has onset >= offset");
  if (on < 0 || off > to_ticks(u.duration))
    fail_validation("fragment " + f.utterance + " [" +
                    std::to_string(f.onset) + ", " + std::to_string(f.offset) +
                    ") lies outside the utterance (duration " +
                    std::to_string(u.duration) + ")");
  return u;
}

namespace {

inline constexpr Ticks kEdgeMsTicks = 300;  // "more than 30 ms", strict

// Inclusive index range of segments included by the edge rule; {1, 0} style
// empty ranges signal "nothing included". Segments must be sorted and
// non-overlapping. The rule: segments fully inside are included; the first
// and last partially-overlapped segments are included iff overlap > 30 ms or
// overlap > 50% of the segment duration (interior segments are geometrically
// always fully inside).
template <typename Seg>
std::pair<int, int> included_segment_range(const std::vector<Seg>& segments,
                                           Ticks onset, Ticks offset) {
  int first = -1, last = -2;
  for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
    const Ticks s = to_ticks(segments[i].start);
    const Ticks e = to_ticks(segments[i].end);
    if (e <= onset) continue;
    if (s >= offset) break;
    if (first == -1) first = i;
    last = i;
  }
  if (first == -1) return {-1, -2};

  auto keep_edge = [&](int i) {
    const Ticks s = to_ticks(segments[i].start);
    const Ticks e = to_ticks(segments[i].end);
    if (s >= onset && e <= offset) return true;  // fully inside
    const Ticks overlap = std::min(e, offset) - std::max(s, onset);
    if (overlap > kEdgeMsTicks) return true;
    return 2 * overlap > (e - s);  // overlap > 50% of the segment, strict
  };

  int lo = first, hi = last;
  if (!keep_edge(first)) ++lo;
  if (hi >= lo && !keep_edge(last)) --hi;
  if (lo > hi) return {-1, -2};
  return {lo, hi};
}

}  // namespace

std::vector<std::string> fragment_phone_transcription(const Fragment& f,
                                                      const GoldAlignment& g) {
  const Utterance& u = resolve_fragment(f, g);
  const auto [lo, hi] =
      included_segment_range(u.phones, to_ticks(f.onset), to_ticks(f.offset));
  std::vector<std::string> out;
  for (int i = lo; i <= hi; ++i)
    if (!g.is_silence(u.phones[i].phone)) out.push_back(u.phones[i].phone);
  return out;
}

std::pair<int, int> fragment_phone_span(const Fragment& f,
                                        const GoldAlignment& g) {
  const Utterance& u = resolve_fragment(f, g);
  const auto [lo, hi] =
      included_segment_range(u.phones, to_ticks(f.onset), to_ticks(f.offset));
  int first = -1, last = -2;
  for (int i = lo; i <= hi; ++i) {
    if (g.is_silence(u.phones[i].phone)) continue;
    if (first == -1) first = i;
    last = i;
  }
  return {first, last};
}

std::vector<std::string> fragment_word_transcription(const Fragment& f,
                                                     const GoldAlignment& g) {
  const Utterance& u = resolve_fragment(f, g);
  const auto [lo, hi] =
      included_segment_range(u.words, to_ticks(f.onset), to_ticks(f.offset));
  std::vector<std::string> out;
  for (int i = lo; i <= hi; ++i) out.push_back(u.words[i].word);
  return out;
}

namespace {

// Maximal runs of consecutive non-silence phones; silence symbols and
// temporal gaps both break contiguity.
std::vector<std::pair<int, int>> nonsilence_runs(const Utterance& u,
                                                 const GoldAlignment& g) {
  std::vector<std::pair<int, int>> runs;
  int start = -1;
  Ticks prev_end = 0;
  for (int i = 0; i < static_cast<int>(u.phones.size()); ++i) {
    const auto& p = u.phones[i];
    const bool silent = g.is_silence(p.phone);
    const bool gap = start != -1 && to_ticks(p.start) != prev_end;
    if (silent || gap) {
      if (start != -1) runs.emplace_back(start, i - 1);
      start = silent ? -1 : i;
    } else if (start == -1) {
      start = i;
    }
    prev_end = to_ticks(p.end);
  }
  if (start != -1) runs.emplace_back(start, static_cast<int>(u.phones.size()) - 1);
  return runs;
}

}  // namespace

std::map<std::vector<std::string>, std::vector<Fragment>> ngram_occurrences(
    const GoldAlignment& g, std::span<const int> utterance_indices, int n_min,
    int n_max) {
  if (n_min < 1 || n_min > n_max)
    fail_invalid("ngram_occurrences: invalid range [" + std::to_string(n_min) +
                 ", " + std::to_string(n_max) + "]");
  std::map<std::vector<std::string>, std::vector<Fragment>> occurrences;
  for (int ui : utterance_indices) {
    const Utterance& u = g.utterances()[ui];
    for (const auto& [lo, hi] : nonsilence_runs(u, g)) {
      const int len = hi - lo + 1;
      for (int n = n_min; n <= std::min(n_max, len); ++n) {
        for (int i = lo; i + n - 1 <= hi; ++i) {
          std::vector<std::string> key;
          key.reserve(n);
          for (int k = i; k < i + n; ++k) key.push_back(u.phones[k].phone);
          occurrences[std::move(key)].push_back(
              Fragment{u.id, u.phones[i].start, u.phones[i + n - 1].end});
        }
      }
    }
  }
  for (auto it = occurrences.begin(); it != occurrences.end();) {
    if (it->second.size() < 2)
      it = occurrences.erase(it);
    else
      ++it;
  }
  return occurrences;
}

std::map<std::vector<std::string>, std::vector<Fragment>> ngram_occurrences(
    const GoldAlignment& g, int n_min, int n_max) {
  std::vector<int> all(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) all[i] = static_cast<int>(i);
  return ngram_occurrences(g, all, n_min, n_max);
}

}  // namespace zreval
