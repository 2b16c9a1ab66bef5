// tde.cpp
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

#include "zreval/tde.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "zreval/error.hpp"
#include "zreval/kernel.hpp"
#include "zreval/parallel.hpp"

namespace zreval {

namespace {

inline constexpr int kTypeMin = kNgramMin;  // 3..20 phones everywhere
inline constexpr int kTypeMax = kNgramMax;

struct FragRec {
  int utt = -1;  // index into g.utterances()
  Ticks on = 0, off = 0;
  std::vector<std::string> transcription;
  int span_first = -1, span_last = -2;  // snapped phone index range
};

struct FragKeyHash {
  std::size_t operator()(const std::tuple<int, Ticks, Ticks>& k) const {
    std::size_t h = std::hash<int>()(std::get<0>(k));
    h ^= std::hash<Ticks>()(std::get<1>(k)) + 0x9e3779b97f4a7c15ull + (h << 6);
    h ^= std::hash<Ticks>()(std::get<2>(k)) + 0x9e3779b97f4a7c15ull + (h << 6);
    return h;
  }
};

// Deduplicated fragments (ids in first-encounter order) plus each class as
// a list of fragment ids.
struct FragTable {
  std::vector<FragRec> recs;
  std::vector<std::vector<std::uint32_t>> class_frags;
};

FragTable build_frag_table(std::span<const ClassGroup> classes,
                           const GoldAlignment& g) {
  FragTable table;
  std::unordered_map<std::tuple<int, Ticks, Ticks>, std::uint32_t, FragKeyHash>
      index;
  table.class_frags.reserve(classes.size());
  for (const auto& cls : classes) {
    std::vector<std::uint32_t> ids;
    ids.reserve(cls.fragments.size());
    for (const auto& f : cls.fragments) {
      resolve_fragment(f, g);
      const std::tuple<int, Ticks, Ticks> key{g.index_of(f.utterance),
                                              to_ticks(f.onset),
                                              to_ticks(f.offset)};
      auto [it, inserted] =
          index.emplace(key, static_cast<std::uint32_t>(table.recs.size()));
      if (inserted) {
        FragRec rec;
        rec.utt = std::get<0>(key);
        rec.on = std::get<1>(key);
        rec.off = std::get<2>(key);
        rec.transcription = fragment_phone_transcription(f, g);
        const auto span = fragment_phone_span(f, g);
        rec.span_first = span.first;
        rec.span_last = span.second;
        table.recs.push_back(std::move(rec));
      }
      ids.push_back(it->second);
    }
    table.class_frags.push_back(std::move(ids));
  }
  return table;
}

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Within-class unordered pairs of distinct fragments, deduplicated across
// classes, in first-encounter order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> collect_clus_pairs(
    std::span<const std::vector<std::uint32_t>> class_frags) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& ids : class_frags) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (ids[i] == ids[j]) continue;  // identical fragments never pair
        if (seen.insert(pair_key(ids[i], ids[j])).second)
          pairs.emplace_back(std::min(ids[i], ids[j]),
                             std::max(ids[i], ids[j]));
      }
  }
  return pairs;
}

bool fragments_overlap(const FragRec& a, const FragRec& b) {
  if (a.utt != b.utt) return false;
  return a.on < b.off && b.on < a.off;
}

// All unordered pairs of discovered fragments with identical nonempty
// transcriptions that do not overlap each other in time.
std::vector<std::pair<std::uint32_t, std::uint32_t>> collect_goldclus_pairs(
    const std::vector<FragRec>& recs,
    std::span<const std::uint32_t> fragment_ids) {
  std::map<std::vector<std::string>, std::vector<std::uint32_t>> by_type;
  for (std::uint32_t id : fragment_ids) {
    const auto& t = recs[id].transcription;
    if (!t.empty()) by_type[t].push_back(id);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (auto& [type, ids] : by_type) {
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (!fragments_overlap(recs[ids[i]], recs[ids[j]]))
          pairs.emplace_back(ids[i], ids[j]);
  }
  return pairs;
}

// interval set helpers on ticks
using Intervals = std::vector<std::pair<Ticks, Ticks>>;

// Sorts, merges in place, and returns the total covered length.
Ticks merge_and_measure(Intervals& v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  Intervals merged;
  merged.reserve(v.size());
  Ticks total = 0;
  Ticks cur_lo = v[0].first, cur_hi = v[0].second;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].first > cur_hi) {
      merged.emplace_back(cur_lo, cur_hi);
      total += cur_hi - cur_lo;
      cur_lo = v[i].first;
      cur_hi = v[i].second;
    } else {
      cur_hi = std::max(cur_hi, v[i].second);
    }
  }
  merged.emplace_back(cur_lo, cur_hi);
  total += cur_hi - cur_lo;
  v.swap(merged);
  return total;
}

Ticks intersect_measure(const Intervals& a, const Intervals& b) {
  Ticks total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const Ticks lo = std::max(a[i].first, b[j].first);
    const Ticks hi = std::min(a[i].second, b[j].second);
    if (hi > lo) total += hi - lo;
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
  return total;
}

struct Maybe {
  double value = 0.0;
  bool defined = false;
};

Maybe ratio(std::size_t num, std::size_t den) {
  Maybe m;
  if (den > 0) {
    m.value = static_cast<double>(num) / static_cast<double>(den);
    m.defined = true;
  }
  return m;
}

Maybe fscore_of(const Maybe& p, const Maybe& r) {
  Maybe f;
  if (!p.defined && !r.defined) return f;
  const double pv = p.defined ? p.value : 0.0;
  const double rv = r.defined ? r.value : 0.0;
  f.defined = true;
  f.value = (pv + rv) > 0.0 ? 2.0 * pv * rv / (pv + rv) : 0.0;
  return f;
}

struct ChunkScores {
  Maybe ned, coverage;
  Maybe grouping_p, grouping_r, grouping_f;
  Maybe type_p, type_r, type_f;
  Maybe token_p, token_r, token_f;
  Maybe boundary_p, boundary_r, boundary_f;
};

// One chunk = a set of utterances plus the classes clipped to them. Every
// score is computed from this view alone.
ChunkScores eval_chunk(const GoldAlignment& g, const std::vector<FragRec>& recs,
                       std::span<const int> utt_indices,
                       std::span<const std::vector<std::uint32_t>> class_frags,
                       EventLog* log) {
  ChunkScores out;
  const auto utterances = g.utterances();

  // deduplicated fragment ids present in this chunk
  std::vector<std::uint32_t> frag_ids;
  {
    std::unordered_set<std::uint32_t> seen;
    for (const auto& ids : class_frags)
      for (std::uint32_t id : ids)
        if (seen.insert(id).second) frag_ids.push_back(id);
    std::sort(frag_ids.begin(), frag_ids.end());
  }

  // ---- matching: NED over within-class pairs
  const auto clus_pairs = collect_clus_pairs(class_frags);
  {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [a, b] : clus_pairs) {
      const auto& ta = recs[a].transcription;
      const auto& tb = recs[b].transcription;
      const std::size_t max_len = std::max(ta.size(), tb.size());
      if (max_len == 0) {
        if (log != nullptr)
          log->warn("tde.ned_pair_skipped",
                    "pair of fragments with empty transcriptions skipped in "
                    "NED");
        continue;
      }
      sum += static_cast<double>(levenshtein(ta, tb)) /
             static_cast<double>(max_len);
      ++n;
    }
    if (n > 0) {
      out.ned.value = sum / static_cast<double>(n);
      out.ned.defined = true;
    }
  }

  // ---- matching: coverage against the chunk's discoverable region
  {
    const auto ngrams = ngram_occurrences(g, utt_indices, kNgramMin, kNgramMax);
    std::unordered_map<int, Intervals> discoverable, discovered;
    for (const auto& [type, occs] : ngrams)
      for (const auto& occ : occs)
        discoverable[g.index_of(occ.utterance)].emplace_back(
            to_ticks(occ.onset), to_ticks(occ.offset));
    for (std::uint32_t id : frag_ids)
      discovered[recs[id].utt].emplace_back(recs[id].on, recs[id].off);
    Ticks disc_total = 0, inter_total = 0;
    for (int ui : utt_indices) {
      auto it = discoverable.find(ui);
      if (it == discoverable.end()) continue;
      disc_total += merge_and_measure(it->second);
      auto jt = discovered.find(ui);
      if (jt == discovered.end()) continue;
      merge_and_measure(jt->second);
      inter_total += intersect_measure(it->second, jt->second);
    }
    if (disc_total > 0) {
      out.coverage.value =
          static_cast<double>(inter_total) / static_cast<double>(disc_total);
      out.coverage.defined = true;
    }
  }

  // ---- grouping: weighted purity collapses to pair precision/recall
  // because gold pairs are transcription-pure
  {
    const auto goldclus = collect_goldclus_pairs(recs, frag_ids);
    std::unordered_set<std::uint64_t> gold_set;
    gold_set.reserve(goldclus.size() * 2);
    for (const auto& [a, b] : goldclus) gold_set.insert(pair_key(a, b));
    std::size_t inter = 0;
    for (const auto& [a, b] : clus_pairs)
      if (gold_set.count(pair_key(a, b))) ++inter;
    out.grouping_p = ratio(inter, clus_pairs.size());
    out.grouping_r = ratio(inter, goldclus.size());
    out.grouping_f = fscore_of(out.grouping_p, out.grouping_r);
  }

  auto restricted = [](const std::vector<std::string>& t) {
    return static_cast<int>(t.size()) >= kTypeMin &&
           static_cast<int>(t.size()) <= kTypeMax;
  };

  // gold word transcriptions per chunk utterance (by phone span)
  auto word_transcription = [&](const Utterance& u, int w) {
    const auto [lo, hi] = u.word_phone_spans[w];
    std::vector<std::string> t;
    t.reserve(hi - lo + 1);
    for (int i = lo; i <= hi; ++i) t.push_back(u.phones[i].phone);
    return t;
  };

  // ---- type scores
  {
    std::set<std::vector<std::string>> discovered_types, gold_types;
    for (std::uint32_t id : frag_ids)
      if (restricted(recs[id].transcription))
        discovered_types.insert(recs[id].transcription);
    for (int ui : utt_indices) {
      const Utterance& u = utterances[ui];
      for (int w = 0; w < static_cast<int>(u.words.size()); ++w) {
        auto t = word_transcription(u, w);
        if (restricted(t)) gold_types.insert(std::move(t));
      }
    }
    std::size_t inter = 0;
    for (const auto& t : discovered_types)
      if (gold_types.count(t)) ++inter;
    out.type_p = ratio(inter, discovered_types.size());
    out.type_r = ratio(inter, gold_types.size());
    out.type_f = fscore_of(out.type_p, out.type_r);
  }

  // ---- token scores: snapped span must coincide with a gold word span
  {
    std::unordered_map<std::uint64_t, int> word_by_span;
    // disjoint bit fields: utterance index | first phone | last phone
    auto span_key = [](int utt, int first, int last) {
      return (static_cast<std::uint64_t>(utt) << 40) |
             (static_cast<std::uint64_t>(first) << 20) |
             static_cast<std::uint64_t>(last);
    };
    std::size_t gold_tokens = 0;
    for (int ui : utt_indices) {
      const Utterance& u = utterances[ui];
      for (int w = 0; w < static_cast<int>(u.words.size()); ++w) {
        const auto [lo, hi] = u.word_phone_spans[w];
        const int len = hi - lo + 1;
        if (len < kTypeMin || len > kTypeMax) continue;
        word_by_span.emplace(span_key(ui, lo, hi), w);
        ++gold_tokens;
      }
    }
    std::size_t discovered_tokens = 0, hits = 0;
    std::set<std::pair<int, int>> matched_gold;  // (utt, word index)
    for (std::uint32_t id : frag_ids) {
      const FragRec& r = recs[id];
      if (!restricted(r.transcription)) continue;
      ++discovered_tokens;
      if (r.span_first < 0) continue;
      auto it = word_by_span.find(span_key(r.utt, r.span_first, r.span_last));
      if (it != word_by_span.end()) {
        ++hits;
        matched_gold.emplace(r.utt, it->second);
      }
    }
    out.token_p = ratio(hits, discovered_tokens);
    out.token_r = ratio(matched_gold.size(), gold_tokens);
    out.token_f = fscore_of(out.token_p, out.token_r);
  }

  // ---- boundary scores on phone-boundary indices
  {
    auto bkey = [](int utt, int boundary) {
      return (static_cast<std::uint64_t>(utt) << 32) |
             static_cast<std::uint32_t>(boundary);
    };
    std::unordered_set<std::uint64_t> gold, discovered;
    for (int ui : utt_indices) {
      const Utterance& u = utterances[ui];
      gold.insert(bkey(ui, 0));
      gold.insert(bkey(ui, static_cast<int>(u.phones.size())));
      for (const auto& [lo, hi] : u.word_phone_spans) {
        gold.insert(bkey(ui, lo));
        gold.insert(bkey(ui, hi + 1));
      }
    }
    for (std::uint32_t id : frag_ids) {
      const FragRec& r = recs[id];
      if (r.span_first < 0) continue;
      discovered.insert(bkey(r.utt, r.span_first));
      discovered.insert(bkey(r.utt, r.span_last + 1));
    }
    std::size_t inter = 0;
    for (std::uint64_t b : discovered)
      if (gold.count(b)) ++inter;
    out.boundary_p = ratio(inter, discovered.size());
    out.boundary_r = ratio(inter, gold.size());
    out.boundary_f = fscore_of(out.boundary_p, out.boundary_r);
  }

  return out;
}

// Unweighted mean over the chunks where a score is defined; falls back to
// the division-by-zero policy (and logs) when no chunk defines it.
class ChunkMean {
 public:
  void add(const Maybe& m) {
    if (m.defined) {
      sum_ += m.value;
      ++n_;
    }
  }
  double finish(double policy, const std::string& key,
                const std::string& message, EventLog* log) const {
    if (n_ > 0) return sum_ / static_cast<double>(n_);
    if (log != nullptr) log->warn(key, message);
    return policy;
  }

 private:
  double sum_ = 0.0;
  std::size_t n_ = 0;
};

std::vector<std::vector<std::uint32_t>> clip_classes(
    const FragTable& table, const std::unordered_set<int>& utt_set) {
  std::vector<std::vector<std::uint32_t>> clipped;
  clipped.reserve(table.class_frags.size());
  for (const auto& ids : table.class_frags) {
    std::vector<std::uint32_t> kept;
    for (std::uint32_t id : ids)
      if (utt_set.count(table.recs[id].utt)) kept.push_back(id);
    if (!kept.empty()) clipped.push_back(std::move(kept));
  }
  return clipped;
}

std::vector<int> all_utterance_indices(const GoldAlignment& g) {
  std::vector<int> all(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

}  // namespace

PairSets build_pair_sets(std::span<const ClassGroup> classes,
                         const GoldAlignment& g) {
  const FragTable table = build_frag_table(classes, g);
  PairSets sets;
  sets.fragments.reserve(table.recs.size());
  sets.transcriptions.reserve(table.recs.size());
  for (const auto& rec : table.recs) {
    sets.fragments.push_back(Fragment{g.utterances()[rec.utt].id,
                                      from_ticks(rec.on), from_ticks(rec.off)});
    sets.transcriptions.push_back(rec.transcription);
  }
  sets.clus_pairs = collect_clus_pairs(table.class_frags);
  std::vector<std::uint32_t> all_ids(table.recs.size());
  for (std::uint32_t i = 0; i < table.recs.size(); ++i) all_ids[i] = i;
  sets.goldclus_pairs = collect_goldclus_pairs(table.recs, all_ids);
  return sets;
}

PRF grouping_scores(const PairSets& sets, EventLog* log) {
  std::unordered_set<std::uint64_t> gold_set;
  for (const auto& [a, b] : sets.goldclus_pairs)
    gold_set.insert(pair_key(a, b));
  std::size_t inter = 0;
  for (const auto& [a, b] : sets.clus_pairs)
    if (gold_set.count(pair_key(a, b))) ++inter;
  const Maybe p = ratio(inter, sets.clus_pairs.size());
  const Maybe r = ratio(inter, sets.goldclus_pairs.size());
  const Maybe f = fscore_of(p, r);
  PRF out;
  out.precision = p.defined ? p.value : 0.0;
  out.recall = r.defined ? r.value : 0.0;
  out.fscore = f.defined ? f.value : 0.0;
  if (log != nullptr) {
    if (!p.defined)
      log->warn("tde.grouping_precision_undefined",
                "no within-class pairs; grouping precision reported as 0");
    if (!r.defined)
      log->warn("tde.grouping_recall_undefined",
                "no same-transcription pairs; grouping recall reported as 0");
  }
  return out;
}

namespace {

TdeResult merge_chunks(std::span<const ChunkScores> chunks,
                       std::size_t words_found, std::size_t pairs,
                       EventLog* log) {
  ChunkMean ned, cov, gp, gr, gf, typ, tyr, tyf, top, tor, tof, bp, br, bf;
  for (const auto& c : chunks) {
    ned.add(c.ned);
    cov.add(c.coverage);
    gp.add(c.grouping_p);
    gr.add(c.grouping_r);
    gf.add(c.grouping_f);
    typ.add(c.type_p);
    tyr.add(c.type_r);
    tyf.add(c.type_f);
    top.add(c.token_p);
    tor.add(c.token_r);
    tof.add(c.token_f);
    bp.add(c.boundary_p);
    br.add(c.boundary_r);
    bf.add(c.boundary_f);
  }
  TdeResult r;
  r.ned = ned.finish(1.0, "tde.ned_undefined",
                     "no within-class pairs; NED reported as 1", log);
  r.coverage_raw =
      cov.finish(0.0, "tde.coverage_undefined",
                 "empty discoverable region; coverage reported as 0", log);
  r.coverage = std::min(1.0, r.coverage_raw);
  const char* dz = "empty denominator; reported as 0";
  r.grouping.precision = gp.finish(0.0, "tde.grouping_precision_undefined", dz, log);
  r.grouping.recall = gr.finish(0.0, "tde.grouping_recall_undefined", dz, log);
  r.grouping.fscore = gf.finish(0.0, "tde.grouping_fscore_undefined", dz, log);
  r.type.precision = typ.finish(0.0, "tde.type_precision_undefined", dz, log);
  r.type.recall = tyr.finish(0.0, "tde.type_recall_undefined", dz, log);
  r.type.fscore = tyf.finish(0.0, "tde.type_fscore_undefined", dz, log);
  r.token.precision = top.finish(0.0, "tde.token_precision_undefined", dz, log);
  r.token.recall = tor.finish(0.0, "tde.token_recall_undefined", dz, log);
  r.token.fscore = tof.finish(0.0, "tde.token_fscore_undefined", dz, log);
  r.boundary.precision = bp.finish(0.0, "tde.boundary_precision_undefined", dz, log);
  r.boundary.recall = br.finish(0.0, "tde.boundary_recall_undefined", dz, log);
  r.boundary.fscore = bf.finish(0.0, "tde.boundary_fscore_undefined", dz, log);
  r.words_found = words_found;
  r.pairs = pairs;
  return r;
}

std::pair<std::size_t, std::size_t> global_counts(const FragTable& table) {
  std::set<std::vector<std::string>> types;
  for (const auto& rec : table.recs)
    if (!rec.transcription.empty()) types.insert(rec.transcription);
  return {types.size(), collect_clus_pairs(table.class_frags).size()};
}

}  // namespace

MatchingScores eval_matching(std::span<const ClassGroup> classes,
                             const GoldAlignment& g, EventLog* log) {
  const FragTable table = build_frag_table(classes, g);
  const auto all = all_utterance_indices(g);
  const ChunkScores c =
      eval_chunk(g, table.recs, all, table.class_frags, log);
  MatchingScores m;
  ChunkMean ned, cov;
  ned.add(c.ned);
  cov.add(c.coverage);
  m.ned = ned.finish(1.0, "tde.ned_undefined",
                     "no within-class pairs; NED reported as 1", log);
  m.coverage_raw =
      cov.finish(0.0, "tde.coverage_undefined",
                 "empty discoverable region; coverage reported as 0", log);
  m.coverage = std::min(1.0, m.coverage_raw);
  return m;
}

PRF type_scores(std::span<const ClassGroup> classes, const GoldAlignment& g,
                EventLog* log) {
  const FragTable table = build_frag_table(classes, g);
  const auto all = all_utterance_indices(g);
  const ChunkScores c = eval_chunk(g, table.recs, all, table.class_frags, log);
  PRF out;
  out.precision = c.type_p.defined ? c.type_p.value : 0.0;
  out.recall = c.type_r.defined ? c.type_r.value : 0.0;
  out.fscore = c.type_f.defined ? c.type_f.value : 0.0;
  if (log != nullptr && !c.type_p.defined)
    log->warn("tde.type_precision_undefined",
              "no restricted discovered types; type precision reported as 0");
  return out;
}

PRF token_scores(std::span<const ClassGroup> classes, const GoldAlignment& g,
                 EventLog* log) {
  const FragTable table = build_frag_table(classes, g);
  const auto all = all_utterance_indices(g);
  const ChunkScores c = eval_chunk(g, table.recs, all, table.class_frags, log);
  PRF out;
  out.precision = c.token_p.defined ? c.token_p.value : 0.0;
  out.recall = c.token_r.defined ? c.token_r.value : 0.0;
  out.fscore = c.token_f.defined ? c.token_f.value : 0.0;
  return out;
}

PRF boundary_scores(std::span<const ClassGroup> classes,
                    const GoldAlignment& g, EventLog* log) {
  const FragTable table = build_frag_table(classes, g);
  const auto all = all_utterance_indices(g);
  const ChunkScores c = eval_chunk(g, table.recs, all, table.class_frags, log);
  PRF out;
  out.precision = c.boundary_p.defined ? c.boundary_p.value : 0.0;
  out.recall = c.boundary_r.defined ? c.boundary_r.value : 0.0;
  out.fscore = c.boundary_f.defined ? c.boundary_f.value : 0.0;
  if (log != nullptr && !c.boundary_p.defined)
    log->warn("tde.boundary_precision_undefined",
              "no discovered boundaries; boundary precision reported as 0");
  return out;
}

TdeResult eval_chunked(std::span<const ClassGroup> classes,
                       const GoldAlignment& g, const TdeOptions& options,
                       EventLog& log) {
  const FragTable table = build_frag_table(classes, g);
  const auto [words_found, pairs] = global_counts(table);

  const std::size_t n = g.size();
  const std::size_t chunk_size =
      options.chunk_size == 0 ? std::max<std::size_t>(n, 1) : options.chunk_size;
  const std::size_t n_chunks = n == 0 ? 0 : (n + chunk_size - 1) / chunk_size;

  std::vector<std::vector<int>> chunk_utts(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t lo = c * chunk_size;
    const std::size_t hi = std::min(n, lo + chunk_size);
    chunk_utts[c].reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i)
      chunk_utts[c].push_back(static_cast<int>(i));
  }

  std::vector<ChunkScores> results(n_chunks);
  parallel_for(n_chunks, options.workers, [&](std::size_t c) {
    std::unordered_set<int> utt_set(chunk_utts[c].begin(),
                                    chunk_utts[c].end());
    const auto clipped = clip_classes(table, utt_set);
    results[c] = eval_chunk(g, table.recs, chunk_utts[c], clipped, &log);
  });

  return merge_chunks(results, words_found, pairs, &log);
}

}  // namespace zreval
