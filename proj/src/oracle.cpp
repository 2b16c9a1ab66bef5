// oracle.cpp
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

#include "zreval/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <tuple>

#include "zreval/error.hpp"

namespace zreval::oracle {

namespace {

// ---------------------------------------------------------------------
// re-derived numeric kernels
// ---------------------------------------------------------------------

double ref_cosine(const FrameVector& u, const FrameVector& v) {
  if (u.size() == v.size() &&
      std::memcmp(u.data(), v.data(), u.size() * sizeof(double)) == 0)
    return 0.0;
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 1.0;
  double d = 1.0 - dot / std::sqrt(nu * nv);
  if (d < 0.0) d = 0.0;
  if (d > 2.0) d = 2.0;
  return d;
}

std::vector<double> ref_floor_renorm(const FrameVector& p) {
  std::vector<double> out(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] < 1e-10 ? 1e-10 : p[i];
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

double ref_kl(const FrameVector& pin, const FrameVector& qin) {
  const auto p = ref_floor_renorm(pin);
  const auto q = ref_floor_renorm(qin);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    a += p[i] * std::log(p[i] / q[i]);
    b += q[i] * std::log(q[i] / p[i]);
  }
  return 0.5 * (a + b);
}

// min over monotone anchored paths of (summed cost / cell count), by
// memoized recursion over (i, j, length)
class RefDtw {
 public:
  RefDtw(std::span<const FrameVector> x, std::span<const FrameVector> y,
         FrameMetric metric)
      : m_(x.size()), n_(y.size()) {
    cost_.resize(m_ * n_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        cost_[i * n_ + j] = metric == FrameMetric::cosine
                                ? ref_cosine(x[i], y[j])
                                : ref_kl(x[i], y[j]);
    const std::size_t max_len = m_ + n_ - 1;
    memo_.assign(m_ * n_ * max_len,
                 std::numeric_limits<double>::quiet_NaN());
  }

  double value() {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t len = std::max(m_, n_); len <= m_ + n_ - 1; ++len) {
      const double s = sum_for(m_ - 1, n_ - 1, len);
      if (std::isfinite(s))
        best = std::min(best, s / static_cast<double>(len));
    }
    return best;
  }

 private:
  double sum_for(std::size_t i, std::size_t j, std::size_t len) {
    const double inf = std::numeric_limits<double>::infinity();
    if (len < 1 || len > i + j + 1 || len < std::max(i, j) + 1) return inf;
    double& slot = memo_[(i * n_ + j) * (m_ + n_ - 1) + (len - 1)];
    if (!std::isnan(slot)) return slot;
    if (len == 1) {
      slot = (i == 0 && j == 0) ? cost_[0] : inf;
      return slot;
    }
    double from = inf;
    if (i > 0) from = std::min(from, sum_for(i - 1, j, len - 1));
    if (j > 0) from = std::min(from, sum_for(i, j - 1, len - 1));
    if (i > 0 && j > 0) from = std::min(from, sum_for(i - 1, j - 1, len - 1));
    slot = std::isfinite(from) ? cost_[i * n_ + j] + from : inf;
    return slot;
  }

  std::size_t m_, n_;
  std::vector<double> cost_;
  std::vector<double> memo_;
};

double ref_dtw(std::span<const FrameVector> x, std::span<const FrameVector> y,
               FrameMetric metric) {
  return RefDtw(x, y, metric).value();
}

std::size_t ref_lev_impl(const std::vector<std::string>& a,
                         const std::vector<std::string>& b, std::size_t i,
                         std::size_t j,
                         std::vector<std::size_t>& memo, std::size_t stride) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::size_t& slot = memo[i * stride + j];
  if (slot != static_cast<std::size_t>(-1)) return slot;
  const std::size_t keep =
      ref_lev_impl(a, b, i + 1, j + 1, memo, stride) + (a[i] == b[j] ? 0 : 1);
  const std::size_t del = ref_lev_impl(a, b, i + 1, j, memo, stride) + 1;
  const std::size_t ins = ref_lev_impl(a, b, i, j + 1, memo, stride) + 1;
  slot = std::min({keep, del, ins});
  return slot;
}

std::size_t ref_lev(const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  std::vector<std::size_t> memo((a.size() + 1) * (b.size() + 1),
                                static_cast<std::size_t>(-1));
  return ref_lev_impl(a, b, 0, 0, memo, b.size() + 1);
}

// ---------------------------------------------------------------------
// re-derived edge-inclusion rule and transcriptions
// ---------------------------------------------------------------------

bool ref_edge_included(Ticks seg_start, Ticks seg_end, Ticks on, Ticks off) {
  const Ticks lo = seg_start > on ? seg_start : on;
  const Ticks hi = seg_end < off ? seg_end : off;
  const Ticks overlap = hi - lo;
  if (seg_start >= on && seg_end <= off) return true;
  if (overlap > 300) return true;                // more than 30 ms
  return overlap * 2 > seg_end - seg_start;      // more than half the segment
}

// indices of phones included by the rule, silences kept for now
std::vector<int> ref_included_phones(const Utterance& u, Ticks on, Ticks off) {
  std::vector<int> overlapped;
  for (int i = 0; i < static_cast<int>(u.phones.size()); ++i) {
    const Ticks s = to_ticks(u.phones[i].start);
    const Ticks e = to_ticks(u.phones[i].end);
    const Ticks lo = s > on ? s : on;
    const Ticks hi = e < off ? e : off;
    if (hi - lo > 0) overlapped.push_back(i);
  }
  std::vector<int> included;
  for (std::size_t k = 0; k < overlapped.size(); ++k) {
    const int i = overlapped[k];
    const bool is_edge = k == 0 || k + 1 == overlapped.size();
    if (!is_edge) {
      included.push_back(i);
      continue;
    }
    if (ref_edge_included(to_ticks(u.phones[i].start),
                          to_ticks(u.phones[i].end), on, off))
      included.push_back(i);
  }
  return included;
}

std::vector<std::string> ref_transcription(const GoldAlignment& g,
                                           const Utterance& u, Ticks on,
                                           Ticks off) {
  std::vector<std::string> out;
  for (int i : ref_included_phones(u, on, off))
    if (!g.is_silence(u.phones[i].phone)) out.push_back(u.phones[i].phone);
  return out;
}

std::pair<int, int> ref_span(const GoldAlignment& g, const Utterance& u,
                             Ticks on, Ticks off) {
  int first = -1, last = -2;
  for (int i : ref_included_phones(u, on, off)) {
    if (g.is_silence(u.phones[i].phone)) continue;
    if (first < 0) first = i;
    last = i;
  }
  return {first, last};
}

void guard_size(const GoldAlignment& g) {
  if (g.size() > kMaxOracleUtterances)
    fail_invalid("oracle: corpus has " + std::to_string(g.size()) +
                 " utterances, above the guard of " +
                 std::to_string(kMaxOracleUtterances) +
                 " (oracles are deliberately naive)");
}

// ---------------------------------------------------------------------
// ABX
// ---------------------------------------------------------------------

struct RefItem {
  std::string left, center, right, speaker, utt;
  Ticks on, off;
};

std::vector<FrameVector> ref_item_frames(const RefItem& item,
                                         const FeatureStore& features) {
  const FeatureSequence& seq = features.at(item.utt);
  std::vector<FrameVector> frames;
  for (std::size_t i = 0; i < seq.times.size(); ++i) {
    const Ticks t = to_ticks(seq.times[i]);
    if (t >= item.on && t < item.off) frames.push_back(seq.frames[i]);
  }
  if (!frames.empty()) return frames;
  if (item.off <= to_ticks(seq.times.front()) ||
      item.on > to_ticks(seq.times.back()))
    fail_validation("oracle: fragment outside the feature time range");
  const double mid = 0.5 * (from_ticks(item.on) + from_ticks(item.off));
  std::size_t best = 0;
  for (std::size_t i = 1; i < seq.times.size(); ++i)
    if (std::abs(seq.times[i] - mid) < std::abs(seq.times[best] - mid))
      best = i;
  frames.push_back(seq.frames[best]);
  return frames;
}

double ref_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct RefModeResult {
  bool present = false;
  double error = 0.0;
  std::map<std::pair<std::string, std::string>, double> pair_errors;
  std::size_t cells = 0;
  std::size_t triplets = 0;
};

RefModeResult ref_abx_mode(const std::vector<RefItem>& items,
                           const FeatureStore& features, FrameMetric metric,
                           bool across, std::size_t triplet_guard) {
  // directional cell scores keyed by (pair, context, speaker config)
  using Pair = std::pair<std::string, std::string>;
  using Context = std::pair<std::string, std::string>;
  using SpeakerCfg = std::pair<std::string, std::string>;
  std::map<Pair, std::map<Context, std::map<SpeakerCfg, std::vector<double>>>>
      tree;

  // bucket items by (speaker, context, center)
  std::map<std::tuple<std::string, std::string, std::string, std::string>,
           std::vector<int>>
      buckets;
  std::set<std::string> speakers;
  std::set<Context> contexts;
  std::set<std::string> centers;
  for (int i = 0; i < static_cast<int>(items.size()); ++i) {
    const auto& it = items[i];
    buckets[{it.speaker, it.left, it.right, it.center}].push_back(i);
    speakers.insert(it.speaker);
    contexts.insert({it.left, it.right});
    centers.insert(it.center);
  }
  auto tokens = [&](const std::string& spk, const Context& ctx,
                    const std::string& center) -> const std::vector<int>* {
    auto it = buckets.find({spk, ctx.first, ctx.second, center});
    return it == buckets.end() ? nullptr : &it->second;
  };

  RefModeResult out;
  for (const auto& ctx : contexts) {
    for (const auto& sa : speakers) {
      for (const auto& sx : speakers) {
        if (across ? sa == sx : sa != sx) continue;
        for (const auto& cx : centers) {
          const auto* a_tokens = tokens(sa, ctx, cx);
          const auto* x_tokens = tokens(sx, ctx, cx);
          if (a_tokens == nullptr || x_tokens == nullptr) continue;
          for (const auto& cy : centers) {
            if (cx == cy) continue;
            const auto* b_tokens = tokens(sa, ctx, cy);
            if (b_tokens == nullptr) continue;
            if (!across && a_tokens->size() < 2) continue;

            // exhaustive triplets, A != X as tokens
            double correct = 0.0;
            std::size_t count = 0;
            for (int a : *a_tokens)
              for (int x : *x_tokens)
                if (a != x) count += b_tokens->size();
            if (count == 0) continue;
            if (count > triplet_guard)
              fail_invalid(
                  "oracle: cell exceeds the exhaustive triplet guard");
            for (int a : *a_tokens) {
              const auto fa = ref_item_frames(items[a], features);
              for (int x : *x_tokens) {
                if (a == x) continue;
                const auto fx = ref_item_frames(items[x], features);
                const double dax = ref_dtw(fa, fx, metric);
                for (int b : *b_tokens) {
                  const auto fb = ref_item_frames(items[b], features);
                  const double dbx = ref_dtw(fb, fx, metric);
                  if (dax < dbx)
                    correct += 1.0;
                  else if (dax == dbx)
                    correct += 0.5;
                }
              }
            }
            const double score = correct / static_cast<double>(count);
            const Pair pk = cx <= cy ? Pair{cx, cy} : Pair{cy, cx};
            tree[pk][ctx][{sa, sx}].push_back(score);
            ++out.cells;
            out.triplets += count;
          }
        }
      }
    }
  }
  if (tree.empty()) return out;

  std::vector<double> pair_scores;
  for (const auto& [pk, ctx_map] : tree) {
    std::vector<double> context_scores;
    for (const auto& [ck, cfg_map] : ctx_map) {
      std::vector<double> cfg_scores;
      for (const auto& [sk, dirs] : cfg_map) cfg_scores.push_back(ref_mean(dirs));
      context_scores.push_back(ref_mean(cfg_scores));
    }
    const double s = ref_mean(context_scores);
    out.pair_errors[pk] = 1.0 - s;
    pair_scores.push_back(s);
  }
  out.error = 1.0 - ref_mean(pair_scores);
  out.present = true;
  return out;
}

}  // namespace

AbxResult oracle_abx(const GoldAlignment& g, const FeatureStore& features,
                     const std::set<std::string>* utterances,
                     FrameMetric metric, double min_duration,
                     std::size_t triplet_guard) {
  guard_size(g);
  std::vector<RefItem> items;
  const Ticks min_ticks = to_ticks(min_duration);
  for (const auto& u : g.utterances()) {
    if (utterances != nullptr && utterances->find(u.id) == utterances->end())
      continue;
    for (std::size_t i = 0; i + 2 < u.phones.size(); ++i) {
      const auto& p0 = u.phones[i];
      const auto& p1 = u.phones[i + 1];
      const auto& p2 = u.phones[i + 2];
      if (g.is_silence(p0.phone) || g.is_silence(p1.phone) ||
          g.is_silence(p2.phone))
        continue;
      if (to_ticks(p0.end) != to_ticks(p1.start) ||
          to_ticks(p1.end) != to_ticks(p2.start))
        continue;
      if (to_ticks(p1.end) - to_ticks(p1.start) < min_ticks) continue;
      items.push_back(RefItem{p0.phone, p1.phone, p2.phone, u.speaker, u.id,
                              to_ticks(p0.start), to_ticks(p2.end)});
    }
  }
  const RefModeResult within =
      ref_abx_mode(items, features, metric, false, triplet_guard);
  const RefModeResult across =
      ref_abx_mode(items, features, metric, true, triplet_guard);
  AbxResult r;
  r.has_within = within.present;
  r.within_error = within.error;
  r.within_pair_errors = within.pair_errors;
  r.has_across = across.present;
  r.across_error = across.error;
  r.across_pair_errors = across.pair_errors;
  r.cell_count = within.cells + across.cells;
  r.scored_triplets = within.triplets + across.triplets;
  return r;
}

// ---------------------------------------------------------------------
// TDE
// ---------------------------------------------------------------------

namespace {

struct RefFrag {
  int utt;
  Ticks on, off;
  std::vector<std::string> transcription;
  int span_first, span_last;
};

bool same_frag(const RefFrag& a, const RefFrag& b) {
  return a.utt == b.utt && a.on == b.on && a.off == b.off;
}

bool frag_less(const RefFrag& a, const RefFrag& b) {
  return std::tie(a.utt, a.on, a.off) < std::tie(b.utt, b.on, b.off);
}

}  // namespace

TdeResult oracle_tde(std::span<const ClassGroup> classes,
                     const GoldAlignment& g) {
  guard_size(g);
  const auto utterances = g.utterances();

  // resolve every fragment occurrence (duplicates kept here; deduplicated
  // where set semantics demand it)
  std::vector<std::vector<RefFrag>> by_class;
  for (const auto& cls : classes) {
    std::vector<RefFrag> frags;
    for (const auto& f : cls.fragments) {
      const Utterance& u = g.at(f.utterance);
      RefFrag r;
      r.utt = g.index_of(f.utterance);
      r.on = to_ticks(f.onset);
      r.off = to_ticks(f.offset);
      if (r.on >= r.off || r.on < 0 || r.off > to_ticks(u.duration))
        fail_validation("oracle: invalid fragment in class '" + cls.class_id +
                        "'");
      r.transcription = ref_transcription(g, u, r.on, r.off);
      const auto span = ref_span(g, u, r.on, r.off);
      r.span_first = span.first;
      r.span_last = span.second;
      frags.push_back(std::move(r));
    }
    by_class.push_back(std::move(frags));
  }

  // deduplicated fragment list
  std::vector<RefFrag> all;
  for (const auto& frags : by_class)
    for (const auto& f : frags) {
      bool seen = false;
      for (const auto& o : all)
        if (same_frag(o, f)) {
          seen = true;
          break;
        }
      if (!seen) all.push_back(f);
    }
  std::sort(all.begin(), all.end(), frag_less);

  // p_clus: within-class pairs of distinct fragments, deduplicated
  std::vector<std::pair<RefFrag, RefFrag>> p_clus;
  for (const auto& frags : by_class) {
    for (std::size_t i = 0; i < frags.size(); ++i)
      for (std::size_t j = i + 1; j < frags.size(); ++j) {
        if (same_frag(frags[i], frags[j])) continue;
        RefFrag a = frags[i], b = frags[j];
        if (frag_less(b, a)) std::swap(a, b);
        bool dup = false;
        for (const auto& [pa, pb] : p_clus)
          if (same_frag(pa, a) && same_frag(pb, b)) {
            dup = true;
            break;
          }
        if (!dup) p_clus.emplace_back(a, b);
      }
  }

  // p_goldclus: same nonempty transcription, non-overlapping
  std::vector<std::pair<RefFrag, RefFrag>> p_gold;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const RefFrag& a = all[i];
      const RefFrag& b = all[j];
      if (a.transcription.empty() || a.transcription != b.transcription)
        continue;
      const bool overlap = a.utt == b.utt && a.on < b.off && b.on < a.off;
      if (!overlap) p_gold.emplace_back(a, b);
    }

  auto in_gold = [&](const RefFrag& a, const RefFrag& b) {
    for (const auto& [ga, gb] : p_gold)
      if ((same_frag(ga, a) && same_frag(gb, b)) ||
          (same_frag(ga, b) && same_frag(gb, a)))
        return true;
    return false;
  };

  TdeResult result;

  // NED
  {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [a, b] : p_clus) {
      const std::size_t max_len =
          std::max(a.transcription.size(), b.transcription.size());
      if (max_len == 0) continue;
      sum += static_cast<double>(ref_lev(a.transcription, b.transcription)) /
             static_cast<double>(max_len);
      ++n;
    }
    result.ned = n > 0 ? sum / static_cast<double>(n) : 1.0;
  }

  // coverage via tick bitmaps; an n-gram instance is discoverable iff its
  // key occurs at least twice (sort keys, look for an equal neighbour)
  {
    struct Instance {
      std::string key;
      int utt;
      Ticks on, off;
    };
    std::vector<Instance> instances;
    for (int ui = 0; ui < static_cast<int>(utterances.size()); ++ui) {
      const Utterance& u = utterances[ui];
      // runs of non-silence contiguous phones
      std::vector<std::vector<int>> runs;
      std::vector<int> run;
      Ticks prev_end = -1;
      for (int i = 0; i < static_cast<int>(u.phones.size()); ++i) {
        const bool silent = g.is_silence(u.phones[i].phone);
        const bool gap = !run.empty() && to_ticks(u.phones[i].start) != prev_end;
        if (silent || gap) {
          if (!run.empty()) runs.push_back(run);
          run.clear();
          if (!silent) run.push_back(i);
        } else {
          run.push_back(i);
        }
        prev_end = to_ticks(u.phones[i].end);
      }
      if (!run.empty()) runs.push_back(run);
      for (const auto& rn : runs) {
        for (int n = 3; n <= 20 && n <= static_cast<int>(rn.size()); ++n) {
          for (std::size_t s = 0; s + n <= rn.size(); ++s) {
            std::string key;
            for (int k = 0; k < n; ++k) {
              key += u.phones[rn[s + k]].phone;
              key += '\x1f';
            }
            instances.push_back(Instance{std::move(key), ui,
                                         to_ticks(u.phones[rn[s]].start),
                                         to_ticks(u.phones[rn[s + n - 1]].end)});
          }
        }
      }
    }
    std::vector<std::size_t> order(instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return instances[a].key < instances[b].key;
    });
    std::vector<bool> recurring(instances.size(), false);
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      if (instances[order[i]].key == instances[order[i + 1]].key) {
        recurring[order[i]] = true;
        recurring[order[i + 1]] = true;
      }

    Ticks disc_total = 0, inter_total = 0;
    for (int ui = 0; ui < static_cast<int>(utterances.size()); ++ui) {
      const Ticks dur = to_ticks(utterances[ui].duration);
      std::vector<char> discoverable(dur, 0), covered(dur, 0);
      for (std::size_t i = 0; i < instances.size(); ++i)
        if (recurring[i] && instances[i].utt == ui)
          for (Ticks t = instances[i].on; t < instances[i].off; ++t)
            discoverable[t] = 1;
      for (const auto& f : all)
        if (f.utt == ui)
          for (Ticks t = f.on; t < f.off; ++t) covered[t] = 1;
      for (Ticks t = 0; t < dur; ++t) {
        if (discoverable[t]) {
          ++disc_total;
          if (covered[t]) ++inter_total;
        }
      }
    }
    result.coverage_raw =
        disc_total > 0
            ? static_cast<double>(inter_total) / static_cast<double>(disc_total)
            : 0.0;
    result.coverage = std::min(1.0, result.coverage_raw);
  }

  // grouping: the literal weighted form, floating arithmetic over types
  {
    auto in_clus = [&](const RefFrag& a, const RefFrag& b) {
      for (const auto& [ca, cb] : p_clus)
        if ((same_frag(ca, a) && same_frag(cb, b)) ||
            (same_frag(ca, b) && same_frag(cb, a)))
          return true;
      return false;
    };
    // sum over types t of w(t, base) * occ(t, base ∩ other) / occ(t, base),
    // where occ counts the pairs containing a fragment of type t and
    // w(t, base) = occ(t, base) / |base|
    auto weighted = [&](const std::vector<std::pair<RefFrag, RefFrag>>& base,
                        bool base_is_gold) {
      std::vector<std::vector<std::string>> types;
      for (const auto& [a, b] : base)
        for (const auto* t : {&a.transcription, &b.transcription})
          if (std::find(types.begin(), types.end(), *t) == types.end())
            types.push_back(*t);
      double total = 0.0;
      for (const auto& t : types) {
        std::size_t occ_base = 0, occ_inter = 0;
        for (const auto& [a, b] : base) {
          if (!(a.transcription == t || b.transcription == t)) continue;
          ++occ_base;
          const bool in_both = base_is_gold ? in_clus(a, b) : in_gold(a, b);
          if (in_both) ++occ_inter;
        }
        if (occ_base == 0) continue;
        const double w =
            static_cast<double>(occ_base) / static_cast<double>(base.size());
        total += w * (static_cast<double>(occ_inter) /
                      static_cast<double>(occ_base));
      }
      return total;
    };
    const bool p_def = !p_clus.empty();
    const bool r_def = !p_gold.empty();
    result.grouping.precision = p_def ? weighted(p_clus, /*base_is_gold=*/false) : 0.0;
    result.grouping.recall = r_def ? weighted(p_gold, /*base_is_gold=*/true) : 0.0;
    const double pv = result.grouping.precision, rv = result.grouping.recall;
    result.grouping.fscore =
        (p_def || r_def) && (pv + rv) > 0 ? 2 * pv * rv / (pv + rv) : 0.0;
  }

  // gold word transcriptions re-derived from time containment
  auto gold_word_transcription = [&](const Utterance& u, const WordSegment& w) {
    std::vector<std::string> t;
    for (const auto& p : u.phones)
      if (to_ticks(p.start) >= to_ticks(w.start) &&
          to_ticks(p.end) <= to_ticks(w.end) && !g.is_silence(p.phone))
        t.push_back(p.phone);
    return t;
  };
  auto gold_word_span = [&](const Utterance& u, const WordSegment& w) {
    int first = -1, last = -2;
    for (int i = 0; i < static_cast<int>(u.phones.size()); ++i) {
      const auto& p = u.phones[i];
      if (to_ticks(p.start) >= to_ticks(w.start) &&
          to_ticks(p.end) <= to_ticks(w.end) && !g.is_silence(p.phone)) {
        if (first < 0) first = i;
        last = i;
      }
    }
    return std::make_pair(first, last);
  };
  auto restricted = [](const std::vector<std::string>& t) {
    return t.size() >= 3 && t.size() <= 20;
  };

  // type scores
  {
    std::vector<std::vector<std::string>> disc_types, gold_types;
    for (const auto& f : all)
      if (restricted(f.transcription) &&
          std::find(disc_types.begin(), disc_types.end(), f.transcription) ==
              disc_types.end())
        disc_types.push_back(f.transcription);
    for (const auto& u : utterances)
      for (const auto& w : u.words) {
        auto t = gold_word_transcription(u, w);
        if (restricted(t) &&
            std::find(gold_types.begin(), gold_types.end(), t) ==
                gold_types.end())
          gold_types.push_back(std::move(t));
      }
    std::size_t inter = 0;
    for (const auto& t : disc_types)
      if (std::find(gold_types.begin(), gold_types.end(), t) !=
          gold_types.end())
        ++inter;
    const bool p_def = !disc_types.empty(), r_def = !gold_types.empty();
    result.type.precision =
        p_def ? static_cast<double>(inter) / disc_types.size() : 0.0;
    result.type.recall =
        r_def ? static_cast<double>(inter) / gold_types.size() : 0.0;
    const double pv = result.type.precision, rv = result.type.recall;
    result.type.fscore =
        (p_def || r_def) && (pv + rv) > 0 ? 2 * pv * rv / (pv + rv) : 0.0;
  }

  // token scores
  {
    std::size_t discovered = 0, hits = 0, gold_tokens = 0;
    std::vector<std::pair<int, int>> matched;
    for (const auto& f : all) {
      if (!restricted(f.transcription)) continue;
      ++discovered;
      if (f.span_first < 0) continue;
      const Utterance& u = utterances[f.utt];
      for (int w = 0; w < static_cast<int>(u.words.size()); ++w) {
        const auto span = gold_word_span(u, u.words[w]);
        if (span != std::make_pair(f.span_first, f.span_last)) continue;
        const auto t = gold_word_transcription(u, u.words[w]);
        if (!restricted(t)) continue;
        ++hits;
        if (std::find(matched.begin(), matched.end(),
                      std::make_pair(f.utt, w)) == matched.end())
          matched.emplace_back(f.utt, w);
        break;
      }
    }
    for (int ui = 0; ui < static_cast<int>(utterances.size()); ++ui)
      for (const auto& w : utterances[ui].words)
        if (restricted(gold_word_transcription(utterances[ui], w)))
          ++gold_tokens;
    const bool p_def = discovered > 0, r_def = gold_tokens > 0;
    result.token.precision =
        p_def ? static_cast<double>(hits) / discovered : 0.0;
    result.token.recall =
        r_def ? static_cast<double>(matched.size()) / gold_tokens : 0.0;
    const double pv = result.token.precision, rv = result.token.recall;
    result.token.fscore =
        (p_def || r_def) && (pv + rv) > 0 ? 2 * pv * rv / (pv + rv) : 0.0;
  }

  // boundary scores
  {
    std::vector<std::pair<int, int>> gold, disc;
    auto add = [](std::vector<std::pair<int, int>>& v, int utt, int b) {
      if (std::find(v.begin(), v.end(), std::make_pair(utt, b)) == v.end())
        v.emplace_back(utt, b);
    };
    for (int ui = 0; ui < static_cast<int>(utterances.size()); ++ui) {
      const Utterance& u = utterances[ui];
      add(gold, ui, 0);
      add(gold, ui, static_cast<int>(u.phones.size()));
      for (const auto& w : u.words) {
        const auto span = gold_word_span(u, w);
        if (span.first < 0) continue;
        add(gold, ui, span.first);
        add(gold, ui, span.second + 1);
      }
    }
    for (const auto& f : all) {
      if (f.span_first < 0) continue;
      add(disc, f.utt, f.span_first);
      add(disc, f.utt, f.span_last + 1);
    }
    std::size_t inter = 0;
    for (const auto& b : disc)
      if (std::find(gold.begin(), gold.end(), b) != gold.end()) ++inter;
    const bool p_def = !disc.empty(), r_def = !gold.empty();
    result.boundary.precision =
        p_def ? static_cast<double>(inter) / disc.size() : 0.0;
    result.boundary.recall =
        r_def ? static_cast<double>(inter) / gold.size() : 0.0;
    const double pv = result.boundary.precision, rv = result.boundary.recall;
    result.boundary.fscore =
        (p_def || r_def) && (pv + rv) > 0 ? 2 * pv * rv / (pv + rv) : 0.0;
  }

  // counts
  {
    std::vector<std::vector<std::string>> types;
    for (const auto& f : all)
      if (!f.transcription.empty() &&
          std::find(types.begin(), types.end(), f.transcription) ==
              types.end())
        types.push_back(f.transcription);
    result.words_found = types.size();
    result.pairs = p_clus.size();
  }

  return result;
}

}  // namespace zreval::oracle
