// abx.cpp
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

#include "zreval/abx.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "zreval/error.hpp"
#include "zreval/parallel.hpp"
#include "zreval/rng.hpp"

namespace zreval {

std::string AbxCell::key() const {
  std::string k = mode == SpeakerMode::within ? "w|" : "a|";
  k += speaker_ab;
  k += '|';
  k += speaker_x;
  k += '|';
  k += left;
  k += '_';
  k += right;
  k += '|';
  k += center_from;
  k += '|';
  k += center_against;
  return k;
}

std::vector<TriphoneItem> extract_items(const GoldAlignment& g,
                                        double min_duration) {
  const Ticks min_ticks = to_ticks(min_duration);
  std::vector<TriphoneItem> items;
  for (const auto& u : g.utterances()) {
    const auto& ph = u.phones;
    for (std::size_t i = 0; i + 2 < ph.size(); ++i) {
      bool ok = true;
      for (std::size_t k = i; k < i + 3; ++k)
        if (g.is_silence(ph[k].phone)) ok = false;
      // temporal gaps break the window even without a silence segment
      for (std::size_t k = i; ok && k < i + 2; ++k)
        if (to_ticks(ph[k].end) != to_ticks(ph[k + 1].start)) ok = false;
      if (!ok) continue;
      const Ticks center_len = to_ticks(ph[i + 1].end) - to_ticks(ph[i + 1].start);
      if (center_len < min_ticks) continue;
      TriphoneItem item;
      item.left = ph[i].phone;
      item.center = ph[i + 1].phone;
      item.right = ph[i + 2].phone;
      item.speaker = u.speaker;
      item.fragment = Fragment{u.id, ph[i].start, ph[i + 2].end};
      items.push_back(std::move(item));
    }
  }
  return items;
}

namespace {

// (speaker, left, right) -> center -> item indices, with deterministic
// (sorted) iteration everywhere.
using ContextKey = std::tuple<std::string, std::string, std::string>;
using CenterMap = std::map<std::string, std::vector<int>>;

std::map<ContextKey, CenterMap> group_items(
    std::span<const TriphoneItem> items) {
  std::map<ContextKey, CenterMap> groups;
  for (int i = 0; i < static_cast<int>(items.size()); ++i) {
    const auto& it = items[i];
    groups[{it.speaker, it.left, it.right}][it.center].push_back(i);
  }
  return groups;
}

}  // namespace

std::vector<AbxCell> build_cells(std::span<const TriphoneItem> items,
                                 SpeakerMode mode) {
  std::vector<AbxCell> cells;
  if (mode == SpeakerMode::within) {
    for (const auto& [ctx, centers] : group_items(items)) {
      const auto& [speaker, left, right] = ctx;
      for (const auto& [cx, xs] : centers) {
        if (xs.size() < 2) continue;  // X must be a distinct token from A
        for (const auto& [cy, ys] : centers) {
          if (cx == cy) continue;
          AbxCell cell;
          cell.mode = SpeakerMode::within;
          cell.center_from = cx;
          cell.center_against = cy;
          cell.left = left;
          cell.right = right;
          cell.speaker_ab = speaker;
          cell.speaker_x = speaker;
          cell.a_items = xs;
          cell.b_items = ys;
          cell.x_items = xs;
          cells.push_back(std::move(cell));
        }
      }
    }
    return cells;
  }

  // across: index by (left, right) first, then speakers
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, CenterMap>>
      by_context;
  for (int i = 0; i < static_cast<int>(items.size()); ++i) {
    const auto& it = items[i];
    by_context[{it.left, it.right}][it.speaker][it.center].push_back(i);
  }
  for (const auto& [ctx, speakers] : by_context) {
    for (const auto& [s1, centers1] : speakers) {
      for (const auto& [s2, centers2] : speakers) {
        if (s1 == s2) continue;
        for (const auto& [cx, as] : centers1) {
          auto xs = centers2.find(cx);
          if (xs == centers2.end()) continue;
          for (const auto& [cy, bs] : centers1) {
            if (cx == cy) continue;
            AbxCell cell;
            cell.mode = SpeakerMode::across;
            cell.center_from = cx;
            cell.center_against = cy;
            cell.left = ctx.first;
            cell.right = ctx.second;
            cell.speaker_ab = s1;
            cell.speaker_x = s2;
            cell.a_items = as;
            cell.b_items = bs;
            cell.x_items = xs->second;
            cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  return cells;
}

namespace {

// Frame range of an item: all frames with center timestamp in
// [onset, offset). When no frame center falls inside, the frame nearest to
// the interval midpoint stands in (logged once per run); a fragment wholly
// outside the covered time range is rejected.
std::span<const FrameVector> item_frames(const TriphoneItem& item,
                                         const FeatureStore& features,
                                         EventLog* log) {
  const FeatureSequence& seq = features.at(item.fragment.utterance);
  const Ticks on = to_ticks(item.fragment.onset);
  const Ticks off = to_ticks(item.fragment.offset);
  const auto& times = seq.times;
  const auto tick_less = [](double t, Ticks v) { return to_ticks(t) < v; };
  const auto it_lo =
      std::lower_bound(times.begin(), times.end(), on, tick_less);
  const auto it_hi = std::lower_bound(it_lo, times.end(), off, tick_less);
  if (it_lo != it_hi) {
    const std::size_t lo = static_cast<std::size_t>(it_lo - times.begin());
    return {seq.frames.data() + lo,
            static_cast<std::size_t>(it_hi - it_lo)};
  }
  if (off <= to_ticks(times.front()) || on > to_ticks(times.back()))
    fail_validation("fragment " + item.fragment.utterance + " [" +
                    std::to_string(item.fragment.onset) + ", " +
                    std::to_string(item.fragment.offset) +
                    ") lies outside the feature time range");
  // nearest frame to the interval midpoint stands in; ties go left
  const double mid = 0.5 * (item.fragment.onset + item.fragment.offset);
  std::size_t best =
      static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), mid) -
                               times.begin());
  if (best == times.size()) --best;
  if (best > 0 && std::abs(times[best - 1] - mid) <= std::abs(times[best] - mid))
    --best;
  if (log != nullptr)
    log->warn("abx.sparse_fragment",
              "fragment shorter than the frame period; nearest frame used");
  return {seq.frames.data() + best, 1};
}

}  // namespace

double score_cell(const AbxCell& cell, std::span<const TriphoneItem> items,
                  const FeatureStore& features, const AbxOptions& options,
                  EventLog* log, std::size_t* scored_out) {
  const std::size_t na = cell.a_items.size();
  const std::size_t nb = cell.b_items.size();
  const std::size_t nx = cell.x_items.size();
  if (na == 0 || nb == 0 || nx == 0)
    fail_invalid("score_cell: cell with an empty item role");

  std::vector<std::span<const FrameVector>> fa(na), fb(nb), fx(nx);
  for (std::size_t i = 0; i < na; ++i)
    fa[i] = item_frames(items[cell.a_items[i]], features, log);
  for (std::size_t j = 0; j < nb; ++j)
    fb[j] = item_frames(items[cell.b_items[j]], features, log);
  for (std::size_t k = 0; k < nx; ++k)
    fx[k] = item_frames(items[cell.x_items[k]], features, log);

  // lazily filled DTW caches
  constexpr double kUnset = -1.0;
  std::vector<double> dax(na * nx, kUnset), dbx(nb * nx, kUnset);
  auto d_ax = [&](std::size_t i, std::size_t k) {
    double& slot = dax[i * nx + k];
    if (slot == kUnset) slot = dtw(fa[i], fx[k], options.metric, log);
    return slot;
  };
  auto d_bx = [&](std::size_t j, std::size_t k) {
    double& slot = dbx[j * nx + k];
    if (slot == kUnset) slot = dtw(fb[j], fx[k], options.metric, log);
    return slot;
  };

  // A and X must be distinct tokens. For each X token there is at most one
  // colliding A position (token lists hold distinct items), so the valid
  // triplet space is indexed through per-X prefix sums.
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> collide(nx, npos);
  std::vector<std::size_t> block_start(nx + 1, 0);
  for (std::size_t k = 0; k < nx; ++k) {
    for (std::size_t i = 0; i < na; ++i)
      if (cell.a_items[i] == cell.x_items[k]) {
        collide[k] = i;
        break;
      }
    const std::size_t a_count = na - (collide[k] == npos ? 0 : 1);
    block_start[k + 1] = block_start[k] + a_count * nb;
  }
  const std::size_t total = block_start[nx];
  if (total == 0) fail_invalid("score_cell: no valid triplets");

  // decode a flat index in valid-triplet space into (a, b, x)
  auto judge = [&](std::size_t t) -> double {
    const std::size_t k =
        static_cast<std::size_t>(
            std::upper_bound(block_start.begin(), block_start.end(), t) -
            block_start.begin()) -
        1;
    const std::size_t r = t - block_start[k];
    const std::size_t a_count = na - (collide[k] == npos ? 0 : 1);
    const std::size_t j = r / a_count;
    std::size_t i = r % a_count;
    if (collide[k] != npos && i >= collide[k]) ++i;
    const double ax = d_ax(i, k);
    const double bx = d_bx(j, k);
    if (ax < bx) return 1.0;
    if (ax == bx) return 0.5;
    return 0.0;
  };

  double correct = 0.0;
  std::size_t scored = 0;
  if (total <= options.triplet_cap) {
    for (std::size_t t = 0; t < total; ++t) correct += judge(t);
    scored = total;
  } else {
    // Floyd's sampling: cap distinct indices out of [0, total), order-free
    Rng rng(mix_seed(options.seed, cell.key()));
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(options.triplet_cap * 2);
    for (std::size_t n = total - options.triplet_cap; n < total; ++n) {
      const std::size_t r = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(n)));
      if (!chosen.insert(r).second) chosen.insert(n);
    }
    std::vector<std::size_t> sample(chosen.begin(), chosen.end());
    std::sort(sample.begin(), sample.end());
    for (std::size_t t : sample) correct += judge(t);
    scored = sample.size();
    if (log != nullptr)
      log->warn("abx.cell_subsampled",
                "cell triplet count exceeded the cap of " +
                    std::to_string(options.triplet_cap) +
                    "; deterministic seeded subsample used");
  }
  if (scored_out != nullptr) *scored_out = scored;
  return correct / static_cast<double>(scored);
}

namespace {

std::pair<std::string, std::string> unordered_pair(const std::string& a,
                                                   const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// speaker configuration -> context -> pair nesting, collapsed level by level
struct ModeAggregate {
  double error = 0.0;
  std::map<std::pair<std::string, std::string>, double> pair_errors;
  bool present = false;
};

ModeAggregate aggregate_mode(std::span<const ScoredCell> scored,
                             SpeakerMode mode) {
  using PairKey = std::pair<std::string, std::string>;
  using ContextKey = std::pair<std::string, std::string>;
  using SpeakerKey = std::pair<std::string, std::string>;
  // pair -> context -> speaker config -> direction scores
  std::map<PairKey, std::map<ContextKey, std::map<SpeakerKey, std::vector<double>>>>
      tree;
  for (const auto& sc : scored) {
    if (sc.cell->mode != mode) continue;
    const PairKey pk =
        unordered_pair(sc.cell->center_from, sc.cell->center_against);
    const ContextKey ck{sc.cell->left, sc.cell->right};
    const SpeakerKey sk{sc.cell->speaker_ab, sc.cell->speaker_x};
    tree[pk][ck][sk].push_back(sc.score);
  }
  ModeAggregate out;
  if (tree.empty()) return out;
  std::vector<double> pair_scores;
  for (const auto& [pk, contexts] : tree) {
    std::vector<double> context_scores;
    for (const auto& [ck, speaker_configs] : contexts) {
      std::vector<double> speaker_scores;
      for (const auto& [sk, directions] : speaker_configs)
        speaker_scores.push_back(mean(directions));  // symmetrize directions
      context_scores.push_back(mean(speaker_scores));
    }
    const double pair_score = mean(context_scores);
    out.pair_errors[pk] = 1.0 - pair_score;
    pair_scores.push_back(pair_score);
  }
  out.error = 1.0 - mean(pair_scores);
  out.present = true;
  return out;
}

}  // namespace

AbxResult aggregate(std::span<const ScoredCell> scored) {
  if (scored.empty()) fail_invalid("aggregate: empty cell list");
  AbxResult result;
  const ModeAggregate within = aggregate_mode(scored, SpeakerMode::within);
  const ModeAggregate across = aggregate_mode(scored, SpeakerMode::across);
  result.has_within = within.present;
  result.within_error = within.error;
  result.within_pair_errors = within.pair_errors;
  result.has_across = across.present;
  result.across_error = across.error;
  result.across_pair_errors = across.pair_errors;
  result.cell_count = scored.size();
  return result;
}

AbxResult run_abx(const GoldAlignment& g, const FeatureStore& features,
                  const std::set<std::string>* utterances, bool within,
                  bool across, const AbxOptions& options, EventLog& log) {
  std::vector<TriphoneItem> items = extract_items(g, options.min_duration);
  if (utterances != nullptr) {
    std::erase_if(items, [&](const TriphoneItem& it) {
      return utterances->find(it.fragment.utterance) == utterances->end();
    });
  }
  std::vector<AbxCell> cells;
  if (within) {
    auto w = build_cells(items, SpeakerMode::within);
    cells.insert(cells.end(), std::make_move_iterator(w.begin()),
                 std::make_move_iterator(w.end()));
  }
  if (across) {
    auto a = build_cells(items, SpeakerMode::across);
    cells.insert(cells.end(), std::make_move_iterator(a.begin()),
                 std::make_move_iterator(a.end()));
  }
  if (cells.empty())
    fail_validation("no ABX cells could be built for this utterance set");

  std::vector<double> scores(cells.size());
  std::vector<std::size_t> counts(cells.size());
  parallel_for(cells.size(), options.workers, [&](std::size_t i) {
    scores[i] = score_cell(cells[i], items, features, options, &log, &counts[i]);
  });

  std::vector<ScoredCell> scored(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    scored[i] = ScoredCell{&cells[i], scores[i]};
  AbxResult result = aggregate(scored);
  for (std::size_t c : counts) result.scored_triplets += c;
  return result;
}

}  // namespace zreval
