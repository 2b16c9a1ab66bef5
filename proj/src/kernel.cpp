// kernel.cpp
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

#include "zreval/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "zreval/error.hpp"

namespace zreval {

FrameMetric frame_metric_from_string(const std::string& name) {
  if (name == "cosine") return FrameMetric::cosine;
  if (name == "kl") return FrameMetric::kl;
  fail_invalid("unknown frame metric '" + name + "' (expected cosine or kl)");
}

const char* to_string(FrameMetric m) {
  return m == FrameMetric::cosine ? "cosine" : "kl";
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    fail_invalid("cosine_distance: dimension mismatch (" +
                 std::to_string(u.size()) + " vs " + std::to_string(v.size()) +
                 ")");
  if (u.empty()) fail_invalid("cosine_distance: empty vectors");
  if (std::memcmp(u.data(), v.data(), u.size() * sizeof(double)) == 0)
    return 0.0;
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 1.0;
  const double d = 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(d, 0.0, 2.0);
}

namespace {

// Floor at kKlEpsilon then renormalize to a proper distribution.
void floor_renormalize(std::span<const double> in, std::vector<double>& out) {
  out.resize(in.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] < 0.0)
      fail_invalid("kl_dissimilarity: negative entry " +
                   std::to_string(in[i]));
    out[i] = std::max(in[i], kKlEpsilon);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
}

double kl_directed(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

}  // namespace

double kl_dissimilarity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    fail_invalid("kl_dissimilarity: dimension mismatch (" +
                 std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                 ")");
  if (p.empty()) fail_invalid("kl_dissimilarity: empty vectors");
  std::vector<double> pf, qf;
  floor_renormalize(p, pf);
  floor_renormalize(q, qf);
  return 0.5 * (kl_directed(pf, qf) + kl_directed(qf, pf));
}

namespace {

// Frame-pair cost matrix, with per-metric preprocessing hoisted out of the
// inner loop: unit-normalized frames for cosine, floored log-probabilities
// for KL.
class CostMatrix {
 public:
  CostMatrix(std::span<const FrameVector> x, std::span<const FrameVector> y,
             FrameMetric metric, EventLog* log)
      : m_(x.size()), n_(y.size()), cost_(x.size() * y.size()) {
    if (metric == FrameMetric::cosine) {
      bool zero_norm = false;
      auto xs = normalize(x, &zero_norm);
      auto ys = normalize(y, &zero_norm);
      if (zero_norm && log != nullptr)
        log->warn("kernel.cosine_zero_norm",
                  "zero-norm frame in cosine mode; its distance to any frame "
                  "is defined as 1");
      const std::size_t d = x[0].size();
      for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          // bitwise-equal raw frames compare at distance exactly 0
          if (std::memcmp(x[i].data(), y[j].data(), d * sizeof(double)) == 0) {
            cost_[i * n_ + j] = 0.0;
            continue;
          }
          if (xs[i].empty() || ys[j].empty()) {  // zero-norm sentinel
            cost_[i * n_ + j] = 1.0;
            continue;
          }
          double dot = 0.0;
          for (std::size_t k = 0; k < d; ++k) dot += xs[i][k] * ys[j][k];
          cost_[i * n_ + j] = std::clamp(1.0 - dot, 0.0, 2.0);
        }
    } else {
      auto [xp, xl] = prepare_kl(x);
      auto [yp, yl] = prepare_kl(y);
      for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          double s = 0.0;
          const auto& p = xp[i];
          const auto& q = yp[j];
          const auto& lp = xl[i];
          const auto& lq = yl[j];
          // 0.5*(KL(p||q)+KL(q||p)) written as one symmetric accumulation
          for (std::size_t k = 0; k < p.size(); ++k)
            s += 0.5 * (p[k] - q[k]) * (lp[k] - lq[k]);
          cost_[i * n_ + j] = s;
        }
    }
  }

  double at(std::size_t i, std::size_t j) const { return cost_[i * n_ + j]; }

 private:
  static std::vector<std::vector<double>> normalize(
      std::span<const FrameVector> frames, bool* zero_norm) {
    std::vector<std::vector<double>> out(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      double n2 = 0.0;
      for (double v : frames[i]) n2 += v * v;
      if (n2 == 0.0) {
        *zero_norm = true;
        continue;  // empty marks the zero-norm sentinel
      }
      const double inv = 1.0 / std::sqrt(n2);
      out[i].resize(frames[i].size());
      for (std::size_t k = 0; k < frames[i].size(); ++k)
        out[i][k] = frames[i][k] * inv;
    }
    return out;
  }

  static std::pair<std::vector<std::vector<double>>,
                   std::vector<std::vector<double>>>
  prepare_kl(std::span<const FrameVector> frames) {
    std::vector<std::vector<double>> probs(frames.size());
    std::vector<std::vector<double>> logs(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      floor_renormalize(frames[i], probs[i]);
      logs[i].resize(probs[i].size());
      for (std::size_t k = 0; k < probs[i].size(); ++k)
        logs[i][k] = std::log(probs[i][k]);
    }
    return {std::move(probs), std::move(logs)};
  }

  std::size_t m_, n_;
  std::vector<double> cost_;
};

}  // namespace

double dtw(std::span<const FrameVector> x, std::span<const FrameVector> y,
           FrameMetric metric, EventLog* log) {
  if (x.empty() || y.empty()) fail_invalid("dtw: empty sequence");
  const std::size_t d = x[0].size();
  if (d == 0) fail_invalid("dtw: zero-dimension frames");
  for (const auto& f : x)
    if (f.size() != d) fail_invalid("dtw: ragged frame dimensions");
  for (const auto& f : y)
    if (f.size() != d)
      fail_invalid("dtw: sequences have different frame dimensions");

  const std::size_t m = x.size(), n = y.size();
  const CostMatrix cost(x, y, metric, log);

  // dp[len] over path lengths: dp(i, j) = min summed cost of a monotone path
  // from (0,0) to (i,j) with exactly `len` cells. The answer minimizes
  // dp(m-1, n-1)/len over all feasible lengths in [max(m,n), m+n-1].
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m * n, inf), cur(m * n, inf);
  prev[0] = cost.at(0, 0);

  double best = inf;
  if (m == 1 && n == 1) best = prev[0];

  const std::size_t max_len = m + n - 1;
  for (std::size_t len = 2; len <= max_len; ++len) {
    std::fill(cur.begin(), cur.end(), inf);
    // a cell (i, j) is reachable with len cells iff
    // max(i, j) + 1 <= len <= i + j + 1
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (std::max(i, j) + 1 > len || i + j + 1 < len) continue;
        double from = inf;
        if (i > 0) from = std::min(from, prev[(i - 1) * n + j]);
        if (j > 0) from = std::min(from, prev[i * n + (j - 1)]);
        if (i > 0 && j > 0) from = std::min(from, prev[(i - 1) * n + (j - 1)]);
        if (from < inf) cur[i * n + j] = cost.at(i, j) + from;
      }
    }
    const double tail = cur[(m - 1) * n + (n - 1)];
    if (tail < inf) best = std::min(best, tail / static_cast<double>(len));
    std::swap(prev, cur);
  }
  return best;
}

std::size_t levenshtein(std::span<const std::string> a,
                        std::span<const std::string> b) {
  const std::size_t la = a.size(), lb = b.size();
  if (la == 0) return lb;
  if (lb == 0) return la;
  std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
  for (std::size_t j = 0; j <= lb; ++j) prev[j] = j;
  for (std::size_t i = 0; i < la; ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < lb; ++j) {
      const std::size_t sub = prev[j] + (a[i] == b[j] ? 0 : 1);
      cur[j + 1] = std::min({cur[j] + 1, prev[j + 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[lb];
}

}  // namespace zreval
