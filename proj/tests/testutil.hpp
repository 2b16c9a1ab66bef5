// testutil.hpp
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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "zreval/corpus.hpp"
#include "zreval/kernel.hpp"

namespace testutil {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    namespace fs = std::filesystem;
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("zreval_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }
  const std::filesystem::path& root() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Alignment file content from (utt, speaker, start, end, symbol) rows.
struct SegRow {
  std::string utt, speaker;
  double start, end;
  std::string symbol;
};

inline std::string segment_file(const std::vector<SegRow>& rows) {
  std::ostringstream out;
  out << "utt speaker start end symbol\n";
  char a[64], b[64];
  for (const auto& r : rows) {
    std::snprintf(a, sizeof a, "%.6f", r.start);
    std::snprintf(b, sizeof b, "%.6f", r.end);
    out << r.utt << ' ' << r.speaker << ' ' << a << ' ' << b << ' ' << r.symbol
        << '\n';
  }
  return out.str();
}

// A tiny single-utterance alignment: equal-length phones, one word per
// `word_split` phones. Handy for rule tests.
inline zreval::GoldAlignment tiny_alignment(
    const std::vector<std::string>& phones, double phone_dur = 0.1,
    const std::string& utt = "u1", const std::string& speaker = "s1") {
  zreval::Utterance u;
  u.id = utt;
  u.speaker = speaker;
  double t = 0.0;
  std::vector<std::string> word;
  double word_start = 0.0;
  int word_index = 0;
  auto flush_word = [&](double end) {
    if (word.empty()) return;
    u.words.push_back(zreval::WordSegment{
        "word" + std::to_string(++word_index), word_start, end});
    word.clear();
  };
  for (const auto& p : phones) {
    const bool silent = p == "sil" || p == "spn" || p == "noise";
    if (silent) flush_word(t);
    u.phones.push_back(zreval::PhoneSegment{p, t, t + phone_dur});
    if (!silent && word.empty()) word_start = t;
    if (!silent) word.push_back(p);
    t += phone_dur;
  }
  flush_word(t);
  u.duration = t;
  zreval::GoldAlignment g({u}, zreval::default_silence_symbols());
  g.validate();
  return g;
}

// Path-enumeration DTW reference: explicitly walks every monotone anchored
// path and minimizes (summed cost / cell count). Exponential; lengths must
// stay tiny.
inline double dtw_enumerate(const std::vector<zreval::FrameVector>& x,
                            const std::vector<zreval::FrameVector>& y,
                            zreval::FrameMetric metric) {
  const std::size_t m = x.size(), n = y.size();
  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = metric == zreval::FrameMetric::cosine
                            ? zreval::cosine_distance(x[i], y[j])
                            : zreval::kl_dissimilarity(x[i], y[j]);
  double best = std::numeric_limits<double>::infinity();
  struct Walker {
    std::size_t m, n;
    const std::vector<double>& cost;
    double* best;
    void walk(std::size_t i, std::size_t j, double sum, std::size_t len) {
      sum += cost[i * n + j];
      ++len;
      if (i == m - 1 && j == n - 1) {
        const double avg = sum / static_cast<double>(len);
        if (avg < *best) *best = avg;
        return;
      }
      if (i + 1 < m && j + 1 < n) walk(i + 1, j + 1, sum, len);
      if (i + 1 < m) walk(i + 1, j, sum, len);
      if (j + 1 < n) walk(i, j + 1, sum, len);
    }
  };
  Walker w{m, n, cost, &best};
  w.walk(0, 0, 0.0, 0);
  return best;
}

}  // namespace testutil
