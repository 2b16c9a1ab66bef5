// formats.cpp
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

#include "zreval/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zreval/error.hpp"

namespace fs = std::filesystem;

namespace zreval {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  for (std::string tok; iss >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& file,
                    int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail_parse(file, line, "non-numeric token '" + tok + "'");
  if (!std::isfinite(v))
    fail_parse(file, line, "non-finite value '" + tok + "'");
  return v;
}

}  // namespace

void FeatureStore::add(FeatureSequence seq) {
  if (seq.frames.empty())
    fail_validation("feature sequence for '" + seq.utterance + "' is empty");
  const std::size_t d = seq.frames.front().size();
  if (dimension_ == 0)
    dimension_ = d;
  else if (d != dimension_)
    fail_validation("feature dimension mismatch for '" + seq.utterance +
                    "': " + std::to_string(d) + " vs " +
                    std::to_string(dimension_));
  if (!index_.emplace(seq.utterance, sequences_.size()).second)
    fail_validation("duplicate feature sequence for '" + seq.utterance + "'");
  sequences_.push_back(std::move(seq));
}

const FeatureSequence& FeatureStore::at(const std::string& utterance) const {
  auto it = index_.find(utterance);
  if (it == index_.end())
    fail_validation("no features for utterance '" + utterance + "'");
  return sequences_[it->second];
}

FeatureStore read_features(const std::string& dir,
                           bool require_posteriorgram) {
  if (!fs::is_directory(dir)) fail_io("not a directory", dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".fea")
      files.push_back(entry.path());
  if (files.empty()) fail_io("no .fea files found", dir);
  std::sort(files.begin(), files.end());

  FeatureStore store;
  for (const auto& path : files) {
    const std::string file = path.string();
    std::ifstream in(file);
    if (!in) fail_io("cannot open feature file", file);
    FeatureSequence seq;
    seq.utterance = path.stem().string();
    std::string line;
    int lineno = 0;
    std::size_t dim = 0;
    double prev_time = 0.0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto toks = split_ws(line);
      if (toks.empty()) continue;
      if (toks.size() < 2)
        fail_parse(file, lineno, "expected `time v1 ... vd`");
      const double t = parse_double(toks[0], file, lineno);
      if (!seq.times.empty() && t <= prev_time)
        fail_parse(file, lineno,
                   "times not strictly increasing (" + std::to_string(t) +
                       " after " + std::to_string(prev_time) + ")");
      prev_time = t;
      FrameVector frame;
      frame.reserve(toks.size() - 1);
      for (std::size_t i = 1; i < toks.size(); ++i)
        frame.push_back(parse_double(toks[i], file, lineno));
      if (dim == 0)
        dim = frame.size();
      else if (frame.size() != dim)
        fail_parse(file, lineno,
                   "ragged frame dimension (" + std::to_string(frame.size()) +
                       " vs " + std::to_string(dim) + ")");
      if (require_posteriorgram) {
        double sum = 0.0;
        for (double v : frame) {
          if (v < 0.0)
            fail_parse(file, lineno,
                       "negative posteriorgram entry " + std::to_string(v));
          sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
          fail_parse(file, lineno,
                     "posteriorgram does not sum to 1 (sum = " +
                         std::to_string(sum) + ")");
      }
      seq.times.push_back(t);
      seq.frames.push_back(std::move(frame));
    }
    if (seq.frames.empty()) fail_parse(file, lineno, "no frames in file");
    try {
      store.add(std::move(seq));
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), file);
    }
  }
  return store;
}

void write_features(const FeatureStore& store, const std::string& dir) {
  fs::create_directories(dir);
  char tbuf[64], vbuf[64];
  std::vector<const FeatureSequence*> ordered;
  for (const auto& seq : store.sequences()) ordered.push_back(&seq);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->utterance < b->utterance; });
  for (const auto* seq : ordered) {
    const std::string file = (fs::path(dir) / (seq->utterance + ".fea")).string();
    std::ofstream out(file);
    if (!out) fail_io("cannot write feature file", file);
    for (std::size_t i = 0; i < seq->times.size(); ++i) {
      std::snprintf(tbuf, sizeof tbuf, "%.6f", seq->times[i]);
      out << tbuf;
      for (double v : seq->frames[i]) {
        std::snprintf(vbuf, sizeof vbuf, "%.12g", v);
        out << ' ' << vbuf;
      }
      out << '\n';
    }
  }
}

std::vector<ClassGroup> read_classes(const std::string& path,
                                     const GoldAlignment& g) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open class file", path);
  std::vector<ClassGroup> classes;
  std::set<std::string> seen_ids;
  std::string line;
  int lineno = 0;
  bool in_block = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) {  // blank line closes a block
      if (in_block && classes.back().fragments.empty())
        fail_parse(path, lineno,
                   "class '" + classes.back().class_id + "' has no fragments");
      in_block = false;
      continue;
    }
    if (toks[0] == "Class") {
      if (in_block)
        fail_parse(path, lineno,
                   "missing blank line before new class block");
      if (toks.size() != 2) fail_parse(path, lineno, "expected `Class <id>`");
      if (!seen_ids.insert(toks[1]).second)
        fail_parse(path, lineno, "duplicate class id '" + toks[1] + "'");
      classes.push_back(ClassGroup{toks[1], {}});
      in_block = true;
      continue;
    }
    if (!in_block)
      fail_parse(path, lineno, "fragment record outside any class block");
    if (toks.size() != 3)
      fail_parse(path, lineno, "expected `utt onset offset`");
    Fragment f;
    f.utterance = toks[0];
    f.onset = parse_double(toks[1], path, lineno);
    f.offset = parse_double(toks[2], path, lineno);
    try {
      resolve_fragment(f, g);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), path, lineno);
    }
    classes.back().fragments.push_back(std::move(f));
  }
  if (in_block && classes.back().fragments.empty())
    fail_parse(path, lineno, "class '" + classes.back().class_id +
                                 "' has no fragments");
  return classes;
}

void write_classes(std::span<const ClassGroup> classes,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("cannot write class file", path);
  char a[64], b[64];
  bool first = true;
  for (const auto& c : classes) {
    if (!first) out << '\n';
    first = false;
    out << "Class " << c.class_id << '\n';
    for (const auto& f : c.fragments) {
      std::snprintf(a, sizeof a, "%.6f", f.onset);
      std::snprintf(b, sizeof b, "%.6f", f.offset);
      out << f.utterance << ' ' << a << ' ' << b << '\n';
    }
  }
}

std::vector<std::string> SubsetManifest::subset_names() const {
  std::vector<std::string> names;
  for (const auto& [utt, subset] : rows)
    if (std::find(names.begin(), names.end(), subset) == names.end())
      names.push_back(subset);
  std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
    const int ra = subset_rank(a), rb = subset_rank(b);
    return ra != rb ? ra < rb : a < b;
  });
  return names;
}

std::vector<std::string> SubsetManifest::utterances_in(
    const std::string& subset) const {
  std::vector<std::string> out;
  for (const auto& [utt, s] : rows)
    if (s == subset) out.push_back(utt);
  return out;
}

SubsetManifest read_manifest(const std::string& path, const GoldAlignment* g) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open manifest", path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) fail_parse(path, 1, "empty file, header expected");
  ++lineno;
  if (split_ws(line) != std::vector<std::string>{"utt", "subset"})
    fail_parse(path, 1, "bad header (expected 'utt subset')");
  SubsetManifest manifest;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) fail_parse(path, lineno, "expected `utt subset`");
    if (g != nullptr && !g->has(toks[0]))
      fail_parse(path, lineno, "unknown utterance '" + toks[0] + "'");
    if (!manifest.subset_of.emplace(toks[0], toks[1]).second)
      fail_parse(path, lineno,
                 "utterance '" + toks[0] + "' listed twice (subsets must be "
                 "disjoint)");
    manifest.rows.emplace_back(toks[0], toks[1]);
  }
  return manifest;
}

void write_manifest(const SubsetManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("cannot write manifest", path);
  out << "utt subset\n";
  for (const auto& [utt, subset] : manifest.rows)
    out << utt << ' ' << subset << '\n';
}

int subset_rank(const std::string& subset) {
  if (subset == "1s") return 0;
  if (subset == "10s") return 1;
  if (subset == "120s") return 2;
  return 3;
}

std::string subset_display(const std::string& subset) {
  return subset == "120s" ? "2min" : subset;
}

}  // namespace zreval
