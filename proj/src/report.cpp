// report.cpp
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

#include "zreval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "zreval/error.hpp"
#include "zreval/formats.hpp"
#include "zreval/version.hpp"

namespace zreval {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Track 2 columns in the fixed table order.
const std::vector<std::string> kTrack2Columns = {
    "words",       "pairs",        "ned",          "coverage",
    "grouping_precision", "grouping_recall", "grouping_fscore",
    "type_precision",     "type_recall",     "type_fscore",
    "token_precision",    "token_recall",    "token_fscore",
    "boundary_precision", "boundary_recall", "boundary_fscore"};

}  // namespace

double ScoreReport::metric(int track, const std::string& language,
                           const std::string& subset,
                           const std::string& name) const {
  for (const auto& m : metrics)
    if (m.track == track && m.language == language && m.subset == subset &&
        m.name == name)
      return m.value;
  fail_invalid("report has no metric (" + std::to_string(track) + ", " +
               language + ", " + subset + ", " + name + ")");
}

void ScoreReport::sort_rows() {
  std::stable_sort(metrics.begin(), metrics.end(),
                   [](const MetricRow& a, const MetricRow& b) {
                     return std::make_tuple(a.track, a.language,
                                            subset_rank(a.subset), a.subset,
                                            a.name) <
                            std::make_tuple(b.track, b.language,
                                            subset_rank(b.subset), b.subset,
                                            b.name);
                   });
  std::stable_sort(pair_errors.begin(), pair_errors.end(),
                   [](const PairErrorRow& a, const PairErrorRow& b) {
                     return std::make_tuple(a.language, subset_rank(a.subset),
                                            a.subset, a.mode, a.phone_a,
                                            a.phone_b) <
                            std::make_tuple(b.language, subset_rank(b.subset),
                                            b.subset, b.mode, b.phone_a,
                                            b.phone_b);
                   });
}

std::string ScoreReport::to_json() const {
  ScoreReport sorted = *this;
  sorted.sort_rows();
  ojson j;
  j["tool"] = {{"name", sorted.tool_name}, {"version", sorted.tool_version}};
  ojson cfg = ojson::object();
  for (const auto& [k, v] : sorted.config) cfg[k] = v;
  j["config"] = std::move(cfg);
  ojson events = ojson::array();
  for (const auto& e : sorted.events)
    events.push_back(
        {{"key", e.key}, {"message", e.message}, {"count", e.count}});
  j["events"] = std::move(events);
  ojson metrics = ojson::array();
  for (const auto& m : sorted.metrics)
    metrics.push_back({{"track", m.track},
                       {"language", m.language},
                       {"subset", m.subset},
                       {"name", m.name},
                       {"value", m.value}});
  j["metrics"] = std::move(metrics);
  if (!sorted.pair_errors.empty()) {
    ojson pairs = ojson::array();
    for (const auto& p : sorted.pair_errors)
      pairs.push_back({{"language", p.language},
                       {"subset", p.subset},
                       {"mode", p.mode},
                       {"phone_a", p.phone_a},
                       {"phone_b", p.phone_b},
                       {"error", p.error}});
    j["pairs"] = std::move(pairs);
  }
  return j.dump(2) + "\n";
}

std::string ScoreReport::to_csv() const {
  ScoreReport sorted = *this;
  sorted.sort_rows();

  std::vector<std::string> languages;
  std::vector<std::string> subsets;
  bool has_track1 = false, has_track2 = false;
  for (const auto& m : sorted.metrics) {
    if (m.track == 1) {
      has_track1 = true;
      if (std::find(subsets.begin(), subsets.end(), m.subset) == subsets.end())
        subsets.push_back(m.subset);
    }
    if (m.track == 2) has_track2 = true;
    if (std::find(languages.begin(), languages.end(), m.language) ==
        languages.end())
      languages.push_back(m.language);
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const auto& a, const auto& b) {
              const int ra = subset_rank(a), rb = subset_rank(b);
              return ra != rb ? ra < rb : a < b;
            });

  std::ostringstream out;
  auto find = [&](int track, const std::string& lang, const std::string& sub,
                  const std::string& name, double* value) {
    for (const auto& m : sorted.metrics)
      if (m.track == track && m.language == lang && m.subset == sub &&
          m.name == name) {
        *value = m.value;
        return true;
      }
    return false;
  };

  if (has_track1) {
    out << "language,mode";
    for (const auto& s : subsets) out << ',' << subset_display(s);
    out << '\n';
    for (const auto& lang : languages) {
      for (const std::string mode : {"within", "across"}) {
        const std::string name = "abx_" + std::string(mode) + "_error";
        bool any = false;
        std::ostringstream row;
        row << lang << ',' << mode;
        for (const auto& s : subsets) {
          double v = 0.0;
          if (find(1, lang, s, name, &v)) {
            row << ',' << fmt_value(v);
            any = true;
          } else {
            row << ',';
          }
        }
        if (any) out << row.str() << '\n';
      }
    }
  }
  if (has_track2) {
    if (has_track1) out << '\n';
    out << "language";
    for (const auto& c : kTrack2Columns) out << ',' << c;
    out << '\n';
    for (const auto& lang : languages) {
      bool any = false;
      std::ostringstream row;
      row << lang;
      for (const auto& c : kTrack2Columns) {
        double v = 0.0;
        if (find(2, lang, "all", c, &v)) {
          row << ',' << fmt_value(v);
          any = true;
        } else {
          row << ',';
        }
      }
      if (any) out << row.str() << '\n';
    }
  }
  return out.str();
}

std::string ScoreReport::pairs_to_csv() const {
  ScoreReport sorted = *this;
  sorted.sort_rows();
  std::ostringstream out;
  out << "language,subset,mode,phone_a,phone_b,error\n";
  for (const auto& p : sorted.pair_errors)
    out << p.language << ',' << p.subset << ',' << p.mode << ',' << p.phone_a
        << ',' << p.phone_b << ',' << fmt_value(p.error) << '\n';
  return out.str();
}

ScoreReport make_report() {
  ScoreReport r;
  r.tool_name = "zreval";
  r.tool_version = kVersion;
  return r;
}

void write_report(const ScoreReport& report, const std::string& path_prefix) {
  {
    const std::string path = path_prefix + ".json";
    std::ofstream out(path);
    if (!out) fail_io("cannot write report", path);
    out << report.to_json();
  }
  {
    const std::string path = path_prefix + ".csv";
    std::ofstream out(path);
    if (!out) fail_io("cannot write report", path);
    out << report.to_csv();
  }
  if (!report.pair_errors.empty()) {
    const std::string path = path_prefix + "_pairs.csv";
    std::ofstream out(path);
    if (!out) fail_io("cannot write report", path);
    out << report.pairs_to_csv();
  }
}

ScoreReport parse_report_json(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad report JSON: ") + e.what());
  }
  ScoreReport r;
  r.tool_name = j.at("tool").at("name").get<std::string>();
  r.tool_version = j.at("tool").at("version").get<std::string>();
  for (const auto& [k, v] : j.at("config").items())
    r.config.emplace_back(k, v.get<std::string>());
  for (const auto& e : j.at("events"))
    r.events.push_back(EventLog::Entry{e.at("key").get<std::string>(),
                                       e.at("message").get<std::string>(),
                                       e.at("count").get<std::uint64_t>()});
  for (const auto& m : j.at("metrics"))
    r.metrics.push_back(MetricRow{m.at("track").get<int>(),
                                  m.at("language").get<std::string>(),
                                  m.at("subset").get<std::string>(),
                                  m.at("name").get<std::string>(),
                                  m.at("value").get<double>()});
  if (j.contains("pairs"))
    for (const auto& p : j.at("pairs"))
      r.pair_errors.push_back(PairErrorRow{
          p.at("language").get<std::string>(), p.at("subset").get<std::string>(),
          p.at("mode").get<std::string>(), p.at("phone_a").get<std::string>(),
          p.at("phone_b").get<std::string>(), p.at("error").get<double>()});
  return r;
}

}  // namespace zreval
