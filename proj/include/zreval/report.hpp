// report.hpp
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

#include <string>
#include <utility>
#include <vector>

#include "zreval/event_log.hpp"

namespace zreval {

// Named metric values with provenance, plus the configuration echo that
// makes each number interpretable. Serialization is fully deterministic:
// fixed field order, sorted rows, no timestamps, no worker counts.

struct MetricRow {
  int track = 0;
  std::string language;
  std::string subset;  // duration subset for track 1, "all" for track 2
  std::string name;
  double value = 0.0;
};

struct PairErrorRow {
  std::string language;
  std::string subset;
  std::string mode;  // within | across
  std::string phone_a, phone_b;
  double error = 0.0;
};

struct ScoreReport {
  std::string tool_name;
  std::string tool_version;
  std::vector<std::pair<std::string, std::string>> config;  // ordered echo
  std::vector<EventLog::Entry> events;
  std::vector<MetricRow> metrics;
  std::vector<PairErrorRow> pair_errors;

  void add_config(const std::string& key, const std::string& value) {
    config.emplace_back(key, value);
  }
  double metric(int track, const std::string& language,
                const std::string& subset, const std::string& name) const;

  // canonical row ordering; called by the serializers
  void sort_rows();

  std::string to_json() const;
  std::string to_csv() const;        // Track 1 and/or Track 2 table layout
  std::string pairs_to_csv() const;  // per-pair ABX breakdown
};

ScoreReport make_report();  // tool name/version prefilled

// Writes `<prefix>.json` and `<prefix>.csv` (and `<prefix>_pairs.csv` when a
// per-pair breakdown is present).
void write_report(const ScoreReport& report, const std::string& path_prefix);

// Parses the JSON form back into a report (round-trip support and external
// tooling hooks).
ScoreReport parse_report_json(const std::string& json_text);

}  // namespace zreval
