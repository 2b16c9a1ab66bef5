// runner.cpp
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

#include "zreval/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zreval/abx.hpp"
#include "zreval/corpus.hpp"
#include "zreval/error.hpp"
#include "zreval/formats.hpp"
#include "zreval/parallel.hpp"
#include "zreval/tde.hpp"

namespace zreval {

namespace {

const char* kDtwNote =
    "min over monotone paths (diag/right/down, endpoints anchored) of mean "
    "per-cell frame dissimilarity";
const char* kKlNote =
    "symmetrized KL: mean of both directions, entries floored at 1e-10 and "
    "renormalized";
const char* kAbxAggregationNote =
    "directions symmetrized per (speaker config, context, pair), then "
    "averaged over speaker configs, contexts, pairs";

std::string join_languages(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ',';
    out += n;
  }
  return out;
}

// unweighted mean over languages for every (subset, name) key
void add_language_average(ScoreReport& report, int track) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> grouped;
  for (const auto& m : report.metrics)
    if (m.track == track && m.language != "avg")
      grouped[{m.subset, m.name}].push_back(m.value);
  std::set<std::string> languages;
  for (const auto& m : report.metrics)
    if (m.track == track && m.language != "avg") languages.insert(m.language);
  if (languages.size() < 2) return;
  for (const auto& [key, values] : grouped) {
    double sum = 0.0;
    for (double v : values) sum += v;
    report.metrics.push_back(MetricRow{
        track, "avg", key.first, key.second,
        sum / static_cast<double>(values.size())});
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

namespace {

void eval_track1_language(ScoreReport& report, EventLog& log,
                          const GoldAlignment& g, const FeatureStore& features,
                          const std::string& language,
                          const std::string& manifest_path,
                          const Track1Options& options, int workers) {
  std::vector<std::pair<std::string, std::set<std::string>>> subsets;
  if (manifest_path.empty()) {
    log.warn("track1.no_manifest",
             "no subset manifest; evaluating all utterances as one subset");
    std::set<std::string> all;
    for (const auto& u : g.utterances()) all.insert(u.id);
    subsets.emplace_back("all", std::move(all));
  } else {
    const SubsetManifest manifest = read_manifest(manifest_path, &g);
    for (const auto& name : manifest.subset_names()) {
      std::set<std::string> utts;
      for (const auto& id : manifest.utterances_in(name)) utts.insert(id);
      subsets.emplace_back(name, std::move(utts));
    }
  }

  AbxOptions abx_options;
  abx_options.metric = options.metric;
  abx_options.min_duration = options.min_duration;
  abx_options.seed = options.seed;
  abx_options.triplet_cap = options.triplet_cap;
  abx_options.workers = workers;

  for (const auto& [subset, utts] : subsets) {
    const AbxResult r = run_abx(g, features, &utts, options.within,
                                options.across, abx_options, log);
    if (options.within) {
      if (!r.has_within)
        fail_validation("no within-speaker ABX cells in subset '" + subset +
                        "' of language '" + language + "'");
      report.metrics.push_back(
          MetricRow{1, language, subset, "abx_within_error", r.within_error});
      for (const auto& [pair, error] : r.within_pair_errors)
        report.pair_errors.push_back(PairErrorRow{language, subset, "within",
                                                  pair.first, pair.second,
                                                  error});
    }
    if (options.across) {
      if (!r.has_across)
        fail_validation("no across-speaker ABX cells in subset '" + subset +
                        "' of language '" + language + "'");
      report.metrics.push_back(
          MetricRow{1, language, subset, "abx_across_error", r.across_error});
      for (const auto& [pair, error] : r.across_pair_errors)
        report.pair_errors.push_back(PairErrorRow{language, subset, "across",
                                                  pair.first, pair.second,
                                                  error});
    }
    report.metrics.push_back(MetricRow{1, language, subset, "abx_cells",
                                       static_cast<double>(r.cell_count)});
    report.metrics.push_back(MetricRow{1, language, subset, "abx_triplets",
                                       static_cast<double>(r.scored_triplets)});
  }
}

void add_track1_config(ScoreReport& report, const Track1Options& options,
                       const std::vector<std::string>& languages) {
  report.add_config("track", "1");
  report.add_config("languages", join_languages(languages));
  report.add_config("metric", to_string(options.metric));
  report.add_config("mode", options.within && options.across
                                ? "both"
                                : (options.within ? "within" : "across"));
  report.add_config("min_duration", fmt(options.min_duration));
  report.add_config("triplet_cap", std::to_string(options.triplet_cap));
  report.add_config("seed", std::to_string(options.seed));
  report.add_config("dtw", kDtwNote);
  report.add_config("kl", kKlNote);
  report.add_config("abx_aggregation", kAbxAggregationNote);
}

}  // namespace

ScoreReport run_track1(std::span<const Track1Spec> specs,
                       const Track1Options& options) {
  if (specs.empty()) fail_invalid("run_track1: no inputs");
  if (!options.within && !options.across)
    fail_invalid("run_track1: no speaker mode selected");
  const int workers = resolve_workers(options.workers);

  ScoreReport report = make_report();
  EventLog log;
  std::vector<std::string> languages;

  for (const auto& spec : specs) {
    languages.push_back(spec.language);
    const GoldAlignment g = load_alignment(spec.phone_path, spec.word_path);
    const FeatureStore features =
        read_features(spec.features_dir, options.metric == FrameMetric::kl);
    eval_track1_language(report, log, g, features, spec.language,
                         spec.manifest_path, options, workers);
  }

  add_language_average(report, 1);
  add_track1_config(report, options, languages);
  for (const auto& spec : specs) {
    report.add_config("paths." + spec.language,
                      spec.phone_path + ";" + spec.word_path + ";" +
                          spec.features_dir +
                          (spec.manifest_path.empty()
                               ? ""
                               : ";" + spec.manifest_path));
  }
  report.events = log.entries();
  report.sort_rows();
  return report;
}

ScoreReport run_track1_loaded(const GoldAlignment& g,
                              const FeatureStore& features,
                              const std::string& language,
                              const std::string& manifest_path,
                              const Track1Options& options) {
  if (!options.within && !options.across)
    fail_invalid("run_track1: no speaker mode selected");
  const int workers = resolve_workers(options.workers);
  ScoreReport report = make_report();
  EventLog log;
  eval_track1_language(report, log, g, features, language, manifest_path,
                       options, workers);
  add_track1_config(report, options, {language});
  report.events = log.entries();
  report.sort_rows();
  return report;
}

namespace {

void eval_track2_language(ScoreReport& report, EventLog& log,
                          const GoldAlignment& g,
                          std::span<const ClassGroup> classes,
                          const std::string& language,
                          const Track2Options& options, int workers) {
  TdeOptions tde_options;
  tde_options.chunk_size = options.chunk_size;
  tde_options.workers = workers;
  const TdeResult r = eval_chunked(classes, g, tde_options, log);

  auto add = [&](const char* name, double value) {
    report.metrics.push_back(MetricRow{2, language, "all", name, value});
  };
  add("words", static_cast<double>(r.words_found));
  add("pairs", static_cast<double>(r.pairs));
  add("ned", r.ned);
  add("coverage", r.coverage);
  add("coverage_raw", r.coverage_raw);
  add("grouping_precision", r.grouping.precision);
  add("grouping_recall", r.grouping.recall);
  add("grouping_fscore", r.grouping.fscore);
  add("type_precision", r.type.precision);
  add("type_recall", r.type.recall);
  add("type_fscore", r.type.fscore);
  add("token_precision", r.token.precision);
  add("token_recall", r.token.recall);
  add("token_fscore", r.token.fscore);
  add("boundary_precision", r.boundary.precision);
  add("boundary_recall", r.boundary.recall);
  add("boundary_fscore", r.boundary.fscore);
}

}  // namespace

ScoreReport run_track2(std::span<const Track2Spec> specs,
                       const Track2Options& options) {
  if (specs.empty()) fail_invalid("run_track2: no inputs");
  const int workers = resolve_workers(options.workers);

  ScoreReport report = make_report();
  EventLog log;
  std::vector<std::string> languages;

  for (const auto& spec : specs) {
    languages.push_back(spec.language);
    const GoldAlignment g = load_alignment(spec.phone_path, spec.word_path);
    const std::vector<ClassGroup> classes = read_classes(spec.classes_path, g);
    eval_track2_language(report, log, g, classes, spec.language, options,
                         workers);
  }

  add_language_average(report, 2);

  report.add_config("track", "2");
  report.add_config("languages", join_languages(languages));
  report.add_config("chunk_size", std::to_string(options.chunk_size));
  for (const auto& spec : specs)
    report.add_config("paths." + spec.language,
                      spec.phone_path + ";" + spec.word_path + ";" +
                          spec.classes_path);
  report.events = log.entries();
  report.sort_rows();
  return report;
}

ScoreReport run_track2_loaded(const GoldAlignment& g,
                              std::span<const ClassGroup> classes,
                              const std::string& language,
                              const Track2Options& options) {
  const int workers = resolve_workers(options.workers);
  ScoreReport report = make_report();
  EventLog log;
  eval_track2_language(report, log, g, classes, language, options, workers);
  report.add_config("track", "2");
  report.add_config("languages", language);
  report.add_config("chunk_size", std::to_string(options.chunk_size));
  report.events = log.entries();
  report.sort_rows();
  return report;
}

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open batch manifest", path);
  try {
    return nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad batch JSON: ") + e.what(),
                path);
  }
}

std::string get_string(const nlohmann::json& obj, const char* key,
                       const std::string& path, bool required) {
  if (!obj.contains(key)) {
    if (required)
      throw Error(ErrorKind::parse,
                  std::string("batch entry missing key '") + key + "'", path);
    return "";
  }
  return obj.at(key).get<std::string>();
}

}  // namespace

std::vector<Track1Spec> parse_track1_batch(const std::string& path) {
  const auto j = load_json(path);
  if (!j.is_array())
    throw Error(ErrorKind::parse, "batch manifest must be a JSON array", path);
  std::vector<Track1Spec> specs;
  for (const auto& entry : j) {
    Track1Spec s;
    s.language = get_string(entry, "language", path, true);
    s.phone_path = get_string(entry, "phones", path, true);
    s.word_path = get_string(entry, "words", path, true);
    s.features_dir = get_string(entry, "features", path, true);
    s.manifest_path = get_string(entry, "manifest", path, false);
    specs.push_back(std::move(s));
  }
  if (specs.empty())
    throw Error(ErrorKind::parse, "batch manifest is empty", path);
  return specs;
}

std::vector<Track2Spec> parse_track2_batch(const std::string& path) {
  const auto j = load_json(path);
  if (!j.is_array())
    throw Error(ErrorKind::parse, "batch manifest must be a JSON array", path);
  std::vector<Track2Spec> specs;
  for (const auto& entry : j) {
    Track2Spec s;
    s.language = get_string(entry, "language", path, true);
    s.phone_path = get_string(entry, "phones", path, true);
    s.word_path = get_string(entry, "words", path, true);
    s.classes_path = get_string(entry, "classes", path, true);
    specs.push_back(std::move(s));
  }
  if (specs.empty())
    throw Error(ErrorKind::parse, "batch manifest is empty", path);
  return specs;
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  for (const auto& c : checked) out << "checked: " << c << '\n';
  if (diagnostics.empty()) {
    out << "OK\n";
  } else {
    for (const auto& d : diagnostics) out << "error: " << d << '\n';
    out << diagnostics.size() << " problem(s) found\n";
  }
  return out.str();
}

ValidationReport validate(const ValidateSpec& spec) {
  ValidationReport report;
  const GoldAlignment* alignment = nullptr;
  GoldAlignment g;
  try {
    g = load_alignment(spec.phone_path, spec.word_path);
    alignment = &g;
    report.checked.push_back("alignment (" + spec.phone_path + ", " +
                             spec.word_path + ")");
  } catch (const Error& e) {
    report.diagnostics.push_back(e.what());
  }

  if (!spec.features_dir.empty()) {
    try {
      const FeatureStore features =
          read_features(spec.features_dir, spec.metric == FrameMetric::kl);
      report.checked.push_back("features (" + spec.features_dir + ")");
      if (alignment != nullptr) {
        for (const auto& seq : features.sequences())
          if (!alignment->has(seq.utterance))
            report.diagnostics.push_back(
                spec.features_dir + ": feature file for unknown utterance '" +
                seq.utterance + "'");
        for (const auto& u : alignment->utterances())
          if (!features.has(u.id))
            report.diagnostics.push_back(spec.features_dir +
                                         ": no feature file for utterance '" +
                                         u.id + "'");
      }
    } catch (const Error& e) {
      report.diagnostics.push_back(e.what());
    }
  }

  if (!spec.classes_path.empty()) {
    if (alignment == nullptr) {
      report.diagnostics.push_back(
          spec.classes_path +
          ": skipped fragment validation (alignment unavailable)");
    } else {
      try {
        read_classes(spec.classes_path, *alignment);
        report.checked.push_back("classes (" + spec.classes_path + ")");
      } catch (const Error& e) {
        report.diagnostics.push_back(e.what());
      }
    }
  }

  if (!spec.manifest_path.empty()) {
    try {
      read_manifest(spec.manifest_path, alignment);
      report.checked.push_back("manifest (" + spec.manifest_path + ")");
    } catch (const Error& e) {
      report.diagnostics.push_back(e.what());
    }
  }

  return report;
}

}  // namespace zreval
