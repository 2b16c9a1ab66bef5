// test_formats.cpp
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

#include <doctest.h>

#include <cmath>

#include "testutil.hpp"
#include "zreval/error.hpp"
#include "zreval/formats.hpp"
#include "zreval/report.hpp"
#include "zreval/rng.hpp"

using namespace zreval;
using testutil::TempDir;

TEST_CASE("read_features parses a simple file") {
  TempDir tmp("fea");
  testutil::write_file(tmp.path("features/u1.fea"),
                       "0.0125 1 0\n0.0225 0 1\n");
  const FeatureStore store = read_features(tmp.path("features"));
  CHECK(store.dimension() == 2);
  const FeatureSequence& seq = store.at("u1");
  REQUIRE(seq.times.size() == 2);
  CHECK(seq.times[0] == doctest::Approx(0.0125));
  CHECK(seq.frames[1] == FrameVector{0.0, 1.0});
}

TEST_CASE("read_features rejections carry file and line") {
  TempDir tmp("fea_bad");
  SUBCASE("decreasing times") {
    testutil::write_file(tmp.path("features/u1.fea"),
                         "0.02 1 0\n0.01 0 1\n");
    try {
      read_features(tmp.path("features"));
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("strictly increasing") !=
            std::string::npos);
    }
  }
  SUBCASE("ragged dimensions") {
    testutil::write_file(tmp.path("features/u1.fea"),
                         "0.01 1 0\n0.02 0 1 0\n");
    CHECK_THROWS_WITH_AS(read_features(tmp.path("features")),
                         doctest::Contains("ragged"), Error);
  }
  SUBCASE("non-numeric token") {
    testutil::write_file(tmp.path("features/u1.fea"), "0.01 1 zz\n");
    CHECK_THROWS_WITH_AS(read_features(tmp.path("features")),
                         doctest::Contains("non-numeric"), Error);
  }
  SUBCASE("cross-file dimension mismatch") {
    testutil::write_file(tmp.path("features/u1.fea"), "0.01 1 0\n");
    testutil::write_file(tmp.path("features/u2.fea"), "0.01 1 0 0\n");
    CHECK_THROWS_WITH_AS(read_features(tmp.path("features")),
                         doctest::Contains("dimension mismatch"), Error);
  }
  SUBCASE("empty file") {
    testutil::write_file(tmp.path("features/u1.fea"), "");
    CHECK_THROWS_WITH_AS(read_features(tmp.path("features")),
                         doctest::Contains("no frames"), Error);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS_AS(read_features(tmp.path("nowhere")), Error);
  }
}

TEST_CASE("posteriorgram checks in kl mode") {
  TempDir tmp("fea_post");
  SUBCASE("negative entry") {
    testutil::write_file(tmp.path("features/u1.fea"), "0.01 -0.2 1.2\n");
    CHECK_THROWS_WITH_AS(read_features(tmp.path("features"), true),
                         doctest::Contains("negative"), Error);
    CHECK_NOTHROW(read_features(tmp.path("features"), false));
  }
  SUBCASE("sum off by more than 1e-6") {
    testutil::write_file(tmp.path("features/u1.fea"), "0.01 0.5 0.6\n");
    CHECK_THROWS_WITH_AS(read_features(tmp.path("features"), true),
                         doctest::Contains("sum to 1"), Error);
  }
}

TEST_CASE("feature write/read round-trip preserves values to 1e-9") {
  TempDir tmp("fea_rt");
  Rng rng(77);
  FeatureStore store;
  for (int u = 0; u < 4; ++u) {
    FeatureSequence seq;
    seq.utterance = "utt" + std::to_string(u);
    for (int i = 0; i < 20; ++i) {
      seq.times.push_back(0.005 + 0.01 * i);
      FrameVector f(5);
      for (double& v : f) v = rng.normal() * std::exp(rng.uniform(-2, 2));
      seq.frames.push_back(std::move(f));
    }
    store.add(std::move(seq));
  }
  write_features(store, tmp.path("out"));
  const FeatureStore loaded = read_features(tmp.path("out"));
  for (const auto& seq : store.sequences()) {
    const FeatureSequence& got = loaded.at(seq.utterance);
    REQUIRE(got.frames.size() == seq.frames.size());
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      CHECK(std::abs(got.times[i] - seq.times[i]) <= 1e-9);
      for (std::size_t k = 0; k < seq.frames[i].size(); ++k)
        CHECK(got.frames[i][k] ==
              doctest::Approx(seq.frames[i][k]).epsilon(1e-9));
    }
  }
}

namespace {

GoldAlignment two_utterance_alignment() {
  Utterance u1;
  u1.id = "u1";
  u1.speaker = "s1";
  u1.phones = {{"a", 0.0, 0.1}, {"b", 0.1, 0.2}, {"c", 0.2, 0.3}};
  u1.words = {{"abc", 0.0, 0.3}};
  Utterance u2 = u1;
  u2.id = "u2";
  GoldAlignment g({u1, u2}, default_silence_symbols());
  g.validate();
  return g;
}

}  // namespace

TEST_CASE("read_classes parses blocks") {
  TempDir tmp("cls");
  const GoldAlignment g = two_utterance_alignment();
  testutil::write_file(tmp.path("classes.txt"),
                       "Class greeting\n"
                       "u1 0.0 0.3\n"
                       "u2 0.1 0.3\n"
                       "\n"
                       "Class other\n"
                       "u2 0.0 0.2\n");
  const auto classes = read_classes(tmp.path("classes.txt"), g);
  REQUIRE(classes.size() == 2);
  CHECK(classes[0].class_id == "greeting");
  CHECK(classes[0].fragments.size() == 2);
  CHECK(classes[1].fragments.size() == 1);
}

TEST_CASE("read_classes rejections") {
  TempDir tmp("cls_bad");
  const GoldAlignment g = two_utterance_alignment();
  SUBCASE("missing blank separator") {
    testutil::write_file(tmp.path("c.txt"),
                         "Class a\nu1 0.0 0.3\nClass b\nu2 0.0 0.2\n");
    try {
      read_classes(tmp.path("c.txt"), g);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("blank line") != std::string::npos);
    }
  }
  SUBCASE("unknown utterance") {
    testutil::write_file(tmp.path("c.txt"), "Class a\nu9 0.0 0.3\n");
    CHECK_THROWS_WITH_AS(read_classes(tmp.path("c.txt"), g),
                         doctest::Contains("unknown utterance"), Error);
  }
  SUBCASE("onset >= offset") {
    testutil::write_file(tmp.path("c.txt"), "Class a\nu1 0.3 0.3\n");
    CHECK_THROWS_WITH_AS(read_classes(tmp.path("c.txt"), g),
                         doctest::Contains("onset >= offset"), Error);
  }
  SUBCASE("duplicate class id") {
    testutil::write_file(tmp.path("c.txt"),
                         "Class a\nu1 0.0 0.3\n\nClass a\nu2 0.0 0.2\n");
    CHECK_THROWS_WITH_AS(read_classes(tmp.path("c.txt"), g),
                         doctest::Contains("duplicate class id"), Error);
  }
  SUBCASE("fragment outside any block") {
    testutil::write_file(tmp.path("c.txt"), "u1 0.0 0.3\n");
    CHECK_THROWS_WITH_AS(read_classes(tmp.path("c.txt"), g),
                         doctest::Contains("outside any class"), Error);
  }
  SUBCASE("empty class block") {
    testutil::write_file(tmp.path("c.txt"),
                         "Class a\n\nClass b\nu1 0.0 0.3\n");
    CHECK_THROWS_WITH_AS(read_classes(tmp.path("c.txt"), g),
                         doctest::Contains("no fragments"), Error);
  }
}

TEST_CASE("class file round-trip") {
  TempDir tmp("cls_rt");
  const GoldAlignment g = two_utterance_alignment();
  Rng rng(5);
  std::vector<ClassGroup> classes;
  for (int c = 0; c < 6; ++c) {
    ClassGroup cls;
    cls.class_id = "c" + std::to_string(c);
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 3));
    for (int i = 0; i < n; ++i) {
      const Ticks on = rng.uniform_int(0, 2000);
      const Ticks off = rng.uniform_int(on + 1, 3000);
      cls.fragments.push_back(Fragment{rng.uniform() < 0.5 ? "u1" : "u2",
                                       from_ticks(on), from_ticks(off)});
    }
    classes.push_back(std::move(cls));
  }
  write_classes(classes, tmp.path("c1.txt"));
  const auto loaded = read_classes(tmp.path("c1.txt"), g);
  write_classes(loaded, tmp.path("c2.txt"));
  CHECK(testutil::read_file(tmp.path("c1.txt")) ==
        testutil::read_file(tmp.path("c2.txt")));
}

TEST_CASE("manifest parsing and canonical subset order") {
  TempDir tmp("man");
  const GoldAlignment g = two_utterance_alignment();
  testutil::write_file(tmp.path("m.txt"), "utt subset\nu1 120s\nu2 1s\n");
  const SubsetManifest m = read_manifest(tmp.path("m.txt"), &g);
  CHECK(m.subset_names() == std::vector<std::string>{"1s", "120s"});
  CHECK(m.utterances_in("120s") == std::vector<std::string>{"u1"});

  testutil::write_file(tmp.path("dup.txt"), "utt subset\nu1 1s\nu1 10s\n");
  CHECK_THROWS_WITH_AS(read_manifest(tmp.path("dup.txt"), &g),
                       doctest::Contains("listed twice"), Error);
  testutil::write_file(tmp.path("bad.txt"), "utt subset\nuX 1s\n");
  CHECK_THROWS_WITH_AS(read_manifest(tmp.path("bad.txt"), &g),
                       doctest::Contains("unknown utterance"), Error);
}

TEST_CASE("report JSON round-trip is exact") {
  ScoreReport r = make_report();
  r.add_config("track", "1");
  r.add_config("metric", "cosine");
  Rng rng(13);
  for (int i = 0; i < 20; ++i)
    r.metrics.push_back(MetricRow{1, "lang", i % 2 ? "1s" : "10s",
                                  "metric_" + std::to_string(i),
                                  rng.normal() * std::exp(rng.uniform(-8, 8))});
  r.pair_errors.push_back(
      PairErrorRow{"lang", "1s", "within", "a", "b", 1.0 / 3});
  EventLog log;
  log.warn("some.event", "a message");
  r.events = log.entries();

  const std::string json = r.to_json();
  const ScoreReport back = parse_report_json(json);
  CHECK(back.tool_version == r.tool_version);
  CHECK(back.config == r.config);
  REQUIRE(back.metrics.size() == r.metrics.size());
  ScoreReport sorted = r;
  sorted.sort_rows();
  for (std::size_t i = 0; i < sorted.metrics.size(); ++i) {
    CHECK(back.metrics[i].value == sorted.metrics[i].value);  // bitwise
    CHECK(back.metrics[i].name == sorted.metrics[i].name);
  }
  REQUIRE(back.pair_errors.size() == 1);
  CHECK(back.pair_errors[0].error == 1.0 / 3);
  REQUIRE(back.events.size() == 1);
  CHECK(back.events[0].key == "some.event");
}

TEST_CASE("empty report is still a valid document") {
  ScoreReport r = make_report();
  r.add_config("track", "2");
  const ScoreReport back = parse_report_json(r.to_json());
  CHECK(back.metrics.empty());
  CHECK(back.config.size() == 1);
  CHECK(r.to_csv().empty());
}

TEST_CASE("track 1 CSV layout mirrors the summary table") {
  ScoreReport r = make_report();
  for (const char* subset : {"1s", "10s", "120s"}) {
    r.metrics.push_back(MetricRow{1, "lang", subset, "abx_within_error", 0.1});
    r.metrics.push_back(MetricRow{1, "lang", subset, "abx_across_error", 0.2});
  }
  const std::string csv = r.to_csv();
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header == "language,mode,1s,10s,2min");
  CHECK(csv.find("lang,within,0.1,0.1,0.1") != std::string::npos);
  CHECK(csv.find("lang,across,0.2,0.2,0.2") != std::string::npos);
}

TEST_CASE("track 2 CSV column order") {
  ScoreReport r = make_report();
  const char* names[] = {
      "words",           "pairs",           "ned",
      "coverage",        "grouping_precision", "grouping_recall",
      "grouping_fscore", "type_precision",  "type_recall",
      "type_fscore",     "token_precision", "token_recall",
      "token_fscore",    "boundary_precision", "boundary_recall",
      "boundary_fscore"};
  double v = 1.0;
  for (const char* n : names)
    r.metrics.push_back(MetricRow{2, "lang", "all", n, v++});
  const std::string csv = r.to_csv();
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "language,words,pairs,ned,coverage,grouping_precision,grouping_recall,"
        "grouping_fscore,type_precision,type_recall,type_fscore,"
        "token_precision,token_recall,token_fscore,boundary_precision,"
        "boundary_recall,boundary_fscore");
  CHECK(csv.find("lang,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16") !=
        std::string::npos);
}

TEST_CASE("write_report emits json, csv and pair files") {
  TempDir tmp("report");
  ScoreReport r = make_report();
  r.add_config("track", "1");
  r.metrics.push_back(MetricRow{1, "lang", "1s", "abx_within_error", 0.25});
  r.pair_errors.push_back(PairErrorRow{"lang", "1s", "within", "a", "b", 0.5});
  write_report(r, tmp.path("out"));
  CHECK(testutil::read_file(tmp.path("out.json")).find("abx_within_error") !=
        std::string::npos);
  CHECK(testutil::read_file(tmp.path("out.csv")).find("language,mode") !=
        std::string::npos);
  CHECK(testutil::read_file(tmp.path("out_pairs.csv"))
            .find("language,subset,mode,phone_a,phone_b,error") !=
        std::string::npos);
}
