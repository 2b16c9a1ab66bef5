// test_synth.cpp
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

#include <map>
#include <set>

#include "testutil.hpp"
#include "zreval/abx.hpp"
#include "zreval/error.hpp"
#include "zreval/oracle.hpp"
#include "zreval/synth.hpp"

using namespace zreval;
using testutil::TempDir;

namespace {

SynthConfig desk_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.phone_inventory = 8;
  cfg.lexicon_size = 12;
  cfg.word_len_min = 2;
  cfg.word_len_max = 4;
  cfg.family_speakers = 2;
  cfg.family_minutes_min = 0.3;
  cfg.family_minutes_max = 0.6;
  cfg.outsider_speakers = 1;
  cfg.outsider_minutes_min = 0.2;
  cfg.outsider_minutes_max = 0.5;
  cfg.subsets = {{"1s", 0.7, 1.5, 3.0}, {"10s", 0.3, 4.0, 6.0}};
  cfg.feature_model = FeatureModel::onehot_gold;
  return cfg;
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
  const SynthConfig cfg = desk_config(2024);
  TempDir tmp("synth_det");
  write_corpus(generate(cfg), tmp.path("a"));
  write_corpus(generate(cfg), tmp.path("b"));
  for (const char* name :
       {"phones.txt", "words.txt", "classes_topline.txt", "manifest.txt",
        "synth_config.txt"}) {
    CHECK(testutil::read_file(tmp.path(std::string("a/") + name)) ==
          testutil::read_file(tmp.path(std::string("b/") + name)));
  }
  // and a different seed changes the corpus
  SynthConfig other = cfg;
  other.seed = 2025;
  TempDir tmp2("synth_det2");
  write_corpus(generate(other), tmp2.path("c"));
  CHECK(testutil::read_file(tmp.path("a/phones.txt")) !=
        testutil::read_file(tmp2.path("c/phones.txt")));
}

TEST_CASE("default config: a small high-volume family plus 10-minute "
          "outsiders") {
  // default speaker structure: 4 family speakers at 20-25 minutes each and
  // 8 outsiders at about 10 minutes each; features swapped for a cheap
  // model since only the duration structure is under test here
  SynthConfig cfg;
  cfg.feature_model = FeatureModel::random_features;
  cfg.feature_dim = 2;
  cfg.frame_period = 0.1;
  const SynthCorpus corpus = generate(cfg);
  std::map<std::string, double> speech_seconds;
  for (const auto& u : corpus.alignment.utterances())
    speech_seconds[u.speaker] += u.duration;
  double family_total = 0.0, outsider_total = 0.0;
  int family = 0, outsiders = 0;
  for (const auto& [speaker, seconds] : speech_seconds) {
    if (speaker.rfind("fam", 0) == 0) {
      ++family;
      family_total += seconds;
    } else {
      ++outsiders;
      outsider_total += seconds;
    }
  }
  CHECK(family == 4);
  CHECK(outsiders == 8);
  CHECK(family_total >= 80.0 * 60);
  CHECK(family_total <= 100.0 * 60);
  CHECK(outsider_total >= 78.0 * 60);
  CHECK(outsider_total <= 84.0 * 60);
}

TEST_CASE("family/outsider speaker totals land in the configured ranges") {
  // family-heavy default structure at one tenth scale is still checked by
  // the full-size acceptance run; here exercise the mechanics quickly
  SynthConfig cfg;
  cfg.seed = 77;
  cfg.phone_inventory = 10;
  cfg.lexicon_size = 30;
  cfg.family_speakers = 4;
  cfg.family_minutes_min = 2.0;
  cfg.family_minutes_max = 2.5;
  cfg.outsider_speakers = 8;
  cfg.outsider_minutes_min = 1.0;
  cfg.outsider_minutes_max = 1.25;
  cfg.subsets = {{"1s", 0.6, 0.8, 1.5}, {"10s", 0.3, 8.0, 12.0},
                 {"120s", 0.1, 30.0, 40.0}};
  cfg.feature_model = FeatureModel::random_features;
  cfg.feature_dim = 2;
  cfg.frame_period = 0.1;
  const SynthCorpus corpus = generate(cfg);

  std::map<std::string, double> speech_seconds;
  for (const auto& u : corpus.alignment.utterances())
    speech_seconds[u.speaker] += u.duration;
  int family = 0, outsiders = 0;
  for (const auto& [speaker, seconds] : speech_seconds) {
    if (speaker.rfind("fam", 0) == 0) {
      ++family;
      CHECK(seconds >= 2.0 * 60);
      CHECK(seconds <= 2.5 * 60);
    } else {
      ++outsiders;
      CHECK(seconds >= 1.0 * 60);
      CHECK(seconds <= 1.25 * 60);
    }
  }
  CHECK(family == 4);
  CHECK(outsiders == 8);

  // every utterance is covered by features and labeled with a subset
  for (const auto& u : corpus.alignment.utterances()) {
    CHECK(corpus.features.has(u.id));
    CHECK(corpus.manifest.subset_of.count(u.id) == 1);
    const auto& seq = corpus.features.at(u.id);
    CHECK(seq.times.back() < u.duration);
  }
}

TEST_CASE("topline classes are transcription-pure") {
  const SynthCorpus corpus = generate(desk_config(5));
  std::set<std::vector<std::string>> types;
  for (const auto& cls : corpus.topline_classes) {
    REQUIRE(!cls.fragments.empty());
    std::set<std::vector<std::string>> in_class;
    for (const auto& f : cls.fragments)
      in_class.insert(fragment_phone_transcription(f, corpus.alignment));
    CHECK(in_class.size() == 1);
    types.insert(*in_class.begin());
  }
  // distinct classes have distinct transcriptions
  CHECK(types.size() == corpus.topline_classes.size());
}

TEST_CASE("one-hot gold features give zero ABX error end to end") {
  const SynthCorpus corpus = generate(desk_config(31));
  AbxOptions options;
  EventLog log;
  const AbxResult r = run_abx(corpus.alignment, corpus.features, nullptr, true,
                              true, options, log);
  CHECK(r.has_within);
  CHECK(r.has_across);
  CHECK(r.within_error == 0.0);
  CHECK(r.across_error == 0.0);
}

TEST_CASE("abx main path matches the oracle on a synthetic corpus") {
  SynthConfig cfg = desk_config(404);
  cfg.feature_model = FeatureModel::prototype_offset;
  cfg.feature_dim = 5;
  cfg.family_minutes_min = 0.15;
  cfg.family_minutes_max = 0.4;
  cfg.outsider_speakers = 0;
  const SynthCorpus corpus = generate(cfg);
  REQUIRE(corpus.alignment.size() <= oracle::kMaxOracleUtterances);

  AbxOptions options;
  EventLog log;
  const AbxResult got = run_abx(corpus.alignment, corpus.features, nullptr,
                                true, true, options, log);
  const AbxResult want = oracle::oracle_abx(corpus.alignment, corpus.features,
                                            nullptr, FrameMetric::cosine);
  CHECK(got.cell_count == want.cell_count);
  CHECK(got.scored_triplets == want.scored_triplets);
  CHECK(std::abs(got.within_error - want.within_error) <= 1e-10);
  CHECK(std::abs(got.across_error - want.across_error) <= 1e-10);
  REQUIRE(got.within_pair_errors.size() == want.within_pair_errors.size());
  for (const auto& [pair, error] : want.within_pair_errors)
    CHECK(std::abs(got.within_pair_errors.at(pair) - error) <= 1e-10);
}

TEST_CASE("config text round-trips") {
  SynthConfig cfg = desk_config(99);
  cfg.feature_model = FeatureModel::prototype_offset;
  cfg.noise_sigma = 0.25;
  const std::string text = synth_config_text(cfg);
  const SynthConfig back = parse_synth_config_text(text);
  CHECK(back.seed == cfg.seed);
  CHECK(back.phone_inventory == cfg.phone_inventory);
  CHECK(back.lexicon_size == cfg.lexicon_size);
  CHECK(back.subsets.size() == cfg.subsets.size());
  CHECK(back.subsets[1].dur_max == cfg.subsets[1].dur_max);
  CHECK(back.feature_model == cfg.feature_model);
  CHECK(back.noise_sigma == cfg.noise_sigma);
  CHECK(synth_config_text(back) == text);
}

TEST_CASE("config parser rejects unknown keys and bad values") {
  CHECK_THROWS_WITH_AS(parse_synth_config_text("nonsense = 1\n"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(parse_synth_config_text("seed ~ 1\n"),
                       doctest::Contains("key = value"), Error);
  CHECK_THROWS_WITH_AS(parse_synth_config_text("lexicon_size = abc\n"),
                       doctest::Contains("bad integer"), Error);
  CHECK_THROWS_WITH_AS(parse_synth_config_text("subsets = 1s:0.5:2\n"),
                       doctest::Contains("name:weight"), Error);
}

TEST_CASE("inconsistent configs are rejected") {
  SUBCASE("word length vs lexicon size") {
    SynthConfig cfg = desk_config(1);
    cfg.phone_inventory = 2;
    cfg.word_len_min = cfg.word_len_max = 1;
    cfg.lexicon_size = 50;  // only 2 distinct one-phone words exist
    CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("lexicon"), Error);
  }
  SUBCASE("one-hot needs phones longer than the frame period") {
    SynthConfig cfg = desk_config(1);
    cfg.frame_period = 0.05;
    cfg.phone_dur_min = 0.04;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("phone_dur_min"), Error);
  }
  SUBCASE("speaker minute range too tight") {
    SynthConfig cfg = desk_config(1);
    cfg.family_minutes_min = cfg.family_minutes_max = 1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("slack"), Error);
  }
  SUBCASE("empty ranges") {
    SynthConfig cfg = desk_config(1);
    cfg.phone_dur_min = 0.2;
    cfg.phone_dur_max = 0.1;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}

TEST_CASE("written corpora pass validation end to end") {
  TempDir tmp("synth_valid");
  const SynthCorpus corpus = generate(desk_config(123));
  write_corpus(corpus, tmp.path("out"));
  const GoldAlignment loaded = load_alignment(
      tmp.path("out/phones.txt"), tmp.path("out/words.txt"),
      {corpus.config.silence_symbol});
  CHECK(loaded.size() == corpus.alignment.size());
  const FeatureStore features = read_features(tmp.path("out/features"));
  CHECK(features.dimension() == corpus.features.dimension());
  const auto classes =
      read_classes(tmp.path("out/classes_topline.txt"), loaded);
  CHECK(classes.size() == corpus.topline_classes.size());
  const SubsetManifest manifest =
      read_manifest(tmp.path("out/manifest.txt"), &loaded);
  CHECK(manifest.rows.size() == loaded.size());
  const SynthConfig echoed = load_synth_config(tmp.path("out/synth_config.txt"));
  CHECK(echoed.seed == corpus.config.seed);
}

TEST_CASE("random_classes produces a valid, varied submission") {
  Rng rng(314);
  const SynthCorpus corpus = generate(desk_config(314));
  const auto classes = random_classes(corpus.alignment, rng, 60);
  std::size_t fragments = 0;
  for (const auto& cls : classes) {
    CHECK(!cls.fragments.empty());
    for (const auto& f : cls.fragments) {
      CHECK_NOTHROW(resolve_fragment(f, corpus.alignment));
      ++fragments;
    }
  }
  CHECK(fragments == 60);
}
