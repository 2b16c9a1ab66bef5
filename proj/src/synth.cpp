// synth.cpp
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

#include "zreval/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zreval/error.hpp"

namespace fs = std::filesystem;

namespace zreval {

FeatureModel feature_model_from_string(const std::string& name) {
  if (name == "onehot_gold") return FeatureModel::onehot_gold;
  if (name == "prototype_offset") return FeatureModel::prototype_offset;
  if (name == "random") return FeatureModel::random_features;
  fail_invalid("unknown feature model '" + name +
               "' (expected onehot_gold, prototype_offset or random)");
}

const char* to_string(FeatureModel m) {
  switch (m) {
    case FeatureModel::onehot_gold:
      return "onehot_gold";
    case FeatureModel::prototype_offset:
      return "prototype_offset";
    default:
      return "random";
  }
}

void SynthConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail_invalid("inconsistent synth config: " + what);
  };
  check(phone_inventory >= 2, "phone_inventory must be >= 2");
  check(lexicon_size >= 1, "lexicon_size must be >= 1");
  check(word_len_min >= 1 && word_len_min <= word_len_max,
        "word length range is empty");
  check(family_speakers + outsider_speakers >= 1, "no speakers configured");
  check(family_speakers >= 0 && outsider_speakers >= 0,
        "speaker counts must be >= 0");
  check(phone_dur_min > 0 && phone_dur_min <= phone_dur_max,
        "phone duration range is empty");
  check(silence_prob >= 0.0 && silence_prob <= 1.0,
        "silence_prob outside [0, 1]");
  check(silence_dur_min > 0 && silence_dur_min <= silence_dur_max,
        "silence duration range is empty");
  check(!subsets.empty(), "no duration subsets configured");
  double smallest_dmax = 1e300;
  double total_weight = 0.0;
  for (const auto& s : subsets) {
    check(!s.name.empty(), "subset with empty name");
    check(s.weight > 0.0, "subset weight must be positive");
    check(s.dur_min > 0.0 && s.dur_min <= s.dur_max,
          "subset duration range is empty");
    smallest_dmax = std::min(smallest_dmax, s.dur_max);
    total_weight += s.weight;
  }
  check(total_weight > 0.0, "subset weights sum to zero");
  check(frame_period > 0.0, "frame_period must be positive");
  check(to_ticks(frame_period) >= 1, "frame_period below time resolution");
  check(feature_dim >= 1, "feature_dim must be >= 1");
  check(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  if (feature_model == FeatureModel::onehot_gold)
    check(phone_dur_min > frame_period,
          "one-hot features need phone_dur_min > frame_period so every phone "
          "carries at least one frame");
  // an utterance can overshoot its subset target by roughly one word plus
  // one silence; speaker minute ranges must absorb the smallest subset
  const double margin =
      word_len_max * phone_dur_max + silence_dur_max + smallest_dmax;
  auto check_minutes = [&](int n, double lo, double hi, const char* who) {
    if (n == 0) return;
    check(lo > 0 && lo <= hi, std::string(who) + " minute range is empty");
    check(hi * 60.0 - lo * 60.0 >= margin,
          std::string(who) +
              " minute range too tight to place whole utterances (needs >= " +
              std::to_string(margin) + "s of slack)");
  };
  check_minutes(family_speakers, family_minutes_min, family_minutes_max,
                "family");
  check_minutes(outsider_speakers, outsider_minutes_min, outsider_minutes_max,
                "outsider");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail_invalid("synth config: bad numeric value '" + v + "' for " + key);
  return out;
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail_invalid("synth config: bad integer value '" + v + "' for " + key);
  return out;
}

// name:weight:dur_min:dur_max, comma separated
std::vector<SubsetSpec> parse_subsets(const std::string& value) {
  std::vector<SubsetSpec> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ps(item);
    std::string p;
    while (std::getline(ps, p, ':')) parts.push_back(trim(p));
    if (parts.size() != 4)
      fail_invalid("synth config: subset entry '" + item +
                   "' must be name:weight:dur_min:dur_max");
    SubsetSpec spec;
    spec.name = parts[0];
    spec.weight = to_double(parts[1], "subsets");
    spec.dur_min = to_double(parts[2], "subsets");
    spec.dur_max = to_double(parts[3], "subsets");
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace

SynthConfig parse_synth_config_text(const std::string& text) {
  SynthConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail_invalid("synth config line " + std::to_string(lineno) +
                   ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(to_int(value, key));
    else if (key == "phone_inventory")
      cfg.phone_inventory = static_cast<int>(to_int(value, key));
    else if (key == "silence_symbol")
      cfg.silence_symbol = value;
    else if (key == "lexicon_size")
      cfg.lexicon_size = static_cast<int>(to_int(value, key));
    else if (key == "word_len_min")
      cfg.word_len_min = static_cast<int>(to_int(value, key));
    else if (key == "word_len_max")
      cfg.word_len_max = static_cast<int>(to_int(value, key));
    else if (key == "family_speakers")
      cfg.family_speakers = static_cast<int>(to_int(value, key));
    else if (key == "family_minutes_min")
      cfg.family_minutes_min = to_double(value, key);
    else if (key == "family_minutes_max")
      cfg.family_minutes_max = to_double(value, key);
    else if (key == "outsider_speakers")
      cfg.outsider_speakers = static_cast<int>(to_int(value, key));
    else if (key == "outsider_minutes_min")
      cfg.outsider_minutes_min = to_double(value, key);
    else if (key == "outsider_minutes_max")
      cfg.outsider_minutes_max = to_double(value, key);
    else if (key == "phone_dur_min")
      cfg.phone_dur_min = to_double(value, key);
    else if (key == "phone_dur_max")
      cfg.phone_dur_max = to_double(value, key);
    else if (key == "silence_prob")
      cfg.silence_prob = to_double(value, key);
    else if (key == "silence_dur_min")
      cfg.silence_dur_min = to_double(value, key);
    else if (key == "silence_dur_max")
      cfg.silence_dur_max = to_double(value, key);
    else if (key == "subsets")
      cfg.subsets = parse_subsets(value);
    else if (key == "feature_model")
      cfg.feature_model = feature_model_from_string(value);
    else if (key == "feature_dim")
      cfg.feature_dim = static_cast<int>(to_int(value, key));
    else if (key == "frame_period")
      cfg.frame_period = to_double(value, key);
    else if (key == "noise_sigma")
      cfg.noise_sigma = to_double(value, key);
    else if (key == "offset_magnitude")
      cfg.offset_magnitude = to_double(value, key);
    else
      fail_invalid("synth config line " + std::to_string(lineno) +
                   ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open synth config", path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_synth_config_text(buf.str());
}

std::string synth_config_text(const SynthConfig& cfg) {
  std::ostringstream out;
  char num[64];
  auto put = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  auto putd = [&](const char* key, double v) {
    std::snprintf(num, sizeof num, "%g", v);
    put(key, num);
  };
  put("seed", std::to_string(cfg.seed));
  put("phone_inventory", std::to_string(cfg.phone_inventory));
  put("silence_symbol", cfg.silence_symbol);
  put("lexicon_size", std::to_string(cfg.lexicon_size));
  put("word_len_min", std::to_string(cfg.word_len_min));
  put("word_len_max", std::to_string(cfg.word_len_max));
  put("family_speakers", std::to_string(cfg.family_speakers));
  putd("family_minutes_min", cfg.family_minutes_min);
  putd("family_minutes_max", cfg.family_minutes_max);
  put("outsider_speakers", std::to_string(cfg.outsider_speakers));
  putd("outsider_minutes_min", cfg.outsider_minutes_min);
  putd("outsider_minutes_max", cfg.outsider_minutes_max);
  putd("phone_dur_min", cfg.phone_dur_min);
  putd("phone_dur_max", cfg.phone_dur_max);
  putd("silence_prob", cfg.silence_prob);
  putd("silence_dur_min", cfg.silence_dur_min);
  putd("silence_dur_max", cfg.silence_dur_max);
  {
    std::ostringstream subsets;
    bool first = true;
    for (const auto& s : cfg.subsets) {
      if (!first) subsets << ',';
      first = false;
      std::snprintf(num, sizeof num, "%g:%g:%g", s.weight, s.dur_min,
                    s.dur_max);
      subsets << s.name << ':' << num;
    }
    put("subsets", subsets.str());
  }
  put("feature_model", to_string(cfg.feature_model));
  put("feature_dim", std::to_string(cfg.feature_dim));
  putd("frame_period", cfg.frame_period);
  putd("noise_sigma", cfg.noise_sigma);
  putd("offset_magnitude", cfg.offset_magnitude);
  return out.str();
}

namespace {

std::vector<std::string> make_inventory(const SynthConfig& cfg) {
  std::vector<std::string> phones;
  phones.reserve(cfg.phone_inventory);
  char buf[16];
  for (int i = 1; i <= cfg.phone_inventory; ++i) {
    std::snprintf(buf, sizeof buf, "p%02d", i);
    phones.emplace_back(buf);
  }
  return phones;
}

// Words never repeat a phone in adjacent positions (and word joins are kept
// repeat-free during generation). Adjacent identical phones would create
// triphone pairs like (a,x,x) vs (a,a,x) that collapse to the same symbol
// run, which no duration-invariant frame metric can separate; keeping the
// streams geminate-free keeps ideal features perfectly discriminative.
std::vector<std::vector<int>> make_lexicon(const SynthConfig& cfg, Rng& rng) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> lexicon;
  const std::size_t attempts_cap =
      static_cast<std::size_t>(cfg.lexicon_size) * 1000 + 1000;
  std::size_t attempts = 0;
  while (static_cast<int>(lexicon.size()) < cfg.lexicon_size) {
    if (++attempts > attempts_cap)
      fail_invalid(
          "inconsistent synth config: cannot build a lexicon of " +
          std::to_string(cfg.lexicon_size) +
          " distinct words from this inventory and word length range");
    const int len =
        static_cast<int>(rng.uniform_int(cfg.word_len_min, cfg.word_len_max));
    std::vector<int> word(len);
    for (int i = 0; i < len; ++i) {
      int p = static_cast<int>(rng.uniform_int(0, cfg.phone_inventory - 1));
      while (i > 0 && p == word[i - 1])
        p = static_cast<int>(rng.uniform_int(0, cfg.phone_inventory - 1));
      word[i] = p;
    }
    if (seen.insert(word).second) lexicon.push_back(std::move(word));
  }
  return lexicon;
}

Ticks draw_dur_ticks(Rng& rng, double lo, double hi) {
  return std::max<Ticks>(1, to_ticks(rng.uniform(lo, hi)));
}

struct FeatureGen {
  const SynthConfig& cfg;
  // symbol order: silence first, then the inventory
  std::vector<FrameVector> prototypes;  // prototype_offset model
  std::vector<FrameVector> offsets;     // per speaker, in creation order

  int onehot_dim() const { return cfg.phone_inventory + 1; }
};

}  // namespace

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  const auto inventory = make_inventory(cfg);
  const auto lexicon = make_lexicon(cfg, rng);

  char buf[64];
  std::vector<std::string> word_names(lexicon.size());
  for (std::size_t w = 0; w < lexicon.size(); ++w) {
    std::snprintf(buf, sizeof buf, "w%03zu", w + 1);
    word_names[w] = buf;
  }

  struct Speaker {
    std::string name;
    double minutes_min, minutes_max;
  };
  std::vector<Speaker> speakers;
  for (int i = 1; i <= cfg.family_speakers; ++i) {
    std::snprintf(buf, sizeof buf, "fam%02d", i);
    speakers.push_back({buf, cfg.family_minutes_min, cfg.family_minutes_max});
  }
  for (int i = 1; i <= cfg.outsider_speakers; ++i) {
    std::snprintf(buf, sizeof buf, "out%02d", i);
    speakers.push_back(
        {buf, cfg.outsider_minutes_min, cfg.outsider_minutes_max});
  }

  FeatureGen fg{cfg, {}, {}};
  if (cfg.feature_model == FeatureModel::prototype_offset) {
    // unit-norm prototype per symbol (silence + inventory), fixed offset per
    // speaker; generated up front in a fixed order for determinism
    for (int s = 0; s < cfg.phone_inventory + 1; ++s) {
      FrameVector proto(cfg.feature_dim);
      double n2 = 0.0;
      for (double& v : proto) {
        v = rng.normal();
        n2 += v * v;
      }
      const double inv = n2 > 0 ? 1.0 / std::sqrt(n2) : 1.0;
      for (double& v : proto) v *= inv;
      fg.prototypes.push_back(std::move(proto));
    }
    for (std::size_t s = 0; s < speakers.size(); ++s) {
      FrameVector off(cfg.feature_dim);
      double n2 = 0.0;
      for (double& v : off) {
        v = rng.normal();
        n2 += v * v;
      }
      const double scale =
          n2 > 0 ? cfg.offset_magnitude / std::sqrt(n2) : 0.0;
      for (double& v : off) v *= scale;
      fg.offsets.push_back(std::move(off));
    }
  }

  // symbol -> one-hot/prototype index (silence = 0)
  std::map<std::string, int> symbol_index;
  symbol_index[cfg.silence_symbol] = 0;
  for (std::size_t i = 0; i < inventory.size(); ++i)
    symbol_index[inventory[i]] = static_cast<int>(i) + 1;

  const Ticks frame_ticks = to_ticks(cfg.frame_period);

  std::vector<Utterance> utterances;
  FeatureStore features;
  SubsetManifest manifest;
  std::map<std::string, std::vector<Fragment>> topline;  // word name -> tokens

  for (std::size_t si = 0; si < speakers.size(); ++si) {
    const Speaker& spk = speakers[si];
    const Ticks min_ticks = to_ticks(spk.minutes_min * 60.0);
    const Ticks max_ticks = to_ticks(spk.minutes_max * 60.0);
    const Ticks target =
        min_ticks + static_cast<Ticks>(rng.uniform() *
                                       static_cast<double>(max_ticks - min_ticks));
    const Ticks overshoot_margin =
        to_ticks(cfg.word_len_max * cfg.phone_dur_max + cfg.silence_dur_max);

    Ticks total = 0;
    int utt_seq = 0;
    while (total < target) {
      // subsets that still fit under the speaker's cap
      std::vector<const SubsetSpec*> allowed;
      double allowed_weight = 0.0;
      for (const auto& sub : cfg.subsets) {
        if (to_ticks(sub.dur_max) + overshoot_margin <= max_ticks - total) {
          allowed.push_back(&sub);
          allowed_weight += sub.weight;
        }
      }
      if (allowed.empty()) break;
      const SubsetSpec* subset = allowed.back();
      {
        double pick = rng.uniform() * allowed_weight;
        for (const auto* sub : allowed) {
          if (pick < sub->weight) {
            subset = sub;
            break;
          }
          pick -= sub->weight;
        }
      }

      Utterance u;
      std::snprintf(buf, sizeof buf, "%s-%04d", spk.name.c_str(), ++utt_seq);
      u.id = buf;
      u.speaker = spk.name;

      const Ticks utt_target = to_ticks(rng.uniform(subset->dur_min, subset->dur_max));
      Ticks t = 0;
      auto add_silence = [&]() {
        const Ticks d =
            draw_dur_ticks(rng, cfg.silence_dur_min, cfg.silence_dur_max);
        u.phones.push_back(PhoneSegment{cfg.silence_symbol, from_ticks(t),
                                        from_ticks(t + d)});
        t += d;
      };
      if (rng.uniform() < cfg.silence_prob) add_silence();
      while (t < utt_target) {
        // keep word joins repeat-free: redraw against the previous phone,
        // separating with silence when the lexicon leaves no other choice
        std::size_t w = rng.index(lexicon.size());
        if (!u.phones.empty() &&
            u.phones.back().phone == inventory[lexicon[w].front()]) {
          bool found = false;
          for (int attempt = 0; attempt < 20; ++attempt) {
            w = rng.index(lexicon.size());
            if (u.phones.back().phone != inventory[lexicon[w].front()]) {
              found = true;
              break;
            }
          }
          if (!found) add_silence();
        }
        const Ticks word_start = t;
        for (int p : lexicon[w]) {
          const Ticks d =
              draw_dur_ticks(rng, cfg.phone_dur_min, cfg.phone_dur_max);
          u.phones.push_back(
              PhoneSegment{inventory[p], from_ticks(t), from_ticks(t + d)});
          t += d;
        }
        u.words.push_back(
            WordSegment{word_names[w], from_ticks(word_start), from_ticks(t)});
        topline[word_names[w]].push_back(
            Fragment{u.id, from_ticks(word_start), from_ticks(t)});
        if (t < utt_target && rng.uniform() < cfg.silence_prob) add_silence();
      }
      u.duration = from_ticks(t);
      total += t;

      // features covering [0, duration)
      FeatureSequence seq;
      seq.utterance = u.id;
      std::size_t phone_cursor = 0;
      for (Ticks ft = frame_ticks / 2; ft < t; ft += frame_ticks) {
        seq.times.push_back(from_ticks(ft));
        while (phone_cursor + 1 < u.phones.size() &&
               to_ticks(u.phones[phone_cursor].end) <= ft)
          ++phone_cursor;
        const int sym = symbol_index.at(u.phones[phone_cursor].phone);
        FrameVector frame;
        switch (cfg.feature_model) {
          case FeatureModel::onehot_gold: {
            frame.assign(fg.onehot_dim(), 0.0);
            frame[sym] = 1.0;
            break;
          }
          case FeatureModel::prototype_offset: {
            frame.resize(cfg.feature_dim);
            const FrameVector& proto = fg.prototypes[sym];
            const FrameVector& off = fg.offsets[si];
            for (int k = 0; k < cfg.feature_dim; ++k)
              frame[k] = proto[k] + off[k] + cfg.noise_sigma * rng.normal();
            break;
          }
          case FeatureModel::random_features: {
            frame.resize(cfg.feature_dim);
            for (double& v : frame) v = rng.normal();
            break;
          }
        }
        seq.frames.push_back(std::move(frame));
      }
      features.add(std::move(seq));
      manifest.rows.emplace_back(u.id, subset->name);
      manifest.subset_of.emplace(u.id, subset->name);
      utterances.push_back(std::move(u));
    }
  }

  SynthCorpus corpus;
  corpus.alignment =
      GoldAlignment(std::move(utterances), {cfg.silence_symbol});
  corpus.alignment.validate();  // generator output must satisfy every invariant
  corpus.features = std::move(features);
  for (auto& [word, fragments] : topline)
    corpus.topline_classes.push_back(ClassGroup{word, std::move(fragments)});
  corpus.manifest = std::move(manifest);
  corpus.config = cfg;
  return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path root(dir);
  write_alignment(corpus.alignment, (root / "phones.txt").string(),
                  (root / "words.txt").string());
  write_features(corpus.features, (root / "features").string());
  write_classes(corpus.topline_classes,
                (root / "classes_topline.txt").string());
  write_manifest(corpus.manifest, (root / "manifest.txt").string());
  std::ofstream cfg_out(root / "synth_config.txt");
  if (!cfg_out) fail_io("cannot write synth config echo", dir);
  cfg_out << synth_config_text(corpus.config);
}

std::vector<ClassGroup> random_classes(const GoldAlignment& g, Rng& rng,
                                       std::size_t n_fragments) {
  const auto utterances = g.utterances();
  if (utterances.empty()) fail_invalid("random_classes: empty alignment");
  std::vector<Fragment> fragments;
  fragments.reserve(n_fragments);
  while (fragments.size() < n_fragments) {
    const Utterance& u = utterances[rng.index(utterances.size())];
    const double pick = rng.uniform();
    if (pick < 0.2 && !fragments.empty()) {
      // duplicate an existing fragment's coordinates
      fragments.push_back(fragments[rng.index(fragments.size())]);
      continue;
    }
    if (pick < 0.6 && !u.words.empty()) {
      // span of 1..3 consecutive gold words
      const std::size_t i = rng.index(u.words.size());
      const std::size_t j = std::min<std::size_t>(
          u.words.size() - 1, i + static_cast<std::size_t>(rng.uniform_int(0, 2)));
      fragments.push_back(
          Fragment{u.id, u.words[i].start, u.words[j].end});
      continue;
    }
    // arbitrary interval on the tick lattice
    const Ticks dur = to_ticks(u.duration);
    if (dur < 2) continue;
    const Ticks on = rng.uniform_int(0, dur - 2);
    const Ticks max_len = std::min<Ticks>(dur - on, 20000);
    const Ticks len = rng.uniform_int(1, max_len);
    fragments.push_back(Fragment{u.id, from_ticks(on), from_ticks(on + len)});
  }

  std::vector<ClassGroup> classes;
  std::size_t i = 0;
  int class_seq = 0;
  char buf[32];
  while (i < fragments.size()) {
    const std::size_t size = std::min<std::size_t>(
        fragments.size() - i, static_cast<std::size_t>(rng.uniform_int(1, 5)));
    std::snprintf(buf, sizeof buf, "c%04d", ++class_seq);
    ClassGroup cls;
    cls.class_id = buf;
    cls.fragments.assign(fragments.begin() + i, fragments.begin() + i + size);
    classes.push_back(std::move(cls));
    i += size;
  }
  return classes;
}

}  // namespace zreval
