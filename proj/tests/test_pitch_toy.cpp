// tests/test_pitch_toy.cpp

// Copyright 2026  emovc authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <fstream>

#include "emovc/audio/manifest.hpp"
#include "emovc/audio/pitch.hpp"
#include "emovc/audio/toy.hpp"
#include "emovc/features/descriptor_oracle.hpp"
#include "testutil.hpp"

using namespace emovc;

namespace {

double median(std::vector<double> v) {
  REQUIRE(!v.empty());
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Mean A-weighted loudness over retained voiced windows of an utterance.
double mean_oracle_loudness(const Waveform &w) {
  MelExtractor ext{MelConfig{}};
  MelSpectrogram mel = ext.log_mel(w);
  F0Contour f0 = oracle_f0(w);
  VoicingMask mask = voicing_mask(f0, 0.5);
  auto windows = frame_windows(mel.values.dim(1), 8);
  auto series = oracle_descriptor_series(DescriptorKind::Loudness, mel.values,
                                         mel.center_freqs, f0.f0_hz, mask, windows);
  if (series.values.empty()) return -100.0;
  double acc = 0.0;
  for (double v : series.values) acc += v;
  return acc / static_cast<double>(series.values.size());
}

double rms(const std::vector<double> &v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("oracle_f0 finds a 200 Hz sawtooth within 2 Hz") {
  Waveform w;
  w.sample_rate = 24000;
  int n = 48000;
  w.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; i++) {
    double phase = std::fmod(200.0 * i / 24000.0, 1.0);
    w.samples[static_cast<size_t>(i)] = 0.6 * (2.0 * phase - 1.0);
  }
  F0Contour c = oracle_f0(w);
  std::vector<double> voiced;
  for (size_t t = 0; t < c.f0_hz.size(); t++)
    if (c.f0_hz[t] > 0.0) voiced.push_back(c.f0_hz[t]);
  REQUIRE(voiced.size() > c.f0_hz.size() / 2);
  CHECK(median(voiced) == Catch::Approx(200.0).margin(2.0));
}

TEST_CASE("oracle_f0 reports white noise as mostly unvoiced") {
  Rng rng(41);
  Waveform w;
  w.sample_rate = 24000;
  w.samples.resize(48000);
  for (auto &s : w.samples) s = 0.3 * rng.normal();
  F0Contour c = oracle_f0(w);
  VoicingMask m = voicing_mask(c, 0.5);
  int unvoiced = m.frames() - m.voiced_count();
  CHECK(unvoiced >= m.frames() * 9 / 10);
}

TEST_CASE("oracle_f0 on silence is all unvoiced with f0 = 0") {
  Waveform w;
  w.sample_rate = 24000;
  w.samples.assign(30000, 0.0);
  F0Contour c = oracle_f0(w);
  for (size_t t = 0; t < c.f0_hz.size(); t++) {
    CHECK(c.f0_hz[t] == 0.0);
    CHECK(c.confidence[t] == 0.0);
  }
  VoicingMask m = voicing_mask(c, 0.5);
  CHECK(m.voiced_count() == 0);
}

TEST_CASE("voicing_mask is the elementwise conjunction of f0 and confidence") {
  F0Contour c;
  c.f0_hz = {120.0, 0.0, 140.0, 150.0, 0.0};
  c.confidence = {0.9, 0.9, 0.3, 0.6, 0.2};
  VoicingMask m = voicing_mask(c, 0.5);
  std::vector<char> expect{1, 0, 0, 1, 0};
  CHECK(m.voiced == expect);
  CHECK_THROWS(voicing_mask(c, 0.0));
  CHECK_THROWS(voicing_mask(c, 1.0));

  F0Contour all_voiced;
  all_voiced.f0_hz = {100.0, 110.0};
  all_voiced.confidence = {1.0, 1.0};
  CHECK(voicing_mask(all_voiced, 0.5).voiced_count() == 2);
}

TEST_CASE("toy synthesis is bitwise deterministic in (spec, seed)") {
  Rng rng(51);
  ToySpec spec = make_toy_spec(1, Emotion::happy, rng);
  ToyUtterance a = synthesize_toy_utterance(spec, 99);
  ToyUtterance b = synthesize_toy_utterance(spec, 99);
  REQUIRE(a.wave.samples.size() == b.wave.samples.size());
  for (size_t i = 0; i < a.wave.samples.size(); i++)
    REQUIRE(a.wave.samples[i] == b.wave.samples[i]);
  CHECK(a.text == b.text);
  CHECK(a.frame_phones == b.frame_phones);

  ToyUtterance c = synthesize_toy_utterance(spec, 100);
  bool any_diff = false;
  for (size_t i = 0; i < std::min(a.wave.samples.size(), c.wave.samples.size()); i++)
    if (a.wave.samples[i] != c.wave.samples[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("toy spec validation") {
  Rng rng(52);
  ToySpec spec = make_toy_spec(0, Emotion::neutral, rng);
  spec.base_f0 = 50.0;
  CHECK_THROWS(synthesize_toy_utterance(spec, 1));
  spec.base_f0 = 120.0;
  spec.duration_s = 0.5;
  CHECK_THROWS(synthesize_toy_utterance(spec, 1));
}

TEST_CASE("anger is A-weighted louder than sad on the same seed") {
  for (uint64_t seed : {7ull, 8ull, 9ull}) {
    Rng ra(seed), rs(seed);
    ToySpec anger = make_toy_spec(2, Emotion::anger, ra);
    ToySpec sad = make_toy_spec(2, Emotion::sad, rs);
    double la = mean_oracle_loudness(synthesize_toy_utterance(anger, seed).wave);
    double ls = mean_oracle_loudness(synthesize_toy_utterance(sad, seed).wave);
    CHECK(la > ls);
  }
}

TEST_CASE("neutral has lower delta-F0 RMS than surprise") {
  for (uint64_t seed : {17ull, 18ull, 19ull}) {
    Rng rn(seed), rs(seed);
    ToySpec neutral = make_toy_spec(1, Emotion::neutral, rn);
    ToySpec surprise = make_toy_spec(1, Emotion::surprise, rs);
    auto series_of = [](const Waveform &w) {
      MelExtractor ext{MelConfig{}};
      MelSpectrogram mel = ext.log_mel(w);
      F0Contour f0 = oracle_f0(w);
      VoicingMask mask = voicing_mask(f0, 0.5);
      auto windows = frame_windows(mel.values.dim(1), 8);
      return oracle_descriptor_series(DescriptorKind::DeltaF0, mel.values,
                                      mel.center_freqs, f0.f0_hz, mask, windows);
    };
    auto sn = series_of(synthesize_toy_utterance(neutral, seed).wave);
    auto ss = series_of(synthesize_toy_utterance(surprise, seed).wave);
    REQUIRE(!sn.values.empty());
    REQUIRE(!ss.values.empty());
    CHECK(rms(sn.values) < rms(ss.values));
  }
}

TEST_CASE("loudness threshold separates extreme-arousal archetypes at >= 95% " "over 200 seeds") {
  std::vector<std::pair<double, int>> points;  // (loudness, is_anger)
  for (uint64_t seed = 0; seed < 100; seed++) {
    for (int cls = 0; cls < 2; cls++) {
      Rng rng(seed * 2 + static_cast<uint64_t>(cls));
      ToySpec spec =
          make_toy_spec(static_cast<int>(seed % kNumToySpeakers),
                        cls ? Emotion::anger : Emotion::sad, rng);
      spec.duration_s = 1.2;  // shorter clips keep the 200-seed sweep cheap
      ToyUtterance utt = synthesize_toy_utterance(spec, seed * 977 + static_cast<uint64_t>(cls));
      points.emplace_back(mean_oracle_loudness(utt.wave), cls);
    }
  }
  // best single threshold
  int best_correct = 0;
  for (const auto &[thr, unused] : points) {
    int correct = 0;
    for (const auto &[v, cls] : points) correct += ((v >= thr) == (cls == 1)) ? 1 : 0;
    best_correct = std::max(best_correct, correct);
  }
  CHECK(best_correct >= static_cast<int>(points.size() * 95 / 100));
}

TEST_CASE("manifest loads entries, flags unlabeled, remaps speakers") {
  test::TempDir tmp("manifest");
  // 10 entries, speakers {3,5,9}, 2 without labels
  std::ofstream os(tmp.str() + "/m.tsv");
  for (int i = 0; i < 10; i++) {
    std::string wav = "c" + std::to_string(i) + ".wav";
    {
      Waveform w;
      w.sample_rate = 24000;
      w.samples.assign(2000, 0.1);
      save_waveform(tmp.str() + "/" + wav, w);
    }
    int spk = (i % 3 == 0) ? 3 : (i % 3 == 1) ? 5 : 9;
    std::string emo = (i < 2) ? "-" : emotion_name(static_cast<Emotion>(i % 5));
    os << wav << "\t" << spk << "\t" << emo << "\t" << (i < 8 ? "train" : "val") << "\n";
  }
  os.close();

  DatasetManifest m = load_manifest(tmp.str() + "/m.tsv");
  REQUIRE(m.entries.size() == 10);
  CHECK(m.unlabeled_count() == 2);
  CHECK(m.num_speakers == 3);
  CHECK(m.speaker_code_of.at(3) == 0);
  CHECK(m.speaker_code_of.at(5) == 1);
  CHECK(m.speaker_code_of.at(9) == 2);
  CHECK(m.count(Split::train) == 8);
  CHECK(m.count(Split::val) == 2);

  save_speaker_map(m, tmp.str() + "/spk.tsv");
  std::ifstream check(tmp.str() + "/spk.tsv");
  std::string line;
  std::getline(check, line);
  CHECK(line == "3\t0");
}

TEST_CASE("manifest rejects unknown emotion with the line number") {
  test::TempDir tmp("manifest2");
  {
    Waveform w;
    w.sample_rate = 24000;
    w.samples.assign(2000, 0.1);
    save_waveform(tmp.str() + "/a.wav", w);
  }
  std::ofstream os(tmp.str() + "/m.tsv");
  os << "a.wav\t0\thappy\ttrain\n";
  os << "a2.wav\t0\tbored\ttrain\n";
  os.close();
  try {
    load_manifest(tmp.str() + "/m.tsv", false);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("bored") != std::string::npos);
  }
}

TEST_CASE("manifest rejects duplicates, missing paths, bad splits") {
  test::TempDir tmp("manifest3");
  {
    Waveform w;
    w.sample_rate = 24000;
    w.samples.assign(2000, 0.1);
    save_waveform(tmp.str() + "/a.wav", w);
  }
  {
    std::ofstream os(tmp.str() + "/dup.tsv");
    os << "a.wav\t0\thappy\ttrain\na.wav\t0\tsad\tval\n";
  }
  CHECK_THROWS_AS(load_manifest(tmp.str() + "/dup.tsv"), DataError);
  {
    std::ofstream os(tmp.str() + "/missing.tsv");
    os << "nope.wav\t0\thappy\ttrain\n";
  }
  CHECK_THROWS_AS(load_manifest(tmp.str() + "/missing.tsv"), DataError);
  {
    std::ofstream os(tmp.str() + "/split.tsv");
    os << "a.wav\t0\thappy\tdev\n";
  }
  CHECK_THROWS_AS(load_manifest(tmp.str() + "/split.tsv"), DataError);
  {
    std::ofstream os(tmp.str() + "/empty_path.tsv");
    os << "\t0\thappy\ttrain\n";
  }
  CHECK_THROWS_AS(load_manifest(tmp.str() + "/empty_path.tsv"), DataError);
}

TEST_CASE("toy corpus writer produces a loadable 0.8/0.1/0.1 manifest") {
  test::TempDir tmp("corpus");
  ToyCorpusConfig cfg;
  cfg.clips_per_pair = 5;
  cfg.seed = 3;
  ToyCorpusSummary s = make_toy_corpus(tmp.str(), cfg);
  CHECK(s.clips == 100);
  DatasetManifest m = load_manifest(s.manifest_path);
  CHECK(m.entries.size() == 100);
  CHECK(m.num_speakers == 4);
  CHECK(m.count(Split::train) == 80);
  CHECK(m.count(Split::val) == 10);
  CHECK(m.count(Split::test) == 10);
  CHECK(m.unlabeled_count() == 0);

  // sidecar labels align with the audio's frame count
  const auto &e = m.entries.front();
  Waveform w = load_waveform(e.audio_path);
  std::ifstream phn(e.audio_path.substr(0, e.audio_path.size() - 4) + ".phn");
  REQUIRE(phn.good());
  std::vector<int> labels;
  int v;
  while (phn >> v) labels.push_back(v);
  CHECK(static_cast<int>(labels.size()) ==
        static_cast<int>(w.samples.size()) / 300 + 1);
}
