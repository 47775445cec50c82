// emovc/audio/toy.hpp

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

// Deterministic synthetic speech corpus.  Four "speakers" (formant sets and
// pitch registers) times five emotion archetypes whose prosody is separable
// by construction: high-arousal archetypes are loud with large F0 movement,
// low-arousal ones are quiet and flat.  Utterances carry per-frame phone
// labels and a text transcript, which is what the linguistic stand-in and the
// character-error-rate metric consume.

#ifndef EMOVC_AUDIO_TOY_HPP
#define EMOVC_AUDIO_TOY_HPP

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "emovc/audio/mel.hpp"
#include "emovc/audio/wav.hpp"
#include "emovc/core/rng.hpp"

namespace emovc {

enum class Emotion { happy = 0, sad = 1, anger = 2, neutral = 3, surprise = 4 };
constexpr int kNumEmotions = 5;

inline const char *emotion_name(Emotion e) {
  switch (e) {
    case Emotion::happy: return "happy";
    case Emotion::sad: return "sad";
    case Emotion::anger: return "anger";
    case Emotion::neutral: return "neutral";
    case Emotion::surprise: return "surprise";
  }
  return "?";
}

// Returns -1 for unknown names.
inline int parse_emotion(const std::string &s) {
  for (int i = 0; i < kNumEmotions; i++)
    if (s == emotion_name(static_cast<Emotion>(i))) return i;
  return -1;
}

// Phone inventory: index 0 is silence, the rest are voiced timbres defined by
// formant multipliers against the speaker's formant set.
constexpr int kNumPhones = 12;
inline const char *phone_chars() { return "_aeiouywmnlr"; }

struct ToySpec {
  int speaker_id = 0;
  Emotion emotion = Emotion::neutral;
  double base_f0 = 120.0;            // Hz
  double drift_oct = 0.1;            // slow random F0 movement, octaves
  double vib_rate_hz = 4.5;
  double vib_depth_oct = 0.02;
  double sweep_oct = 0.0;            // linear glide over the utterance
  double loud_lo = 0.15, loud_hi = 0.25;  // per-phone amplitude range
  double tilt_db_oct = 0.0;          // spectral tilt on top of the speaker's
  double noise_gain = 0.01;
  double rate_scale = 1.0;           // phone duration scale
  std::array<double, 3> formants{700.0, 1200.0, 2500.0};
  double duration_s = 2.6;
  int sample_rate = 24000;
};

struct ToyUtterance {
  Waveform wave;
  int speaker_id = 0;
  Emotion emotion = Emotion::neutral;
  std::vector<int> frame_phones;  // one symbol id per mel frame
  std::string text;               // collapsed non-silence phone characters
};

namespace toy_detail {

struct SpeakerArchetype {
  double base_f0;
  std::array<double, 3> formants;
  double tilt_db_oct;
  char gender;
};

inline const std::array<SpeakerArchetype, 4> &speaker_archetypes() {
  static const std::array<SpeakerArchetype, 4> table = {{
      {112.0, {620.0, 1150.0, 2400.0}, -1.0, 'm'},
      {140.0, {680.0, 1250.0, 2550.0}, -2.0, 'm'},
      {205.0, {750.0, 1350.0, 2700.0}, 0.0, 'f'},
      {248.0, {820.0, 1450.0, 2850.0}, 1.0, 'f'},
  }};
  return table;
}

struct EmotionArchetype {
  double drift_oct, vib_rate, vib_depth, sweep_oct;
  double loud_lo, loud_hi, tilt_db_oct, noise_gain, rate_scale;
};

// Arousal ordering by loudness: anger > happy ~ surprise > neutral > sad,
// with anger and sad separated by >14 dB so a single threshold splits them.
inline const std::array<EmotionArchetype, kNumEmotions> &emotion_archetypes() {
  static const std::array<EmotionArchetype, kNumEmotions> table = {{
      /* happy    */ {0.28, 5.5, 0.035, 0.10, 0.30, 0.40, 2.5, 0.012, 1.12},
      /* sad      */ {0.05, 3.8, 0.010, -0.06, 0.06, 0.10, -4.0, 0.010, 0.85},
      /* anger    */ {0.32, 5.0, 0.030, 0.02, 0.55, 0.75, 5.0, 0.030, 1.05},
      /* neutral  */ {0.07, 4.4, 0.012, 0.00, 0.16, 0.22, 0.0, 0.010, 1.00},
      /* surprise */ {0.18, 6.5, 0.050, 0.55, 0.26, 0.36, 1.0, 0.012, 1.08},
  }};
  return table;
}

// Formant multipliers per voiced phone (indices 1..11), plus a level scale.
struct PhoneTimbre {
  std::array<double, 3> mul;
  double level;
};

inline const std::array<PhoneTimbre, kNumPhones> &phone_timbres() {
  static const std::array<PhoneTimbre, kNumPhones> table = {{
      {{1.0, 1.0, 1.0}, 0.0},     // silence (unused)
      {{1.00, 1.00, 1.00}, 1.0},  // a
      {{0.75, 1.45, 1.05}, 1.0},  // e
      {{0.45, 1.80, 1.15}, 1.0},  // i
      {{0.70, 0.75, 0.95}, 1.0},  // o
      {{0.50, 0.62, 0.90}, 1.0},  // u
      {{0.55, 1.55, 1.20}, 0.9},  // y
      {{0.48, 0.68, 0.85}, 0.8},  // w
      {{0.40, 0.90, 0.70}, 0.6},  // m
      {{0.42, 1.10, 0.75}, 0.6},  // n
      {{0.60, 0.95, 1.10}, 0.9},  // l
      {{0.65, 0.85, 1.30}, 0.9},  // r
  }};
  return table;
}

inline double formant_envelope(double f, const std::array<double, 3> &formants,
                               const std::array<double, 3> &mul) {
  static const double bw[3] = {90.0, 130.0, 220.0};
  double acc = 0.02;
  for (int j = 0; j < 3; j++) {
    double fc = formants[static_cast<size_t>(j)] * mul[static_cast<size_t>(j)];
    double d = (f - fc) / bw[j];
    acc += 1.0 / (1.0 + d * d);
  }
  return acc;
}

}  // namespace toy_detail

inline ToySpec make_toy_spec(int speaker_id, Emotion emotion, Rng &rng,
                             int sample_rate = 24000) {
  const auto &spk = toy_detail::speaker_archetypes().at(static_cast<size_t>(speaker_id));
  const auto &emo = toy_detail::emotion_archetypes().at(static_cast<size_t>(emotion));
  ToySpec s;
  s.speaker_id = speaker_id;
  s.emotion = emotion;
  s.base_f0 = spk.base_f0 * std::pow(2.0, rng.uniform(-0.05, 0.05));
  s.formants = spk.formants;
  s.drift_oct = emo.drift_oct;
  s.vib_rate_hz = emo.vib_rate;
  s.vib_depth_oct = emo.vib_depth;
  s.sweep_oct = emo.sweep_oct;
  s.loud_lo = emo.loud_lo;
  s.loud_hi = emo.loud_hi;
  s.tilt_db_oct = spk.tilt_db_oct + emo.tilt_db_oct;
  s.noise_gain = emo.noise_gain;
  s.rate_scale = emo.rate_scale;
  s.duration_s = rng.uniform(2.4, 3.0);
  s.sample_rate = sample_rate;
  return s;
}

// Pure function of (spec, seed): same inputs give bit-identical output.
inline ToyUtterance synthesize_toy_utterance(const ToySpec &spec, uint64_t seed,
                                             int hop_length = 300) {
  EMOVC_CHECK(spec.base_f0 >= 70.0 && spec.base_f0 <= 400.0,
              "synthesize_toy_utterance: base F0 out of [70, 400] Hz");
  EMOVC_CHECK(spec.duration_s >= 1.0 && spec.duration_s <= 4.0,
              "synthesize_toy_utterance: duration out of [1, 4] s");
  Rng rng(seed);
  const int sr = spec.sample_rate;
  const int64_t n = static_cast<int64_t>(std::llround(spec.duration_s * sr));

  // phone plan: optional edge silences around 5-7 voiced phones
  struct Seg {
    int phone;
    int64_t begin, end;
  };
  std::vector<Seg> segs;
  {
    std::vector<int> phones;
    std::vector<double> durs;
    double sil = rng.uniform(0.06, 0.12);
    phones.push_back(0);
    durs.push_back(sil);
    int n_voiced = 5 + static_cast<int>(rng.uniform_int(3));
    for (int i = 0; i < n_voiced; i++) {
      phones.push_back(1 + static_cast<int>(rng.uniform_int(kNumPhones - 1)));
      durs.push_back(rng.uniform(0.22, 0.42) / spec.rate_scale);
    }
    phones.push_back(0);
    durs.push_back(rng.uniform(0.06, 0.12));
    double total = 0.0;
    for (double d : durs) total += d;
    double scale = spec.duration_s / total;
    int64_t cursor = 0;
    for (size_t i = 0; i < phones.size(); i++) {
      int64_t len = static_cast<int64_t>(std::llround(durs[i] * scale * sr));
      int64_t end = std::min<int64_t>(cursor + len, n);
      if (i + 1 == phones.size()) end = n;
      segs.push_back({phones[i], cursor, end});
      cursor = end;
    }
  }

  // per-phone loudness targets
  std::vector<double> seg_amp(segs.size());
  for (size_t i = 0; i < segs.size(); i++)
    seg_amp[i] = segs[i].phone == 0
                     ? 0.0
                     : rng.uniform(spec.loud_lo, spec.loud_hi) *
                           toy_detail::phone_timbres()[static_cast<size_t>(segs[i].phone)].level;

  // F0 drift components
  double d_f1 = rng.uniform(0.4, 0.9), d_f2 = rng.uniform(1.1, 1.9);
  double d_p1 = rng.uniform(0.0, 2.0 * M_PI), d_p2 = rng.uniform(0.0, 2.0 * M_PI);
  double vib_phase = rng.uniform(0.0, 2.0 * M_PI);

  const int ramp = sr / 40;  // 25 ms amplitude/timbre transitions
  const int max_harm = 48;

  ToyUtterance utt;
  utt.speaker_id = spec.speaker_id;
  utt.emotion = spec.emotion;
  utt.wave.sample_rate = sr;
  utt.wave.samples.assign(static_cast<size_t>(n), 0.0);

  std::vector<double> theta(static_cast<size_t>(max_harm) + 1, 0.0);
  size_t seg_idx = 0;
  const auto &timbres = toy_detail::phone_timbres();

  for (int64_t i = 0; i < n; i++) {
    while (seg_idx + 1 < segs.size() && i >= segs[seg_idx].end) seg_idx++;
    const Seg &seg = segs[seg_idx];
    double tsec = static_cast<double>(i) / sr;

    // envelope with linear ramps at segment edges
    double amp = seg_amp[seg_idx];
    {
      int64_t into = i - seg.begin, left = seg.end - i;
      double prev = seg_idx > 0 ? seg_amp[seg_idx - 1] : 0.0;
      double next = seg_idx + 1 < segs.size() ? seg_amp[seg_idx + 1] : 0.0;
      if (into < ramp) amp = prev + (amp - prev) * static_cast<double>(into) / ramp;
      else if (left < ramp) amp = next + (amp - next) * static_cast<double>(left) / ramp;
    }

    double oct = spec.drift_oct * (std::sin(2.0 * M_PI * d_f1 * tsec + d_p1) +
                                   0.5 * std::sin(2.0 * M_PI * d_f2 * tsec + d_p2)) /
                     1.5 +
                 spec.vib_depth_oct * std::sin(2.0 * M_PI * spec.vib_rate_hz * tsec + vib_phase) +
                 spec.sweep_oct * (tsec / spec.duration_s - 0.5);
    double f0 = spec.base_f0 * std::pow(2.0, oct);

    double s = 0.0;
    if (amp > 1e-6) {
      const auto &tim = timbres[static_cast<size_t>(seg.phone == 0 ? 1 : seg.phone)];
      double norm = 0.0, raw = 0.0;
      int kmax = std::min(max_harm, static_cast<int>(11000.0 / f0));
      for (int k = 1; k <= kmax; k++) {
        double f = k * f0;
        double a = toy_detail::formant_envelope(f, spec.formants, tim.mul) *
                   std::pow(10.0, spec.tilt_db_oct * std::log2(f / 200.0) / 20.0);
        theta[static_cast<size_t>(k)] += 2.0 * M_PI * f / sr;
        if (theta[static_cast<size_t>(k)] > 2.0 * M_PI)
          theta[static_cast<size_t>(k)] -= 2.0 * M_PI * std::floor(theta[static_cast<size_t>(k)] / (2.0 * M_PI));
        raw += a * std::sin(theta[static_cast<size_t>(k)]);
        norm += a * a;
      }
      if (norm > 1e-12) s = amp * raw / std::sqrt(2.0 * norm);
    }
    s += spec.noise_gain * (amp + 0.05) * rng.normal();
    utt.wave.samples[static_cast<size_t>(i)] = s;
  }

  // peak-safe normalization (keeps relative loudness archetypes intact)
  double peak = 0.0;
  for (double s : utt.wave.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.99)
    for (double &s : utt.wave.samples) s *= 0.99 / peak;

  // frame labels at frame centers + collapsed transcript
  int frames = static_cast<int>(n / hop_length) + 1;
  utt.frame_phones.resize(static_cast<size_t>(frames));
  for (int t = 0; t < frames; t++) {
    int64_t center = std::min<int64_t>(static_cast<int64_t>(t) * hop_length, n - 1);
    int phone = 0;
    for (const Seg &seg : segs)
      if (center >= seg.begin && center < seg.end) {
        phone = seg.phone;
        break;
      }
    utt.frame_phones[static_cast<size_t>(t)] = phone;
  }
  for (const Seg &seg : segs)
    if (seg.phone != 0 && seg.end > seg.begin) utt.text.push_back(phone_chars()[seg.phone]);

  return utt;
}

inline char toy_speaker_gender(int speaker_id) {
  return toy_detail::speaker_archetypes().at(static_cast<size_t>(speaker_id)).gender;
}

constexpr int kNumToySpeakers = 4;

// ---------------------------------------------------------------------------
// Corpus writer
// ---------------------------------------------------------------------------

struct ToyCorpusConfig {
  int clips_per_pair = 5;  // clips per (speaker, emotion)
  uint64_t seed = 1;
  int sample_rate = 24000;
  int hop_length = 300;
  double unlabeled_fraction = 0.0;  // semi-supervised corpora
};

struct ToyCorpusSummary {
  std::string manifest_path;
  int clips = 0;
};

// Writes wav/ + sidecar labels + manifest.tsv + speakers.tsv under `dir`.
// Split policy: per (speaker, emotion) group the first clips go to train and
// the last alternates val/test, giving the 0.8/0.1/0.1 layout at the default
// five clips per group.
inline ToyCorpusSummary make_toy_corpus(const std::string &dir, const ToyCorpusConfig &cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "wav");
  std::ofstream manifest(fs::path(dir) / "manifest.tsv");
  EMOVC_CHECK(manifest.good(), "make_toy_corpus: cannot write manifest in " << dir);
  std::ofstream spkfile(fs::path(dir) / "speakers.tsv");
  Rng corpus_rng(cfg.seed);

  ToyCorpusSummary summary;
  int group_counter = 0;
  for (int spk = 0; spk < kNumToySpeakers; spk++) {
    spkfile << spk << "\t" << toy_speaker_gender(spk) << "\n";
    for (int e = 0; e < kNumEmotions; e++) {
      group_counter++;
      for (int i = 0; i < cfg.clips_per_pair; i++) {
        Rng spec_rng = corpus_rng.fork("spec_" + std::to_string(spk) + "_" +
                                       std::to_string(e) + "_" + std::to_string(i));
        ToySpec spec = make_toy_spec(spk, static_cast<Emotion>(e), spec_rng, cfg.sample_rate);
        uint64_t utt_seed = fnv1a64("utt") ^ (cfg.seed * 0x9e3779b97f4a7c15ull) ^
                            (static_cast<uint64_t>(spk) << 32) ^
                            (static_cast<uint64_t>(e) << 16) ^ static_cast<uint64_t>(i);
        ToyUtterance utt = synthesize_toy_utterance(spec, utt_seed, cfg.hop_length);

        std::string base = "spk" + std::to_string(spk) + "_" +
                           emotion_name(static_cast<Emotion>(e)) + "_" + std::to_string(i);
        std::string wav_rel = "wav/" + base + ".wav";
        save_waveform((fs::path(dir) / wav_rel).string(), utt.wave);
        {
          std::ofstream phn(fs::path(dir) / ("wav/" + base + ".phn"));
          for (size_t t = 0; t < utt.frame_phones.size(); t++)
            phn << (t ? " " : "") << utt.frame_phones[t];
          phn << "\n";
          std::ofstream txt(fs::path(dir) / ("wav/" + base + ".txt"));
          txt << utt.text << "\n";
        }
        const char *split = "train";
        if (i == cfg.clips_per_pair - 1 && cfg.clips_per_pair >= 3)
          split = (group_counter % 2 == 0) ? "val" : "test";
        bool labeled = corpus_rng.uniform() >= cfg.unlabeled_fraction;
        manifest << wav_rel << "\t" << spk << "\t"
                 << (labeled ? emotion_name(static_cast<Emotion>(e)) : "-") << "\t"
                 << split << "\n";
        summary.clips++;
      }
    }
  }
  summary.manifest_path = (fs::path(dir) / "manifest.tsv").string();
  return summary;
}

}  // namespace emovc

#endif  // EMOVC_AUDIO_TOY_HPP
