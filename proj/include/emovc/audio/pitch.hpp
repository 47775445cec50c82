// emovc/audio/pitch.hpp

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

#ifndef EMOVC_AUDIO_PITCH_HPP
#define EMOVC_AUDIO_PITCH_HPP

#include <string>
#include <vector>

#include "emovc/audio/mel.hpp"
#include "emovc/audio/wav.hpp"

namespace emovc {

// Per-frame F0 aligned to the mel hop.  Unvoiced frames carry f0 = 0.
struct F0Contour {
  std::vector<double> f0_hz;
  std::vector<double> confidence;  // in [0, 1]

  int frames() const { return static_cast<int>(f0_hz.size()); }
};

struct VoicingMask {
  std::vector<char> voiced;
  std::string source;  // which contour produced it

  int frames() const { return static_cast<int>(voiced.size()); }
  int voiced_count() const {
    int n = 0;
    for (char v : voiced) n += v ? 1 : 0;
    return n;
  }
};

struct YinConfig {
  double f_min = 60.0;
  double f_max = 500.0;
  int window = 600;          // difference-function integration window, samples
  double threshold = 0.15;   // cumulative-mean-normalized difference dip
  double silence_rms = 1e-4;
};

// Autocorrelation-difference (YIN style) pitch tracker.  Used as the training
// target for the small F0 regressor and as the evaluation reference; the
// externally pretrained F0 network of the original system is out of scope.
inline F0Contour oracle_f0(const Waveform &w, const MelConfig &mel_cfg = MelConfig{},
                           const YinConfig &yin = YinConfig{}) {
  EMOVC_CHECK(w.sample_rate == mel_cfg.sample_rate,
              "oracle_f0: expected " << mel_cfg.sample_rate << " Hz input");
  const int sr = w.sample_rate;
  const int hop = mel_cfg.hop_length;
  const int frames = static_cast<int>(static_cast<int64_t>(w.samples.size()) / hop) + 1;
  const int tau_min = std::max(2, static_cast<int>(sr / yin.f_max));
  const int tau_max = static_cast<int>(sr / yin.f_min);
  const int need = yin.window + tau_max;

  F0Contour out;
  out.f0_hz.assign(static_cast<size_t>(frames), 0.0);
  out.confidence.assign(static_cast<size_t>(frames), 0.0);

  std::vector<double> d(static_cast<size_t>(tau_max) + 1);
  std::vector<double> cmnd(static_cast<size_t>(tau_max) + 1);
  const int64_t n = static_cast<int64_t>(w.samples.size());

  auto sample = [&](int64_t idx) -> double {
    if (idx < 0 || idx >= n) return 0.0;
    return w.samples[static_cast<size_t>(idx)];
  };

  for (int t = 0; t < frames; t++) {
    int64_t center = static_cast<int64_t>(t) * hop;
    int64_t start = center - need / 2;

    double rms = 0.0;
    for (int i = 0; i < yin.window; i++) {
      double s = sample(start + i);
      rms += s * s;
    }
    rms = std::sqrt(rms / yin.window);
    if (rms < yin.silence_rms) continue;

    d[0] = 0.0;
    for (int tau = 1; tau <= tau_max; tau++) {
      double acc = 0.0;
      for (int i = 0; i < yin.window; i++) {
        double diff = sample(start + i) - sample(start + i + tau);
        acc += diff * diff;
      }
      d[static_cast<size_t>(tau)] = acc;
    }
    cmnd[0] = 1.0;
    double running = 0.0;
    for (int tau = 1; tau <= tau_max; tau++) {
      running += d[static_cast<size_t>(tau)];
      cmnd[static_cast<size_t>(tau)] =
          running > 0.0 ? d[static_cast<size_t>(tau)] * tau / running : 1.0;
    }

    int best = -1;
    for (int tau = tau_min; tau <= tau_max; tau++) {
      if (cmnd[static_cast<size_t>(tau)] < yin.threshold) {
        while (tau + 1 <= tau_max &&
               cmnd[static_cast<size_t>(tau + 1)] < cmnd[static_cast<size_t>(tau)])
          tau++;
        best = tau;
        break;
      }
    }
    if (best < 0) {
      // no dip below threshold: report the global minimum as low confidence
      double best_v = 2.0;
      for (int tau = tau_min; tau <= tau_max; tau++)
        if (cmnd[static_cast<size_t>(tau)] < best_v) {
          best_v = cmnd[static_cast<size_t>(tau)];
          best = tau;
        }
      out.confidence[static_cast<size_t>(t)] = std::max(0.0, 1.0 - best_v);
      continue;  // stays unvoiced: f0 = 0
    }

    // parabolic refinement around the dip
    double tau_ref = best;
    if (best > tau_min && best < tau_max) {
      double a = cmnd[static_cast<size_t>(best) - 1], b = cmnd[static_cast<size_t>(best)],
             c = cmnd[static_cast<size_t>(best) + 1];
      double denom = a - 2.0 * b + c;
      if (std::abs(denom) > 1e-12) tau_ref = best + 0.5 * (a - c) / denom;
    }
    out.f0_hz[static_cast<size_t>(t)] = sr / tau_ref;
    out.confidence[static_cast<size_t>(t)] =
        std::max(0.0, 1.0 - cmnd[static_cast<size_t>(best)]);
  }
  return out;
}

// voiced[t] = (f0[t] > 0) AND (confidence[t] >= threshold).  The mask is a
// constant downstream: no gradient ever flows through it.
inline VoicingMask voicing_mask(const F0Contour &c, double conf_threshold,
                                const std::string &source = "oracle_f0") {
  EMOVC_CHECK(conf_threshold > 0.0 && conf_threshold < 1.0,
              "voicing_mask: threshold must be in (0,1)");
  VoicingMask m;
  m.source = source;
  m.voiced.resize(c.f0_hz.size());
  for (size_t i = 0; i < c.f0_hz.size(); i++)
    m.voiced[i] = (c.f0_hz[i] > 0.0 && c.confidence[i] >= conf_threshold) ? 1 : 0;
  return m;
}

}  // namespace emovc

#endif  // EMOVC_AUDIO_PITCH_HPP
