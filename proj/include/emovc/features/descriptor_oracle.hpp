// emovc/features/descriptor_oracle.hpp

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

// Brute-force reference implementations of the four acoustic descriptors.
// These share no computation kernels with the differentiable path in
// descriptors.hpp: moments are accumulated in direct two-pass loops on the
// band axis rather than through the raw-moment matmul route, so the two
// routes agreeing is a real check and not a tautology.  The evaluation
// harness also uses these as plain-value features (SVM functionals,
// voiceprints).

#ifndef EMOVC_FEATURES_DESCRIPTOR_ORACLE_HPP
#define EMOVC_FEATURES_DESCRIPTOR_ORACLE_HPP

#include <string>
#include <vector>

#include "emovc/audio/pitch.hpp"
#include "emovc/audio/windows.hpp"
#include "emovc/core/tensor.hpp"
#include "emovc/features/aweighting.hpp"

namespace emovc {

enum class DescriptorKind { SpectralCentroid = 0, SpectralKurtosis = 1, Loudness = 2, DeltaF0 = 3 };
constexpr int kNumDescriptorKinds = 4;

inline const char *descriptor_name(DescriptorKind k) {
  switch (k) {
    case DescriptorKind::SpectralCentroid: return "centroid";
    case DescriptorKind::SpectralKurtosis: return "kurtosis";
    case DescriptorKind::Loudness: return "loudness";
    case DescriptorKind::DeltaF0: return "delta_f0";
  }
  return "?";
}

inline int parse_descriptor(const std::string &s) {
  for (int i = 0; i < kNumDescriptorKinds; i++)
    if (s == descriptor_name(static_cast<DescriptorKind>(i))) return i;
  return -1;
}

// One value per retained window.  window_indices refer back to the full
// WindowSequence the series was computed from.
struct DescriptorSeries {
  DescriptorKind kind = DescriptorKind::SpectralCentroid;
  std::vector<double> values;
  std::vector<int> window_indices;
  WindowSequence window_map;  // the retained windows themselves
};

constexpr double kDescriptorEps = 1e-8;
constexpr double kLoudnessFloor = 1e-5;
constexpr double kF0LogFloor = 1e-2;  // Hz floor inside ln(f0)

// Windows are retained when at least half their frames are voiced.
inline bool window_retained(const VoicingMask &mask, int begin, int end) {
  int v = 0;
  for (int t = begin; t < end; t++) v += mask.voiced[static_cast<size_t>(t)] ? 1 : 0;
  return 2 * v >= (end - begin);
}

namespace oracle {

// Window-summed band energies from a log-mel block: E_b = sum_t exp(m[b,t]).
inline std::vector<double> band_energies(const Tensor<double> &log_mel, int begin, int end) {
  int n_mels = log_mel.dim(0);
  std::vector<double> e(static_cast<size_t>(n_mels), 0.0);
  for (int b = 0; b < n_mels; b++)
    for (int t = begin; t < end; t++) e[static_cast<size_t>(b)] += std::exp(log_mel.at(b, t));
  return e;
}

inline double spectral_centroid(const std::vector<double> &energy,
                                const std::vector<double> &center_freqs) {
  double num = 0.0, den = 0.0;
  for (size_t b = 0; b < energy.size(); b++) {
    num += center_freqs[b] * energy[b];
    den += energy[b];
  }
  return num / (den + kDescriptorEps);
}

// Fourth standardized moment, computed two-pass around the mean (the
// differentiable route expands raw moments instead).
inline double spectral_kurtosis(const std::vector<double> &energy,
                                const std::vector<double> &center_freqs) {
  double den = 0.0;
  for (double e : energy) den += e;
  den += kDescriptorEps;
  double mu = 0.0;
  for (size_t b = 0; b < energy.size(); b++) mu += center_freqs[b] * energy[b];
  mu /= den;
  double m2 = 0.0, m4 = 0.0;
  for (size_t b = 0; b < energy.size(); b++) {
    double d = center_freqs[b] - mu;
    m2 += d * d * energy[b];
    m4 += d * d * d * d * energy[b];
  }
  m2 /= den;
  m4 /= den;
  double s2 = m2 + kDescriptorEps;
  return m4 / (s2 * s2);
}

inline double loudness_db(const std::vector<double> &energy,
                          const std::vector<double> &center_freqs) {
  double acc = 0.0;
  for (size_t b = 0; b < energy.size(); b++)
    acc += a_weight_energy_gain(center_freqs[b]) * energy[b];
  return 10.0 * std::log10(acc + kLoudnessFloor);
}

// Mean of first differences of ln(f0) over voiced frame pairs in the window.
// Returns false when the window has no voiced pair (caller drops it).
inline bool delta_f0(const std::vector<double> &f0, const VoicingMask &mask, int begin,
                     int end, double *out) {
  double acc = 0.0;
  int count = 0;
  int voiced = 0;
  for (int t = begin; t < end; t++) voiced += mask.voiced[static_cast<size_t>(t)] ? 1 : 0;
  if (voiced < 2) return false;
  for (int t = begin; t + 1 < end; t++) {
    if (!mask.voiced[static_cast<size_t>(t)] || !mask.voiced[static_cast<size_t>(t) + 1]) continue;
    acc += std::log(std::max(f0[static_cast<size_t>(t) + 1], kF0LogFloor)) -
           std::log(std::max(f0[static_cast<size_t>(t)], kF0LogFloor));
    count++;
  }
  if (count == 0) return false;
  *out = acc / count;
  return true;
}

}  // namespace oracle

// Reference descriptor series over retained voiced windows.  For DeltaF0 the
// f0 argument is used; for the spectral/loudness kinds the log-mel is.
inline DescriptorSeries oracle_descriptor_series(DescriptorKind kind,
                                                 const Tensor<double> &log_mel,
                                                 const std::vector<double> &center_freqs,
                                                 const std::vector<double> &f0,
                                                 const VoicingMask &mask,
                                                 const WindowSequence &windows) {
  DescriptorSeries series;
  series.kind = kind;
  series.window_map.window_len = windows.window_len;
  for (int wi = 0; wi < windows.count(); wi++) {
    auto [b, e] = windows.ranges[static_cast<size_t>(wi)];
    if (!window_retained(mask, b, e)) continue;
    double value = 0.0;
    if (kind == DescriptorKind::DeltaF0) {
      if (!oracle::delta_f0(f0, mask, b, e, &value)) continue;
    } else {
      auto energy = oracle::band_energies(log_mel, b, e);
      switch (kind) {
        case DescriptorKind::SpectralCentroid:
          value = oracle::spectral_centroid(energy, center_freqs);
          break;
        case DescriptorKind::SpectralKurtosis:
          value = oracle::spectral_kurtosis(energy, center_freqs);
          break;
        case DescriptorKind::Loudness:
          value = oracle::loudness_db(energy, center_freqs);
          break;
        default:
          break;
      }
    }
    series.values.push_back(value);
    series.window_indices.push_back(wi);
    series.window_map.ranges.emplace_back(b, e);
  }
  return series;
}

}  // namespace emovc

#endif  // EMOVC_FEATURES_DESCRIPTOR_ORACLE_HPP
