// emovc/features/descriptors.hpp

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

// Differentiable acoustic descriptors on the mel-band axis.  Window sums are
// matmuls against constant selector matrices built once from the SOURCE
// utterance's voicing mask, so perturbing converted-mel values can never
// change window retention.  Kurtosis uses the raw-moment expansion, which is
// algebraically identical to the oracle's two-pass form including the epsilon
// guards.

#ifndef EMOVC_FEATURES_DESCRIPTORS_HPP
#define EMOVC_FEATURES_DESCRIPTORS_HPP

#include <vector>

#include "emovc/core/autodiff.hpp"
#include "emovc/features/descriptor_oracle.hpp"

namespace emovc {

// Constant window-selection structure derived from the source mask.  One plan
// serves both sides of the acoustic-feature loss.
template <typename Real>
struct DescriptorWindowPlan {
  WindowSequence windows;       // the full 50%-overlap sequence
  std::vector<int> retained;    // window indices with >= 50% voiced frames
  Tensor<Real> selector;        // [T, Wr]; column w sums frames of window w

  std::vector<int> df0_windows;  // retained windows that also have a voiced pair
  Tensor<Real> pair_weights;     // [Wd, T-1]; row w = mean weights over voiced pairs

  int frames = 0;
  bool empty() const { return retained.empty(); }
};

template <typename Real>
inline DescriptorWindowPlan<Real> build_descriptor_plan(const VoicingMask &mask,
                                                        int window_len) {
  int T = mask.frames();
  DescriptorWindowPlan<Real> plan;
  plan.frames = T;
  plan.windows = frame_windows(T, window_len);
  for (int wi = 0; wi < plan.windows.count(); wi++) {
    auto [b, e] = plan.windows.ranges[static_cast<size_t>(wi)];
    if (window_retained(mask, b, e)) plan.retained.push_back(wi);
  }
  int wr = static_cast<int>(plan.retained.size());
  plan.selector = Tensor<Real>({std::max(T, 1), std::max(wr, 1)});
  for (int c = 0; c < wr; c++) {
    auto [b, e] = plan.windows.ranges[static_cast<size_t>(plan.retained[static_cast<size_t>(c)])];
    for (int t = b; t < e; t++) plan.selector.at(t, c) = Real(1);
  }

  // delta-F0 pair weights: voiced consecutive pairs within each retained
  // window, rows normalized to means; windows with no pair are dropped
  std::vector<std::vector<Real>> rows;
  for (int wi : plan.retained) {
    auto [b, e] = plan.windows.ranges[static_cast<size_t>(wi)];
    std::vector<Real> row(static_cast<size_t>(std::max(T - 1, 1)), Real(0));
    int count = 0;
    for (int t = b; t + 1 < e; t++) {
      if (mask.voiced[static_cast<size_t>(t)] && mask.voiced[static_cast<size_t>(t) + 1]) {
        row[static_cast<size_t>(t)] = Real(1);
        count++;
      }
    }
    if (count == 0) continue;
    for (auto &v : row) v /= static_cast<Real>(count);
    plan.df0_windows.push_back(wi);
    rows.push_back(std::move(row));
  }
  int wd = static_cast<int>(rows.size());
  plan.pair_weights = Tensor<Real>({std::max(wd, 1), std::max(T - 1, 1)});
  for (int r = 0; r < wd; r++)
    std::copy(rows[static_cast<size_t>(r)].begin(), rows[static_cast<size_t>(r)].end(),
              &plan.pair_weights.at(r, 0));
  return plan;
}

namespace desc_detail {

template <typename Real>
inline ad::Var<Real> freq_row(const std::vector<double> &center_freqs, int power) {
  int M = static_cast<int>(center_freqs.size());
  Tensor<Real> row({1, M});
  for (int m = 0; m < M; m++) {
    double v = 1.0;
    for (int p = 0; p < power; p++) v *= center_freqs[static_cast<size_t>(m)];
    row.at(0, m) = static_cast<Real>(v);
  }
  return ad::constant(std::move(row));
}

// energy: [M, W] window-summed band energies (Var).  Returns [1, W].
template <typename Real>
inline ad::Var<Real> centroid_from_energy(const ad::Var<Real> &energy,
                                          const std::vector<double> &center_freqs) {
  using namespace ad;
  auto s1 = matmul(freq_row<Real>(center_freqs, 1), energy);
  auto s0 = matmul(freq_row<Real>(center_freqs, 0), energy);
  return div_v(s1, scalar_add(s0, static_cast<Real>(kDescriptorEps)));
}

// Two-pass central moments (mean first, then deviations), mirroring the
// oracle's algebra; the raw-moment expansion cancels catastrophically for
// concentrated spectra.
template <typename Real>
inline ad::Var<Real> kurtosis_from_energy(const ad::Var<Real> &energy,
                                          const std::vector<double> &center_freqs) {
  using namespace ad;
  int M = static_cast<int>(center_freqs.size());
  Tensor<Real> fcol({M});
  for (int m = 0; m < M; m++) fcol[m] = static_cast<Real>(center_freqs[static_cast<size_t>(m)]);
  auto ones = freq_row<Real>(center_freqs, 0);
  auto s0 = matmul(ones, energy);
  auto s1 = matmul(freq_row<Real>(center_freqs, 1), energy);
  auto den = scalar_add(s0, static_cast<Real>(kDescriptorEps));
  auto mu = div_v(s1, den);
  auto dev = outer_sub(fcol, mu);        // [M, W]: f_b - mu_w
  auto dev2 = square_v(dev);
  auto m2 = div_v(matmul(ones, mul(dev2, energy)), den);
  auto m4 = div_v(matmul(ones, mul(square_v(dev2), energy)), den);
  auto sig2 = scalar_add(m2, static_cast<Real>(kDescriptorEps));
  return div_v(m4, square_v(sig2));
}

template <typename Real>
inline ad::Var<Real> loudness_from_energy(const ad::Var<Real> &energy,
                                          const std::vector<double> &center_freqs) {
  using namespace ad;
  int M = static_cast<int>(center_freqs.size());
  Tensor<Real> arow({1, M});
  for (int m = 0; m < M; m++)
    arow.at(0, m) = static_cast<Real>(a_weight_energy_gain(center_freqs[static_cast<size_t>(m)]));
  auto wsum = matmul(constant(std::move(arow)), energy);
  return scalar_mul(log_v(scalar_add(wsum, static_cast<Real>(kLoudnessFloor))),
                    static_cast<Real>(10.0 / std::log(10.0)));
}

}  // namespace desc_detail

// ---------------------------------------------------------------------------
// Single-window ops (the spec-level kernels).  Input is a linear-energy block
// [M, L] (exp of log-mel over one descriptor window).
// ---------------------------------------------------------------------------

template <typename Real>
inline ad::Var<Real> window_energy(const ad::Var<Real> &energy_window) {
  int L = energy_window.value().dim(1);
  Tensor<Real> ones({L, 1});
  ones.fill(Real(1));
  return ad::matmul(energy_window, ad::constant(std::move(ones)));
}

template <typename Real>
inline ad::Var<Real> spectral_centroid(const ad::Var<Real> &energy_window,
                                       const std::vector<double> &center_freqs) {
  return ad::reshape(
      desc_detail::centroid_from_energy(window_energy(energy_window), center_freqs),
      {1});
}

template <typename Real>
inline ad::Var<Real> spectral_kurtosis(const ad::Var<Real> &energy_window,
                                       const std::vector<double> &center_freqs) {
  return ad::reshape(
      desc_detail::kurtosis_from_energy(window_energy(energy_window), center_freqs),
      {1});
}

template <typename Real>
inline ad::Var<Real> loudness(const ad::Var<Real> &energy_window,
                              const std::vector<double> &center_freqs) {
  return ad::reshape(
      desc_detail::loudness_from_energy(window_energy(energy_window), center_freqs),
      {1});
}

// ---------------------------------------------------------------------------
// Series over retained windows
// ---------------------------------------------------------------------------

// log_mel: [M, T] Var in log domain; f0: [T] Var (only used for DeltaF0).
// Returns an undefined Var when no window survives retention (the caller
// treats the contribution as zero).
template <typename Real>
inline ad::Var<Real> descriptor_series_var(DescriptorKind kind,
                                           const ad::Var<Real> &log_mel,
                                           const std::vector<double> &center_freqs,
                                           const ad::Var<Real> &f0,
                                           const DescriptorWindowPlan<Real> &plan) {
  using namespace ad;
  if (kind == DescriptorKind::DeltaF0) {
    if (plan.df0_windows.empty()) return Var<Real>();
    EMOVC_CHECK(f0.defined() && f0.value().rank() == 1 && f0.value().dim(0) == plan.frames,
                "descriptor_series_var: f0 not aligned to plan");
    auto lf = log_clamped(f0, static_cast<Real>(kF0LogFloor));
    auto d = diff_time(lf);
    auto col = matmul(constant(Tensor<Real>(plan.pair_weights)),
                      reshape(d, {plan.frames - 1, 1}));
    return reshape(col, {1, static_cast<int>(plan.df0_windows.size())});
  }
  if (plan.retained.empty()) return Var<Real>();
  EMOVC_CHECK(log_mel.value().rank() == 2 && log_mel.value().dim(1) == plan.frames,
              "descriptor_series_var: mel not aligned to plan");
  auto energy = matmul(exp_v(log_mel), constant(Tensor<Real>(plan.selector)));
  switch (kind) {
    case DescriptorKind::SpectralCentroid:
      return desc_detail::centroid_from_energy(energy, center_freqs);
    case DescriptorKind::SpectralKurtosis:
      return desc_detail::kurtosis_from_energy(energy, center_freqs);
    case DescriptorKind::Loudness:
      return desc_detail::loudness_from_energy(energy, center_freqs);
    default:
      break;
  }
  return Var<Real>();
}

// Plain-value view of the differentiable route (used for reports and the
// feature-dump command when gradients are not needed).
template <typename Real>
inline DescriptorSeries descriptor_series_values(DescriptorKind kind,
                                                 const Tensor<double> &log_mel,
                                                 const std::vector<double> &center_freqs,
                                                 const std::vector<double> &f0,
                                                 const VoicingMask &mask, int window_len) {
  auto plan = build_descriptor_plan<Real>(mask, window_len);
  DescriptorSeries out;
  out.kind = kind;
  out.window_map.window_len = window_len;
  ad::Var<Real> f0v;
  if (kind == DescriptorKind::DeltaF0) {
    Tensor<Real> f({plan.frames});
    for (int t = 0; t < plan.frames; t++) f[t] = static_cast<Real>(f0[static_cast<size_t>(t)]);
    f0v = ad::constant(std::move(f));
  }
  auto melv = ad::constant(Tensor<Real>::template cast<double>(log_mel));
  auto series = descriptor_series_var<Real>(kind, melv, center_freqs, f0v, plan);
  if (!series.defined()) return out;
  const auto &idx =
      kind == DescriptorKind::DeltaF0 ? plan.df0_windows : plan.retained;
  for (size_t i = 0; i < idx.size(); i++) {
    out.values.push_back(static_cast<double>(series.value()[static_cast<int64_t>(i)]));
    out.window_indices.push_back(idx[i]);
    out.window_map.ranges.push_back(plan.windows.ranges[static_cast<size_t>(idx[i])]);
  }
  return out;
}

}  // namespace emovc

#endif  // EMOVC_FEATURES_DESCRIPTORS_HPP
