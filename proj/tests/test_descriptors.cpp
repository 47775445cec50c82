// tests/test_descriptors.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include "emovc/audio/mel.hpp"
#include "emovc/features/descriptors.hpp"
#include "testutil.hpp"

using namespace emovc;
using ad::Var;

namespace {

std::vector<double> test_center_freqs() {
  MelExtractor ext{MelConfig{}};
  return ext.center_freqs();
}

// random log-mel block and a random voicing mask with guaranteed coverage
Tensor<double> random_log_mel(Rng &rng, int n_mels, int frames) {
  Tensor<double> m({n_mels, frames});
  for (auto &v : m) v = rng.uniform(std::log(1e-5), 2.0);
  return m;
}

VoicingMask random_mask(Rng &rng, int frames, double p_voiced = 0.75) {
  VoicingMask mask;
  mask.source = "fixture";
  mask.voiced.resize(static_cast<size_t>(frames));
  for (auto &v : mask.voiced) v = rng.uniform() < p_voiced ? 1 : 0;
  // ensure at least one fully voiced window
  for (int t = 0; t < std::min(frames, 8); t++) mask.voiced[static_cast<size_t>(t)] = 1;
  return mask;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace

TEST_CASE("point-mass spectrum: centroid equals the band's center frequency") {
  auto freqs = test_center_freqs();
  for (int band : {3, 40, 79}) {
    Tensor<double> e({80, 8});
    for (int t = 0; t < 8; t++) e.at(band, t) = 2.5;
    auto c = spectral_centroid(ad::constant(std::move(e)), freqs);
    CHECK(rel_err(c.value()[0], freqs[static_cast<size_t>(band)]) < 1e-8);
  }
}

TEST_CASE("flat spectrum: centroid is the arithmetic mean of center frequencies") {
  auto freqs = test_center_freqs();
  Tensor<double> e = Tensor<double>::full({80, 8}, 0.7);
  auto c = spectral_centroid(ad::constant(std::move(e)), freqs);
  double mean = 0.0;
  for (double f : freqs) mean += f;
  mean /= static_cast<double>(freqs.size());
  CHECK(rel_err(c.value()[0], mean) < 1e-9);
}

TEST_CASE("two equal point masses give kurtosis exactly 1") {
  auto freqs = test_center_freqs();
  Tensor<double> e({80, 4});
  for (int t = 0; t < 4; t++) {
    e.at(10, t) = 1.25;
    e.at(60, t) = 1.25;
  }
  auto k = spectral_kurtosis(ad::constant(std::move(e)), freqs);
  CHECK(k.value()[0] == Catch::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("single-band spectrum degenerates to kurtosis 0 via the epsilon guard") {
  auto freqs = test_center_freqs();
  Tensor<double> e({80, 4});
  for (int t = 0; t < 4; t++) e.at(25, t) = 3.0;
  auto k = spectral_kurtosis(ad::constant(std::move(e)), freqs);
  CHECK(std::abs(k.value()[0]) < 1e-6);
}

TEST_CASE("discretized Gaussian profile lands near kurtosis 3") {
  auto freqs = test_center_freqs();
  // Gaussian energy density sampled by the filterbank: mass = N(f) * local
  // bandwidth, sigma spanning well over 8 bands
  double mu = 3000.0, sigma = 900.0;
  Tensor<double> e({80, 1});
  for (int b = 0; b < 80; b++) {
    double f = freqs[static_cast<size_t>(b)];
    double bw = (b == 0) ? freqs[1] - freqs[0]
                         : (b == 79 ? freqs[79] - freqs[78]
                                    : 0.5 * (freqs[static_cast<size_t>(b) + 1] -
                                             freqs[static_cast<size_t>(b) - 1]));
    e.at(b, 0) = std::exp(-0.5 * (f - mu) * (f - mu) / (sigma * sigma)) * bw;
  }
  std::vector<double> energy(e.data(), e.data() + 80);
  double k_oracle = oracle::spectral_kurtosis(energy, freqs);
  CHECK(k_oracle == Catch::Approx(3.0).margin(0.2));
  auto k = spectral_kurtosis(ad::constant(std::move(e)), freqs);
  CHECK(rel_err(k.value()[0], k_oracle) < 1e-9);
}

TEST_CASE("loudness anchors: silence floor, 1 kHz zero point, 100 Hz attenuation") {
  auto freqs = test_center_freqs();
  // silence: all energies ~0 -> 10*log10(floor)
  Tensor<double> zero({80, 8});
  auto l0 = loudness(ad::constant(std::move(zero)), freqs);
  CHECK(l0.value()[0] == Catch::Approx(10.0 * std::log10(1e-5)).epsilon(1e-9));

  auto nearest_band = [&](double f) {
    int best = 0;
    for (int b = 1; b < 80; b++)
      if (std::abs(freqs[static_cast<size_t>(b)] - f) < std::abs(freqs[static_cast<size_t>(best)] - f)) best = b;
    return best;
  };
  int b1k = nearest_band(1000.0), b100 = nearest_band(100.0);

  // all energy at ~1 kHz: equals unweighted energy in dB within 0.2 dB
  Tensor<double> e1k({80, 8});
  double total = 0.0;
  for (int t = 0; t < 8; t++) {
    e1k.at(b1k, t) = 5.0;
    total += 5.0;
  }
  auto l1k = loudness(ad::constant(std::move(e1k)), freqs);
  CHECK(std::abs(l1k.value()[0] - 10.0 * std::log10(total)) < 0.2);

  // equal energy at ~100 Hz: lower by the A-curve difference (about -19 dB)
  Tensor<double> e100({80, 8});
  for (int t = 0; t < 8; t++) e100.at(b100, t) = 5.0;
  auto l100 = loudness(ad::constant(std::move(e100)), freqs);
  double expected_gap = a_weight_db(freqs[static_cast<size_t>(b100)]) -
                        a_weight_db(freqs[static_cast<size_t>(b1k)]);
  CHECK(l100.value()[0] - l1k.value()[0] == Catch::Approx(expected_gap).margin(0.05));
  CHECK(expected_gap < -15.0);
  CHECK(expected_gap > -25.0);
  // the textbook anchor itself
  CHECK(a_weight_db(100.0) == Catch::Approx(-19.1).margin(0.3));
  CHECK(std::abs(a_weight_db(1000.0)) < 1e-12);
}

TEST_CASE("delta_f0 fixtures: constant, exponential glide") {
  int T = 40;
  VoicingMask mask;
  mask.voiced.assign(static_cast<size_t>(T), 1);
  auto plan = build_descriptor_plan<double>(mask, 8);

  // constant 150 Hz -> all zeros
  Tensor<double> f0c = Tensor<double>::full({T}, 150.0);
  auto s1 = descriptor_series_var<double>(DescriptorKind::DeltaF0, Var<double>(), {},
                                          ad::constant(std::move(f0c)), plan);
  REQUIRE(s1.defined());
  for (int64_t i = 0; i < s1.value().size(); i++)
    CHECK(std::abs(s1.value()[i]) < 1e-12);

  // f0[t] = 100 * 2^(t/T0): every ln-difference is ln(2)/T0
  double T0 = 50.0;
  Tensor<double> f0g({T});
  for (int t = 0; t < T; t++) f0g[t] = 100.0 * std::pow(2.0, t / T0);
  auto s2 = descriptor_series_var<double>(DescriptorKind::DeltaF0, Var<double>(), {},
                                          ad::constant(std::move(f0g)), plan);
  REQUIRE(s2.defined());
  for (int64_t i = 0; i < s2.value().size(); i++)
    CHECK(s2.value()[i] == Catch::Approx(std::log(2.0) / T0).epsilon(1e-9));
}

TEST_CASE("delta_f0 drops windows without a voiced pair") {
  int T = 16;
  VoicingMask mask;
  mask.voiced.assign(static_cast<size_t>(T), 0);
  // window [0,8): alternating voiced singletons -> retained (4 voiced) but no pair
  for (int t = 0; t < 8; t += 2) mask.voiced[static_cast<size_t>(t)] = 1;
  // window [8,16): solid run -> retained with pairs
  for (int t = 8; t < 16; t++) mask.voiced[static_cast<size_t>(t)] = 1;
  auto plan = build_descriptor_plan<double>(mask, 8);
  // windows are [0,8) [4,12) [8,16); [0,8) has no pair
  CHECK(plan.df0_windows.size() < plan.retained.size());
}

TEST_CASE("series length equals the count of retained windows") {
  Rng rng(131);
  int T = 64;
  auto mel = random_log_mel(rng, 80, T);
  VoicingMask mask = random_mask(rng, T);
  auto freqs = test_center_freqs();
  auto windows = frame_windows(T, 8);
  int expect = 0;
  for (auto [b, e] : windows.ranges) expect += window_retained(mask, b, e) ? 1 : 0;

  auto plan = build_descriptor_plan<double>(mask, 8);
  CHECK(static_cast<int>(plan.retained.size()) == expect);
  auto s = descriptor_series_var<double>(DescriptorKind::Loudness,
                                         ad::constant(Tensor<double>(mel)), freqs,
                                         Var<double>(), plan);
  REQUIRE(s.defined());
  CHECK(s.value().size() == expect);

  // fully unvoiced utterance -> empty series
  VoicingMask none;
  none.voiced.assign(static_cast<size_t>(T), 0);
  auto empty_plan = build_descriptor_plan<double>(none, 8);
  CHECK(empty_plan.empty());
  auto es = descriptor_series_var<double>(DescriptorKind::Loudness,
                                          ad::constant(Tensor<double>(mel)), freqs,
                                          Var<double>(), empty_plan);
  CHECK(!es.defined());
}

TEST_CASE("oracle equivalence: differentiable path within 1e-6 relative, 100 inputs per kind") {
  auto freqs = test_center_freqs();
  Rng rng(137);
  for (int kind_i = 0; kind_i < kNumDescriptorKinds; kind_i++) {
    auto kind = static_cast<DescriptorKind>(kind_i);
    for (int rep = 0; rep < 100; rep++) {
      int T = 24 + static_cast<int>(rng.uniform_int(40));
      auto mel = random_log_mel(rng, 80, T);
      VoicingMask mask = random_mask(rng, T);
      std::vector<double> f0(static_cast<size_t>(T));
      for (auto &f : f0) f = rng.uniform(70.0, 350.0);
      auto windows = frame_windows(T, 8);
      auto oracle_series =
          oracle_descriptor_series(kind, mel, freqs, f0, mask, windows);
      auto diff_series =
          descriptor_series_values<double>(kind, mel, freqs, f0, mask, 8);
      REQUIRE(oracle_series.values.size() == diff_series.values.size());
      REQUIRE(oracle_series.window_indices == diff_series.window_indices);
      for (size_t i = 0; i < oracle_series.values.size(); i++)
        CHECK(rel_err(oracle_series.values[i], diff_series.values[i]) < 1e-6);
    }
  }
}

TEST_CASE("descriptor gradients match central finite differences") {
  auto freqs = test_center_freqs();
  Rng rng(139);
  int windows_checked = 0;
  double worst = 0.0;
  while (windows_checked < 50) {
    int T = 8;
    auto mel = random_log_mel(rng, 80, T);
    for (int kind_i = 0; kind_i < 3; kind_i++) {  // spectral kinds on mel
      auto kind = static_cast<DescriptorKind>(kind_i);
      auto value_of = [&](const Tensor<double> &m) {
        auto e = ad::exp_v(ad::constant(Tensor<double>(m)));
        switch (kind) {
          case DescriptorKind::SpectralCentroid: return spectral_centroid(e, freqs).value()[0];
          case DescriptorKind::SpectralKurtosis: return spectral_kurtosis(e, freqs).value()[0];
          default: return loudness(e, freqs).value()[0];
        }
      };
      Var<double> leaf = Var<double>::leaf(Tensor<double>(mel), true);
      auto e = ad::exp_v(leaf);
      Var<double> y = kind == DescriptorKind::SpectralCentroid ? spectral_centroid(e, freqs)
                      : kind == DescriptorKind::SpectralKurtosis
                          ? spectral_kurtosis(e, freqs)
                          : loudness(e, freqs);
      ad::backward(y);
      std::vector<double> analytic(leaf.grad().data(), leaf.grad().data() + mel.size());
      std::vector<double> flat(mel.data(), mel.data() + mel.size());
      auto f = [&](const std::vector<double> &x) {
        return value_of(Tensor<double>::from({80, T}, x));
      };
      auto coords = test::random_coords(rng, mel.size(), 14);
      auto rep = test::fd_check(f, flat, analytic, coords, 1e-4, 1e-7);
      worst = std::max(worst, rep.max_rel_err);
    }
    // delta-f0 wrt the f0 vector
    {
      VoicingMask mask;
      mask.voiced.assign(16, 1);
      auto plan = build_descriptor_plan<double>(mask, 8);
      Tensor<double> f0({16});
      for (auto &f : f0) f = rng.uniform(80.0, 300.0);
      Var<double> leaf = Var<double>::leaf(Tensor<double>(f0), true);
      auto s = descriptor_series_var<double>(DescriptorKind::DeltaF0, Var<double>(), freqs,
                                             leaf, plan);
      auto y = ad::mean_all(s);
      ad::backward(y);
      std::vector<double> analytic(leaf.grad().data(), leaf.grad().data() + 16);
      std::vector<double> flat(f0.data(), f0.data() + 16);
      auto f = [&](const std::vector<double> &x) {
        auto v = ad::constant(Tensor<double>::from({16}, x));
        return ad::mean_all(descriptor_series_var<double>(DescriptorKind::DeltaF0,
                                                          Var<double>(), freqs, v, plan))
            .value()[0];
      };
      auto coords = test::random_coords(rng, 16, 8);
      auto rep = test::fd_check(f, flat, analytic, coords, 1e-4, 1e-7);
      worst = std::max(worst, rep.max_rel_err);
    }
    windows_checked += 4;
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("scale behavior of the four kinds") {
  auto freqs = test_center_freqs();
  Rng rng(149);
  int T = 32;
  auto mel = random_log_mel(rng, 80, T);
  VoicingMask mask = random_mask(rng, T);
  std::vector<double> f0(static_cast<size_t>(T));
  for (auto &f : f0) f = rng.uniform(80.0, 300.0);
  double c = 3.7;  // energy scale
  Tensor<double> mel_scaled = mel;
  for (auto &v : mel_scaled) v += std::log(c);
  std::vector<double> f0_scaled = f0;
  for (auto &f : f0_scaled) f *= 1.9;

  auto series = [&](DescriptorKind k, const Tensor<double> &m, const std::vector<double> &f) {
    return descriptor_series_values<double>(k, m, freqs, f, mask, 8);
  };
  auto a_c = series(DescriptorKind::SpectralCentroid, mel, f0);
  auto b_c = series(DescriptorKind::SpectralCentroid, mel_scaled, f0);
  for (size_t i = 0; i < a_c.values.size(); i++)
    CHECK(rel_err(a_c.values[i], b_c.values[i]) < 1e-7);

  auto a_k = series(DescriptorKind::SpectralKurtosis, mel, f0);
  auto b_k = series(DescriptorKind::SpectralKurtosis, mel_scaled, f0);
  for (size_t i = 0; i < a_k.values.size(); i++)
    CHECK(rel_err(a_k.values[i], b_k.values[i]) < 1e-6);

  auto a_l = series(DescriptorKind::Loudness, mel, f0);
  auto b_l = series(DescriptorKind::Loudness, mel_scaled, f0);
  for (size_t i = 0; i < a_l.values.size(); i++)
    CHECK(b_l.values[i] - a_l.values[i] == Catch::Approx(10.0 * std::log10(c)).margin(1e-6));

  auto a_d = series(DescriptorKind::DeltaF0, mel, f0);
  auto b_d = series(DescriptorKind::DeltaF0, mel, f0_scaled);
  for (size_t i = 0; i < a_d.values.size(); i++)
    CHECK(std::abs(a_d.values[i] - b_d.values[i]) < 1e-9);
}

TEST_CASE("mask constancy: conv-side perturbations cannot change retention") {
  Rng rng(151);
  int T = 48;
  VoicingMask mask = random_mask(rng, T);
  auto plan1 = build_descriptor_plan<double>(mask, 8);
  // the plan is a pure function of the mask; rebuilding from the same mask
  // after arbitrary mel-side changes yields identical structure
  auto plan2 = build_descriptor_plan<double>(mask, 8);
  CHECK(plan1.retained == plan2.retained);
  CHECK(plan1.df0_windows == plan2.df0_windows);
  for (int64_t i = 0; i < plan1.selector.size(); i++)
    CHECK(plan1.selector[i] == plan2.selector[i]);
}
