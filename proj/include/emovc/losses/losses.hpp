// emovc/losses/losses.hpp

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

// The training objective, term by term.  Emotion terms apply to labelled
// batch members only and contribute a flagged zero otherwise; every term is a
// pure function of network outputs.  The two composition functions are the
// generator/discriminator objectives with the diversity term entering the
// generator side negatively.

#ifndef EMOVC_LOSSES_LOSSES_HPP
#define EMOVC_LOSSES_LOSSES_HPP

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "emovc/core/autodiff.hpp"
#include "emovc/features/descriptor_oracle.hpp"

namespace emovc {

struct LossWeights {
  double af = 2.0;
  double embed = 2.0;
  double emog = 0.01;
  double emod = 0.01;
  double aspk = 0.1;
  double spk = 0.1;  // not listed with the published weights; aspk's symmetric default
  double sty = 1.0;
  double ds = 1.0;
  double f0 = 5.0;
  double asr = 1.0;
  double cyc = 1.0;

  void validate() const {
    const double all[] = {af, embed, emog, emod, aspk, spk, sty, ds, f0, asr, cyc};
    for (double w : all)
      if (w < 0.0) throw ConfigError("LossWeights: negative weight");
  }

  // Ablation preset: the inherited objective only.
  static LossWeights baseline() {
    LossWeights w;
    w.af = w.embed = w.emog = w.emod = 0.0;
    return w;
  }
};

// Per-step record.  Terms are stored unweighted; totals re-derive from terms
// and weights (consistency is an invariant, tested).
struct LossReport {
  int64_t step = 0;
  std::map<std::string, double> g_terms, d_terms;
  double total_g = 0.0, total_d = 0.0;
  int batch_size = 0, labeled_count = 0;
  bool emotion_flagged = false;  // zero labelled members this batch
  std::map<std::string, int> empty_series;  // descriptor kinds with no window

  std::string serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "step=" << step << " total_g=" << total_g << " total_d=" << total_d;
    for (const auto &[k, v] : g_terms) os << " g." << k << "=" << v;
    for (const auto &[k, v] : d_terms) os << " d." << k << "=" << v;
    os << " batch=" << batch_size << " labeled=" << labeled_count
       << " emo_flag=" << (emotion_flagged ? 1 : 0);
    return os.str();
  }

  static LossReport parse(const std::string &line) {
    LossReport r;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
      auto pos = tok.find('=');
      if (pos == std::string::npos) continue;
      std::string key = tok.substr(0, pos);
      std::string val = tok.substr(pos + 1);
      if (key == "step") r.step = std::stoll(val);
      else if (key == "total_g") r.total_g = std::stod(val);
      else if (key == "total_d") r.total_d = std::stod(val);
      else if (key == "batch") r.batch_size = std::stoi(val);
      else if (key == "labeled") r.labeled_count = std::stoi(val);
      else if (key == "emo_flag") r.emotion_flagged = val == "1";
      else if (key.rfind("g.", 0) == 0) r.g_terms[key.substr(2)] = std::stod(val);
      else if (key.rfind("d.", 0) == 0) r.d_terms[key.substr(2)] = std::stod(val);
    }
    return r;
  }
};

// ---------------------------------------------------------------------------
// Differentiable terms
// ---------------------------------------------------------------------------

namespace loss {

template <typename Real>
inline std::vector<char> labeled_mask(const std::vector<int> &emotions) {
  std::vector<char> inc(emotions.size());
  for (size_t i = 0; i < emotions.size(); i++) inc[i] = emotions[i] >= 0 ? 1 : 0;
  return inc;
}

// Mean cross-entropy over labelled members; constant 0 (flagged by the
// caller) when no member carries a label.
template <typename Real>
inline ad::Var<Real> emotion_ce(const ad::Var<Real> &logits, const std::vector<int> &emotions) {
  auto inc = labeled_mask<Real>(emotions);
  std::vector<int> labels(emotions.size(), 0);
  for (size_t i = 0; i < emotions.size(); i++) labels[i] = std::max(emotions[i], 0);
  return ad::nll_rows(ad::row_log_softmax(logits), labels, inc);
}

// Non-saturating adversarial pieces.  softplus(-l) is -log sigmoid(l).
template <typename Real>
inline ad::Var<Real> adv_real_ce(const ad::Var<Real> &logits) {
  return ad::mean_all(ad::softplus_v(ad::neg(logits)));
}

template <typename Real>
inline ad::Var<Real> adv_fake_ce(const ad::Var<Real> &logits) {
  return ad::mean_all(ad::softplus_v(logits));
}

template <typename Real>
inline ad::Var<Real> adv_nonsaturating(const ad::Var<Real> &fake_logits) {
  return ad::mean_all(ad::softplus_v(ad::neg(fake_logits)));
}

// L1 over entries masked by a constant 0/1 tensor, averaged over mask mass.
template <typename Real>
inline ad::Var<Real> masked_l1(const ad::Var<Real> &a, const ad::Var<Real> &b,
                               const Tensor<Real> &mask) {
  Real count = 0;
  for (int64_t i = 0; i < mask.size(); i++) count += mask[i];
  if (count <= 0) return ad::constant(Tensor<Real>::scalar(Real(0)));
  auto diff = ad::abs_v(ad::sub(a, b));
  auto masked = ad::mul(diff, ad::constant(Tensor<Real>(mask)));
  return ad::scalar_mul(ad::sum_all(masked), Real(1) / count);
}

// Per-utterance mean-normalized F0 consistency over source-voiced frames.
// Both contours normalize by their own voiced mean, making the term
// register-agnostic; the mask always comes from the source.
template <typename Real>
inline ad::Var<Real> f0_consistency(const ad::Var<Real> &f0_src, const ad::Var<Real> &f0_conv,
                                    const Tensor<Real> &voiced_mask) {
  auto m_src = ad::masked_row_mean(f0_src, voiced_mask);
  auto m_conv = ad::masked_row_mean(f0_conv, voiced_mask);
  auto n_src = ad::div_rows(f0_src, m_src, Real(1e-6));
  auto n_conv = ad::div_rows(f0_conv, m_conv, Real(1e-6));
  return masked_l1(n_conv, n_src, voiced_mask);
}

// Acoustic-feature loss over per-kind series pairs.  Undefined series (no
// retained window) contribute zero; the average is over ACTIVE kinds so that
// toggling kinds does not rescale the term.
template <typename Real>
struct SeriesPair {
  ad::Var<Real> conv;  // differentiable side
  ad::Var<Real> src;   // constant side (same plan)
};

template <typename Real>
inline ad::Var<Real> acoustic_feature(const std::vector<SeriesPair<Real>> &pairs,
                                      std::map<std::string, int> *empty_counter = nullptr,
                                      const std::vector<DescriptorKind> *kinds = nullptr) {
  EMOVC_CHECK(!pairs.empty(), "acoustic_feature: no active descriptor kinds");
  ad::Var<Real> total = ad::constant(Tensor<Real>::scalar(Real(0)));
  for (size_t i = 0; i < pairs.size(); i++) {
    const auto &p = pairs[i];
    if (!p.conv.defined() || !p.src.defined() || p.src.value().size() == 0) {
      if (empty_counter && kinds)
        (*empty_counter)[descriptor_name((*kinds)[i])]++;
      continue;
    }
    EMOVC_CHECK(p.conv.value().size() == p.src.value().size(),
                "acoustic_feature: series length mismatch (source plan must be shared)");
    total = ad::add(total, ad::mean_abs_diff(p.conv, p.src));
  }
  return ad::scalar_mul(total, Real(1) / static_cast<Real>(pairs.size()));
}

}  // namespace loss

// Plain-value form of the acoustic-feature distance for one kind (reports,
// tests, feature tooling).
inline double loss_af_value(const DescriptorSeries &src, const DescriptorSeries &conv) {
  if (src.values.empty() && conv.values.empty()) return 0.0;
  EMOVC_CHECK(src.values.size() == conv.values.size(),
              "loss_af_value: series length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < src.values.size(); i++) acc += std::abs(src.values[i] - conv.values[i]);
  return acc / static_cast<double>(src.values.size());
}

// ---------------------------------------------------------------------------
// Objective composition (the generator/discriminator equations)
// ---------------------------------------------------------------------------

// L_G = adv + w_af af + w_embed embed + w_emog emog + w_aspk aspk
//       + w_sty sty - w_ds ds + w_F0 f0 + w_asr asr + w_cyc cyc
inline double total_generator_loss(const std::map<std::string, double> &terms,
                                   const LossWeights &w) {
  w.validate();
  auto get = [&](const char *k) {
    auto it = terms.find(k);
    return it == terms.end() ? 0.0 : it->second;
  };
  return get("adv") + w.af * get("af") + w.embed * get("embed") + w.emog * get("emog") +
         w.aspk * get("aspk") + w.sty * get("sty") - w.ds * get("ds") + w.f0 * get("f0") +
         w.asr * get("asr") + w.cyc * get("cyc");
}

// L_D = -adv + w_emod emod + w_spk spk
inline double total_discriminator_loss(const std::map<std::string, double> &terms,
                                       const LossWeights &w) {
  w.validate();
  auto get = [&](const char *k) {
    auto it = terms.find(k);
    return it == terms.end() ? 0.0 : it->second;
  };
  return -get("adv") + w.emod * get("emod") + w.spk * get("spk");
}

}  // namespace emovc

#endif  // EMOVC_LOSSES_LOSSES_HPP
