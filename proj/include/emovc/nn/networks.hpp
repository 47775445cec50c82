// emovc/nn/networks.hpp

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

// Desk-scale versions of the framework's networks.  The inherited topology is
// kept (single generator with AdaIN style conditioning and two downsampling
// stages, shared-trunk style encoder and mapping network with per-domain
// heads, discriminator/classifier trunks of the same architecture) while
// convolutions run over the time axis with mel bands as channels, which is
// what makes CPU training tractable.

#ifndef EMOVC_NN_NETWORKS_HPP
#define EMOVC_NN_NETWORKS_HPP

#include <string>
#include <utility>
#include <vector>

#include "emovc/nn/nn.hpp"

namespace emovc {

template <typename Real>
struct NetConfig {
  int n_mels = 80;
  int style_dim = 64;
  int latent_dim = 16;
  int gen_base = 32;        // generator stem width; doubles after downsampling
  int trunk_channels = 64;  // discriminator/classifier/style trunks
  int hidden = 128;         // style/mapping hidden width
  int f0_channels = 16;     // pitch-embedding channels tapped from the F0 net
  int ling_symbols = 12;
  Real mel_mean = Real(-6);  // fixed log-mel normalization inside every stem
  Real mel_std = Real(3);
};

namespace nets_detail {

template <typename Real>
inline ad::Var<Real> normalize_mel(const ad::Var<Real> &mel, const NetConfig<Real> &cfg) {
  return ad::scalar_mul(ad::scalar_add(mel, -cfg.mel_mean), Real(1) / cfg.mel_std);
}

}  // namespace nets_detail

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

template <typename Real>
class Generator {
 public:
  Generator(const NetConfig<Real> &cfg, bool use_f0, Rng &rng) : cfg_(cfg), use_f0_(use_f0) {
    int in_ch = cfg.n_mels + (use_f0 ? cfg.f0_channels : 0);
    int c0 = cfg.gen_base, c1 = cfg.gen_base * 2;
    stem_ = nn::Conv1dLayer<Real>(ps_, "stem", in_ch, c0, 3, 1, rng);
    enc1_ = nn::Conv1dLayer<Real>(ps_, "enc1", c0, c0, 3, 1, rng);
    down1_ = nn::Conv1dLayer<Real>(ps_, "down1", c0, c1, 3, 2, rng);
    enc2_ = nn::Conv1dLayer<Real>(ps_, "enc2", c1, c1, 3, 1, rng);
    down2_ = nn::Conv1dLayer<Real>(ps_, "down2", c1, c1, 3, 2, rng);
    for (int i = 0; i < 2; i++) {
      res_ada1_[i] = nn::AdainLayer<Real>(ps_, "res" + std::to_string(i) + ".ada1",
                                          cfg.style_dim, c1, rng);
      res_conv1_[i] = nn::Conv1dLayer<Real>(ps_, "res" + std::to_string(i) + ".conv1",
                                            c1, c1, 3, 1, rng);
      res_ada2_[i] = nn::AdainLayer<Real>(ps_, "res" + std::to_string(i) + ".ada2",
                                          cfg.style_dim, c1, rng);
      res_conv2_[i] = nn::Conv1dLayer<Real>(ps_, "res" + std::to_string(i) + ".conv2",
                                            c1, c1, 3, 1, rng);
    }
    up1_ada_ = nn::AdainLayer<Real>(ps_, "up1.ada", cfg.style_dim, c1, rng);
    up1_conv_ = nn::Conv1dLayer<Real>(ps_, "up1.conv", c1, c1, 3, 1, rng);
    up2_ada_ = nn::AdainLayer<Real>(ps_, "up2.ada", cfg.style_dim, c1, rng);
    up2_conv_ = nn::Conv1dLayer<Real>(ps_, "up2.conv", c1, c0, 3, 1, rng);
    head_ = nn::Conv1dLayer<Real>(ps_, "head", c0, cfg.n_mels, 1, 1, rng);
  }

  bool uses_f0() const { return use_f0_; }
  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  // mel: [B, n_mels, T] log domain; f0_emb: [B, f0_channels, T] (required iff
  // the generator was built with F0 conditioning); style: [B, style_dim].
  ad::Var<Real> forward(const ad::Var<Real> &mel, const ad::Var<Real> &f0_emb,
                        const ad::Var<Real> &style) const {
    using namespace ad;
    const auto &s = mel.value().shape();
    EMOVC_CHECK(s.size() == 3 && s[1] == cfg_.n_mels, "Generator: bad mel shape");
    Var<Real> x = nets_detail::normalize_mel(mel, cfg_);
    if (use_f0_) {
      EMOVC_CHECK(f0_emb.defined(), "Generator: missing F0 embedding");
      EMOVC_CHECK(f0_emb.value().dim(2) == s[2],
                  "Generator: frame-count mismatch between mel and F0 embedding");
      x = concat_channels(x, f0_emb);
    }
    x = stem_.forward(x);
    x = enc1_.forward(leaky_relu(instance_norm(x, Real(1e-5))));
    int t0 = x.value().dim(2);
    x = down1_.forward(leaky_relu(instance_norm(x, Real(1e-5))));
    x = enc2_.forward(leaky_relu(instance_norm(x, Real(1e-5))));
    int t1 = x.value().dim(2);
    x = down2_.forward(leaky_relu(instance_norm(x, Real(1e-5))));
    for (int i = 0; i < 2; i++) {
      auto h = res_conv1_[i].forward(leaky_relu(res_ada1_[i].forward(x, style)));
      h = res_conv2_[i].forward(leaky_relu(res_ada2_[i].forward(h, style)));
      x = add(x, h);
    }
    x = upsample_nearest(x, t1);
    x = up1_conv_.forward(leaky_relu(up1_ada_.forward(x, style)));
    x = upsample_nearest(x, t0);
    x = up2_conv_.forward(leaky_relu(up2_ada_.forward(x, style)));
    x = head_.forward(leaky_relu(instance_norm(x, Real(1e-5))));
    return scalar_add(scalar_mul(x, cfg_.mel_std), cfg_.mel_mean);
  }

 private:
  NetConfig<Real> cfg_;
  bool use_f0_;
  ParamStore<Real> ps_;
  nn::Conv1dLayer<Real> stem_, enc1_, down1_, enc2_, down2_;
  nn::AdainLayer<Real> res_ada1_[2], res_ada2_[2];
  nn::Conv1dLayer<Real> res_conv1_[2], res_conv2_[2];
  nn::AdainLayer<Real> up1_ada_, up2_ada_;
  nn::Conv1dLayer<Real> up1_conv_, up2_conv_, head_;
};

// ---------------------------------------------------------------------------
// Style encoder: shared convolutional trunk + per-domain linear projections
// ---------------------------------------------------------------------------

template <typename Real>
class StyleEncoder {
 public:
  StyleEncoder(const NetConfig<Real> &cfg, int num_domains, Rng &rng)
      : cfg_(cfg), num_domains_(num_domains) {
    int c = cfg.trunk_channels;
    conv1_ = nn::Conv1dLayer<Real>(ps_, "conv1", cfg.n_mels, c, 3, 1, rng);
    conv2_ = nn::Conv1dLayer<Real>(ps_, "conv2", c, c, 3, 2, rng);
    conv3_ = nn::Conv1dLayer<Real>(ps_, "conv3", c, c, 3, 2, rng);
    shared_ = nn::LinearLayer<Real>(ps_, "shared", c, cfg.hidden, rng);
    heads_ = nn::IndexedHeads<Real>(ps_, "heads", num_domains, cfg.hidden,
                                    cfg.style_dim, rng);
  }

  int num_domains() const { return num_domains_; }
  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  // Shared trunk up to the pooled feature: [B, trunk_channels].
  ad::Var<Real> trunk(const ad::Var<Real> &mel) const {
    using namespace ad;
    Var<Real> x = nets_detail::normalize_mel(mel, cfg_);
    x = leaky_relu(conv1_.forward(x));
    x = leaky_relu(conv2_.forward(x));
    x = leaky_relu(conv3_.forward(x));
    return mean_time(x);
  }

  // Shared projection applied to a pooled trunk feature: [B, hidden].
  ad::Var<Real> shared_hidden(const ad::Var<Real> &pooled) const {
    return ad::leaky_relu(shared_.forward(pooled));
  }

  // Trunk + shared projection: [B, hidden].
  ad::Var<Real> hidden(const ad::Var<Real> &mel) const {
    return shared_hidden(trunk(mel));
  }

  ad::Var<Real> forward(const ad::Var<Real> &mel, const std::vector<int> &codes) const {
    check_codes(codes);
    return heads_.forward(hidden(mel), codes);
  }

  // All per-domain head outputs for one hidden batch row set: N vars [B, 64].
  std::vector<ad::Var<Real>> all_heads(const ad::Var<Real> &hidden_feat) const {
    std::vector<ad::Var<Real>> out;
    int B = hidden_feat.value().dim(0);
    for (int k = 0; k < num_domains_; k++) {
      std::vector<int> codes(static_cast<size_t>(B), k);
      out.push_back(heads_.forward(hidden_feat, codes));
    }
    return out;
  }

  void check_codes(const std::vector<int> &codes) const {
    for (int c : codes)
      EMOVC_CHECK(c >= 0 && c < num_domains_, "StyleEncoder: code out of range");
  }

 private:
  NetConfig<Real> cfg_;
  int num_domains_;
  ParamStore<Real> ps_;
  nn::Conv1dLayer<Real> conv1_, conv2_, conv3_;
  nn::LinearLayer<Real> shared_;
  nn::IndexedHeads<Real> heads_;
};

// ---------------------------------------------------------------------------
// Mapping network: latent draw to style, same head structure as the encoder
// ---------------------------------------------------------------------------

template <typename Real>
class MappingNetwork {
 public:
  MappingNetwork(const NetConfig<Real> &cfg, int num_domains, Rng &rng)
      : num_domains_(num_domains) {
    fc1_ = nn::LinearLayer<Real>(ps_, "fc1", cfg.latent_dim, cfg.hidden, rng);
    fc2_ = nn::LinearLayer<Real>(ps_, "fc2", cfg.hidden, cfg.hidden, rng);
    heads_ = nn::IndexedHeads<Real>(ps_, "heads", num_domains, cfg.hidden,
                                    cfg.style_dim, rng);
  }

  int num_domains() const { return num_domains_; }
  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  ad::Var<Real> forward(const ad::Var<Real> &z, const std::vector<int> &codes) const {
    using namespace ad;
    for (int c : codes)
      EMOVC_CHECK(c >= 0 && c < num_domains_, "MappingNetwork: code out of range");
    auto h = leaky_relu(fc2_.forward(leaky_relu(fc1_.forward(z))));
    return heads_.forward(h, codes);
  }

 private:
  int num_domains_;
  ParamStore<Real> ps_;
  nn::LinearLayer<Real> fc1_, fc2_;
  nn::IndexedHeads<Real> heads_;
};

// ---------------------------------------------------------------------------
// Discriminator (per-domain realness heads) and softmax classifiers
// ---------------------------------------------------------------------------

template <typename Real>
class ConvTrunk {
 public:
  ConvTrunk() = default;
  ConvTrunk(ParamStore<Real> &ps, const NetConfig<Real> &cfg, Rng &rng) : cfg_(cfg) {
    int c = cfg.trunk_channels;
    conv1_ = nn::Conv1dLayer<Real>(ps, "conv1", cfg.n_mels, c, 3, 1, rng);
    conv2_ = nn::Conv1dLayer<Real>(ps, "conv2", c, c, 3, 2, rng);
    conv3_ = nn::Conv1dLayer<Real>(ps, "conv3", c, c, 3, 2, rng);
  }

  ad::Var<Real> forward(const ad::Var<Real> &mel) const {
    using namespace ad;
    Var<Real> x = nets_detail::normalize_mel(mel, cfg_);
    x = leaky_relu(conv1_.forward(x));
    x = leaky_relu(conv2_.forward(x));
    x = leaky_relu(conv3_.forward(x));
    return mean_time(x);
  }

 private:
  NetConfig<Real> cfg_;
  nn::Conv1dLayer<Real> conv1_, conv2_, conv3_;
};

template <typename Real>
class Discriminator {
 public:
  Discriminator(const NetConfig<Real> &cfg, int num_domains, Rng &rng)
      : num_domains_(num_domains) {
    trunk_ = ConvTrunk<Real>(ps_, cfg, rng);
    heads_ = nn::IndexedHeads<Real>(ps_, "heads", num_domains, cfg.trunk_channels, 1, rng);
  }

  int num_domains() const { return num_domains_; }
  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  // One realness logit per sample at its domain head: [B].
  ad::Var<Real> forward(const ad::Var<Real> &mel, const std::vector<int> &codes) const {
    for (int c : codes)
      EMOVC_CHECK(c >= 0 && c < num_domains_, "Discriminator: code out of range");
    auto logits = heads_.forward(trunk_.forward(mel), codes);  // [B, 1]
    return ad::col_select(logits, 0);
  }

 private:
  int num_domains_;
  ParamStore<Real> ps_;
  ConvTrunk<Real> trunk_;
  nn::IndexedHeads<Real> heads_;
};

// Same trunk architecture as the discriminator, with a softmax output.  Used
// for both the adversarial source-speaker classifier and the emotion
// classifier.
template <typename Real>
class Classifier {
 public:
  Classifier(const NetConfig<Real> &cfg, int num_classes, Rng &rng)
      : num_classes_(num_classes) {
    trunk_ = ConvTrunk<Real>(ps_, cfg, rng);
    out_ = nn::LinearLayer<Real>(ps_, "out", cfg.trunk_channels, num_classes, rng);
  }

  int num_classes() const { return num_classes_; }
  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  ad::Var<Real> logits(const ad::Var<Real> &mel) const {
    return out_.forward(trunk_.forward(mel));
  }

  ad::Var<Real> probabilities(const ad::Var<Real> &mel) const {
    return ad::row_softmax(logits(mel));
  }

 private:
  int num_classes_;
  ParamStore<Real> ps_;
  ConvTrunk<Real> trunk_;
  nn::LinearLayer<Real> out_;
};

// ---------------------------------------------------------------------------
// Frozen-after-pretraining components: F0 regressor and linguistic extractor
// ---------------------------------------------------------------------------

template <typename Real>
class F0Net {
 public:
  explicit F0Net(const NetConfig<Real> &cfg, Rng &rng) : cfg_(cfg) {
    conv1_ = nn::Conv1dLayer<Real>(ps_, "conv1", cfg.n_mels, 32, 5, 1, rng);
    conv2_ = nn::Conv1dLayer<Real>(ps_, "conv2", 32, 32, 5, 1, rng);
    conv3_ = nn::Conv1dLayer<Real>(ps_, "conv3", 32, cfg.f0_channels, 3, 1, rng);
    head_ = nn::Conv1dLayer<Real>(ps_, "head", cfg.f0_channels, 1, 1, 1, rng);
  }

  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  struct Output {
    ad::Var<Real> f0;         // [B, T] in Hz
    ad::Var<Real> embedding;  // [B, f0_channels, T], the trunk tap
  };

  Output forward(const ad::Var<Real> &mel) const {
    using namespace ad;
    Var<Real> x = nets_detail::normalize_mel(mel, cfg_);
    x = leaky_relu(conv1_.forward(x));
    x = leaky_relu(conv2_.forward(x));
    auto emb = leaky_relu(conv3_.forward(x));
    auto f0 = scalar_mul(squeeze_channel(softplus_v(head_.forward(emb))), Real(100));
    return {f0, emb};
  }

 private:
  NetConfig<Real> cfg_;
  ParamStore<Real> ps_;
  nn::Conv1dLayer<Real> conv1_, conv2_, conv3_, head_;
};

template <typename Real>
class LingNet {
 public:
  explicit LingNet(const NetConfig<Real> &cfg, Rng &rng) : cfg_(cfg) {
    conv1_ = nn::Conv1dLayer<Real>(ps_, "conv1", cfg.n_mels, 32, 5, 1, rng);
    conv2_ = nn::Conv1dLayer<Real>(ps_, "conv2", 32, 32, 3, 1, rng);
    head_ = nn::Conv1dLayer<Real>(ps_, "head", 32, cfg.ling_symbols, 1, 1, rng);
  }

  ParamStore<Real> &store() { return ps_; }
  const ParamStore<Real> &store() const { return ps_; }

  ad::Var<Real> logits(const ad::Var<Real> &mel) const {
    using namespace ad;
    Var<Real> x = nets_detail::normalize_mel(mel, cfg_);
    x = leaky_relu(conv1_.forward(x));
    x = leaky_relu(conv2_.forward(x));
    return head_.forward(x);
  }

  // Per-frame simplex rows over the symbol inventory: [B, symbols, T].
  ad::Var<Real> features(const ad::Var<Real> &mel) const {
    return ad::exp_v(ad::channel_log_softmax(logits(mel)));
  }

 private:
  NetConfig<Real> cfg_;
  ParamStore<Real> ps_;
  nn::Conv1dLayer<Real> conv1_, conv2_, head_;
};

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

// All networks of one run plus the step counter; the checkpoint unit.
template <typename Real>
struct ModelBundle {
  NetConfig<Real> cfg;
  int num_domains = 0;
  bool use_f0 = true;

  Generator<Real> G;
  StyleEncoder<Real> SE;
  MappingNetwork<Real> M;
  Discriminator<Real> D;
  Classifier<Real> Cs;  // source-speaker classifier over the domain set
  Classifier<Real> Ce;  // emotion classifier (5 classes)
  F0Net<Real> f0net;
  LingNet<Real> lingnet;

  uint64_t config_hash = 0;
  int64_t step = 0;

  ModelBundle(const NetConfig<Real> &cfg_, int num_domains_, bool use_f0_, Rng &rng)
      : cfg(cfg_),
        num_domains(num_domains_),
        use_f0(use_f0_),
        G(cfg_, use_f0_, rng),
        SE(cfg_, num_domains_, rng),
        M(cfg_, num_domains_, rng),
        D(cfg_, num_domains_, rng),
        Cs(cfg_, num_domains_, rng),
        Ce(cfg_, kNumEmotionClasses, rng),
        f0net(cfg_, rng),
        lingnet(cfg_, rng) {}

  static constexpr int kNumEmotionClasses = 5;

  std::vector<std::pair<std::string, ParamStore<Real> *>> components() {
    return {{"G", &G.store()},   {"SE", &SE.store()}, {"M", &M.store()},
            {"D", &D.store()},   {"Cs", &Cs.store()}, {"Ce", &Ce.store()},
            {"f0net", &f0net.store()}, {"lingnet", &lingnet.store()}};
  }

  bool all_finite() {
    for (auto &[name, ps] : components())
      if (!ps->all_finite()) return false;
    return true;
  }
};

}  // namespace emovc

#endif  // EMOVC_NN_NETWORKS_HPP
