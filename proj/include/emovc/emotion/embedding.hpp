// emovc/emotion/embedding.hpp

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

// Label-free emotion embedding extraction.  Stage I trains the style encoder
// on the emotion-conversion task (through the shared adversarial trainer);
// here the trained encoder is extended with classification layers whose
// softmax scores, element-wise squared for sparsity, weight the per-emotion
// head outputs into a single 1x64 representation:
//
//   p = softmax(cls(trunk(X)));  w = p .* p;  Emb(X) = sum_i w_i * H_i(X)
//
// Stage II fine-tunes the new layers and heads with cross-entropy while the
// trunk stays frozen.

#ifndef EMOVC_EMOTION_EMBEDDING_HPP
#define EMOVC_EMOTION_EMBEDDING_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "emovc/losses/losses.hpp"
#include "emovc/nn/adamw.hpp"
#include "emovc/nn/checkpoint.hpp"
#include "emovc/nn/networks.hpp"
#include "emovc/train/dataset.hpp"

namespace emovc {

template <typename Real>
class EmbeddingExtractor {
 public:
  EmbeddingExtractor(const NetConfig<Real> &cfg, Rng &rng)
      : cfg_(cfg), enc_(cfg, kNumEmotions, rng) {
    cls1_ = nn::LinearLayer<Real>(cls_ps_, "cls1", cfg.trunk_channels, 64, rng);
    cls2_ = nn::LinearLayer<Real>(cls_ps_, "cls2", 64, kNumEmotions, rng);
    set_frozen();
  }

  struct Forward {
    ad::Var<Real> embedding;  // [B, 64]
    ad::Var<Real> logits;     // [B, N]
    ad::Var<Real> scores;     // softmax rows
    ad::Var<Real> weights;    // squared scores
    std::vector<ad::Var<Real>> heads;  // N x [B, 64]
  };

  Forward forward(const ad::Var<Real> &mel) const {
    using namespace ad;
    Forward out;
    auto pooled = enc_.trunk(mel);
    auto hidden = enc_.shared_hidden(pooled);
    out.logits = cls2_.forward(leaky_relu(cls1_.forward(pooled)));
    out.scores = row_softmax(out.logits);
    out.weights = square_v(out.scores);
    out.heads = enc_.all_heads(hidden);
    for (int k = 0; k < kNumEmotions; k++) {
      auto term = scale_rows(out.heads[static_cast<size_t>(k)], col_select(out.weights, k));
      out.embedding = k == 0 ? term : add(out.embedding, term);
    }
    return out;
  }

  ad::Var<Real> extract(const ad::Var<Real> &mel) const { return forward(mel).embedding; }

  StyleEncoder<Real> &encoder() { return enc_; }
  const StyleEncoder<Real> &encoder() const { return enc_; }
  ParamStore<Real> &cls_store() { return cls_ps_; }

  void set_frozen() {
    enc_.store().set_trainable(false);
    cls_ps_.set_trainable(false);
  }

  // Stage-II trainable scope: new classification layers + the per-emotion
  // heads; the shared trunk stays frozen.
  void set_stage2_trainable() {
    enc_.store().set_trainable(false);
    enc_.store().set_trainable_matching("heads", true);
    cls_ps_.set_trainable(true);
  }

  std::vector<Param<Real> *> stage2_params() {
    auto out = enc_.store().matching("heads");
    for (auto &p : cls_ps_.params()) out.push_back(&p);
    return out;
  }

  bool params_identical_to(EmbeddingExtractor &other) {
    auto &a = enc_.store().params();
    auto &b = other.enc_.store().params();
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); i++)
      for (int64_t j = 0; j < a[i].var.value().size(); j++)
        if (a[i].var.value()[j] != b[i].var.value()[j]) return false;
    auto &ca = cls_ps_.params();
    auto &cb = other.cls_ps_.params();
    for (size_t i = 0; i < ca.size(); i++)
      for (int64_t j = 0; j < ca[i].var.value().size(); j++)
        if (ca[i].var.value()[j] != cb[i].var.value()[j]) return false;
    return true;
  }

  void save(const std::string &path, uint64_t config_hash) {
    std::vector<NamedTensor<Real>> blobs;
    collect_store("extractor.enc", enc_.store(), &blobs);
    collect_store("extractor.cls", cls_ps_, &blobs);
    save_blobs(path, blobs, config_hash);
  }

  void load(const std::string &path) {
    auto blobs = load_blobs<Real>(path);
    restore_store("extractor.enc", enc_.store(), blobs);
    restore_store("extractor.cls", cls_ps_, blobs);
  }

 private:
  NetConfig<Real> cfg_;
  StyleEncoder<Real> enc_;
  ParamStore<Real> cls_ps_;
  nn::LinearLayer<Real> cls1_, cls2_;
};

// Attach classification layers to a Stage-I encoder (values copied, so later
// fine-tuning never mutates the Stage-I model).
template <typename Real>
inline EmbeddingExtractor<Real> build_extractor(const NetConfig<Real> &cfg,
                                                StyleEncoder<Real> &stage1_encoder,
                                                Rng &rng) {
  EMOVC_CHECK(stage1_encoder.num_domains() == kNumEmotions,
              "build_extractor: encoder must have one head per emotion class");
  EmbeddingExtractor<Real> ext(cfg, rng);
  auto &dst = ext.encoder().store().params();
  auto &src = stage1_encoder.store().params();
  EMOVC_CHECK(dst.size() == src.size(), "build_extractor: parameter layout mismatch");
  for (size_t i = 0; i < src.size(); i++) {
    EMOVC_CHECK(dst[i].name == src[i].name, "build_extractor: parameter order mismatch");
    dst[i].var.mutable_value() = src[i].var.value();
  }
  return ext;
}

// ---------------------------------------------------------------------------
// Stage II: supervised fine-tuning for automatic extraction
// ---------------------------------------------------------------------------

struct Stage2Config {
  int steps = 400;
  int batch_size = 16;
  double lr = 1e-3;
  int val_every = 25;
  std::string select = "val_ce";  // or "val_acc"
  int segment_frames = 160;
  uint64_t seed = 1;
};

struct Stage2Result {
  std::vector<std::pair<int, double>> curve;  // (step, validation score)
  int best_step = -1;
  double best_score = std::numeric_limits<double>::infinity();
  double final_val_ce = 0.0;
  double final_val_accuracy = 0.0;
};

// Lowest-point selection on a validation curve; ties keep the earliest.
inline int select_best_checkpoint(const std::vector<std::pair<int, double>> &curve) {
  EMOVC_CHECK(!curve.empty(), "select_best_checkpoint: empty curve");
  int best = 0;
  for (size_t i = 1; i < curve.size(); i++)
    if (curve[i].second < curve[static_cast<size_t>(best)].second)
      best = static_cast<int>(i);
  return best;
}

namespace emb_detail {

template <typename Real>
inline std::pair<double, double> eval_val(EmbeddingExtractor<Real> &ext,
                                          const TrainingData &data, int segment) {
  const auto &val = data.split(Split::val);
  double ce = 0.0;
  int correct = 0, total = 0;
  for (int idx : val) {
    const ClipData &c = data.clips[static_cast<size_t>(idx)];
    EMOVC_CHECK(c.emotion >= 0, "train_stage2: unlabeled validation entry " << c.path);
    int t0 = std::max(0, (c.frames() - segment) / 2);
    int S = std::min(segment, c.frames());
    Tensor<Real> X({1, c.mel.dim(0), S});
    for (int m = 0; m < c.mel.dim(0); m++)
      for (int t = 0; t < S; t++) X.at(0, m, t) = static_cast<Real>(c.mel.at(m, t0 + t));
    auto fwd = ext.forward(ad::constant(std::move(X)));
    auto logp = ad::row_log_softmax(fwd.logits);
    ce += -static_cast<double>(logp.value().at(0, c.emotion));
    int argmax = 0;
    for (int k = 1; k < kNumEmotions; k++)
      if (fwd.logits.value().at(0, k) > fwd.logits.value().at(0, argmax)) argmax = k;
    correct += argmax == c.emotion ? 1 : 0;
    total++;
  }
  EMOVC_CHECK(total > 0, "train_stage2: empty validation split");
  return {ce / total, static_cast<double>(correct) / total};
}

}  // namespace emb_detail

template <typename Real>
inline Stage2Result train_stage2(EmbeddingExtractor<Real> &ext, const TrainingData &data,
                                 const Stage2Config &cfg) {
  for (int idx : data.split(Split::train))
    EMOVC_CHECK(data.clips[static_cast<size_t>(idx)].emotion >= 0,
                "train_stage2: unlabeled training entry "
                    << data.clips[static_cast<size_t>(idx)].path);
  EMOVC_CHECK(cfg.select == "val_ce" || cfg.select == "val_acc",
              "train_stage2: unknown selection criterion " << cfg.select);

  ext.set_stage2_trainable();
  AdamWConfig ocfg;
  ocfg.lr = cfg.lr;
  ocfg.weight_decay = 1e-4;
  AdamW<Real> opt(ext.stage2_params(), ocfg);
  Rng rng(cfg.seed ^ 0x5741474532ull);

  Stage2Result result;
  // snapshot of the best parameters seen
  std::vector<Tensor<Real>> best_params;
  auto snapshot = [&]() {
    best_params.clear();
    for (auto *p : ext.stage2_params()) best_params.push_back(p->var.value());
  };
  auto restore = [&]() {
    auto params = ext.stage2_params();
    EMOVC_CHECK(params.size() == best_params.size(), "train_stage2: snapshot mismatch");
    for (size_t i = 0; i < params.size(); i++)
      params[i]->var.mutable_value() = best_params[static_cast<size_t>(i)];
  };

  for (int step = 1; step <= cfg.steps; step++) {
    auto crops = sample_crops(data, Split::train, cfg.batch_size, cfg.segment_frames, rng);
    Tensor<Real> X = crops_to_mel<Real>(data, crops, cfg.segment_frames);
    std::vector<int> labels;
    for (const auto &cr : crops)
      labels.push_back(data.clips[static_cast<size_t>(cr.clip)].emotion);
    std::vector<char> inc(labels.size(), 1);
    opt.zero_grad();
    auto fwd = ext.forward(ad::Var<Real>::leaf(std::move(X), false));
    auto loss = ad::nll_rows(ad::row_log_softmax(fwd.logits), labels, inc);
    ad::backward(loss);
    opt.step();

    if (step % cfg.val_every == 0 || step == cfg.steps) {
      auto [ce, acc] = emb_detail::eval_val(ext, data, cfg.segment_frames);
      double score = cfg.select == "val_ce" ? ce : -acc;
      result.curve.emplace_back(step, score);
      if (score < result.best_score) {
        result.best_score = score;
        result.best_step = step;
        snapshot();
      }
    }
  }
  if (!best_params.empty()) restore();
  auto [ce, acc] = emb_detail::eval_val(ext, data, cfg.segment_frames);
  result.final_val_ce = ce;
  result.final_val_accuracy = acc;
  ext.set_frozen();
  return result;
}

}  // namespace emovc

#endif  // EMOVC_EMOTION_EMBEDDING_HPP
