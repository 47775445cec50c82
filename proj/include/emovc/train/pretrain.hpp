// emovc/train/pretrain.hpp

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

// Supervised pretraining for the two frozen components: the F0 regressor is
// fit against the pitch oracle, the linguistic extractor against the corpus
// phone labels.  Both are frozen before adversarial training begins.

#ifndef EMOVC_TRAIN_PRETRAIN_HPP
#define EMOVC_TRAIN_PRETRAIN_HPP

#include <algorithm>
#include <vector>

#include "emovc/nn/adamw.hpp"
#include "emovc/nn/networks.hpp"
#include "emovc/train/dataset.hpp"

namespace emovc {

struct PretrainConfig {
  int steps = 800;
  int batch_size = 16;
  double lr = 1e-3;
  int segment_frames = 160;
  uint64_t seed = 1;
};

struct F0PretrainResult {
  double val_median_abs_err_hz = 0.0;  // voiced frames only
  double final_loss = 0.0;
};

template <typename Real>
inline F0PretrainResult pretrain_f0(F0Net<Real> &net, const TrainingData &data,
                                    const PretrainConfig &cfg) {
  net.store().set_trainable(true);
  AdamWConfig ocfg;
  ocfg.lr = cfg.lr;
  AdamW<Real> opt({&net.store()}, ocfg);
  Rng rng(cfg.seed ^ 0x463052ull);

  F0PretrainResult result;
  for (int s = 0; s < cfg.steps; s++) {
    auto crops = sample_crops(data, Split::train, cfg.batch_size, cfg.segment_frames, rng);
    Tensor<Real> X = crops_to_mel<Real>(data, crops, cfg.segment_frames);
    int B = static_cast<int>(crops.size()), S = cfg.segment_frames;
    Tensor<Real> target({B, S}), weight({B, S});
    for (int b = 0; b < B; b++) {
      const ClipData &c = data.clips[static_cast<size_t>(crops[static_cast<size_t>(b)].clip)];
      int t0 = crops[static_cast<size_t>(b)].t0;
      for (int t = 0; t < S; t++) {
        bool voiced = c.mask.voiced[static_cast<size_t>(t0 + t)];
        target.at(b, t) = static_cast<Real>(voiced ? c.f0[static_cast<size_t>(t0 + t)] : 0.0);
        weight.at(b, t) = voiced ? Real(1) : Real(0.15);
      }
    }
    opt.zero_grad();
    auto out = net.forward(ad::constant(std::move(X)));
    auto loss = loss::masked_l1(out.f0, ad::constant(std::move(target)), weight);
    ad::backward(loss);
    opt.step();
    result.final_loss = static_cast<double>(loss.value()[0]);
  }
  net.store().set_trainable(false);

  // median |err| on voiced frames of the held-out split
  std::vector<double> errs;
  Split eval_split = data.split(Split::val).empty() ? Split::train : Split::val;
  for (int idx : data.split(eval_split)) {
    const ClipData &c = data.clips[static_cast<size_t>(idx)];
    Tensor<Real> X({1, c.mel.dim(0), c.frames()});
    for (int m = 0; m < c.mel.dim(0); m++)
      for (int t = 0; t < c.frames(); t++) X.at(0, m, t) = static_cast<Real>(c.mel.at(m, t));
    auto out = net.forward(ad::constant(std::move(X)));
    for (int t = 0; t < c.frames(); t++)
      if (c.mask.voiced[static_cast<size_t>(t)])
        errs.push_back(std::abs(static_cast<double>(out.f0.value().at(0, t)) -
                                c.f0[static_cast<size_t>(t)]));
  }
  if (!errs.empty()) {
    std::sort(errs.begin(), errs.end());
    result.val_median_abs_err_hz = errs[errs.size() / 2];
  }
  return result;
}

struct LingPretrainResult {
  double val_frame_accuracy = 0.0;
  double final_loss = 0.0;
};

template <typename Real>
inline LingPretrainResult pretrain_ling(LingNet<Real> &net, const TrainingData &data,
                                        const PretrainConfig &cfg) {
  EMOVC_CHECK(data.has_phones, "pretrain_ling: corpus has no phone-label sidecars");
  net.store().set_trainable(true);
  AdamWConfig ocfg;
  ocfg.lr = cfg.lr;
  AdamW<Real> opt({&net.store()}, ocfg);
  Rng rng(cfg.seed ^ 0x4c494e47ull);

  LingPretrainResult result;
  for (int s = 0; s < cfg.steps; s++) {
    auto crops = sample_crops(data, Split::train, cfg.batch_size, cfg.segment_frames, rng);
    Tensor<Real> X = crops_to_mel<Real>(data, crops, cfg.segment_frames);
    int B = static_cast<int>(crops.size()), S = cfg.segment_frames;
    std::vector<int> labels(static_cast<size_t>(B) * S, 0);
    std::vector<char> inc(static_cast<size_t>(B) * S, 0);
    for (int b = 0; b < B; b++) {
      const ClipData &c = data.clips[static_cast<size_t>(crops[static_cast<size_t>(b)].clip)];
      if (c.phones.empty()) continue;
      int t0 = crops[static_cast<size_t>(b)].t0;
      for (int t = 0; t < S; t++) {
        labels[static_cast<size_t>(b) * S + t] = c.phones[static_cast<size_t>(t0 + t)];
        inc[static_cast<size_t>(b) * S + t] = 1;
      }
    }
    opt.zero_grad();
    auto logits = net.logits(ad::constant(std::move(X)));
    auto loss = ad::nll_frames(ad::channel_log_softmax(logits), labels, inc);
    ad::backward(loss);
    opt.step();
    result.final_loss = static_cast<double>(loss.value()[0]);
  }
  net.store().set_trainable(false);

  int correct = 0, total = 0;
  Split eval_split = data.split(Split::val).empty() ? Split::train : Split::val;
  for (int idx : data.split(eval_split)) {
    const ClipData &c = data.clips[static_cast<size_t>(idx)];
    if (c.phones.empty()) continue;
    Tensor<Real> X({1, c.mel.dim(0), c.frames()});
    for (int m = 0; m < c.mel.dim(0); m++)
      for (int t = 0; t < c.frames(); t++) X.at(0, m, t) = static_cast<Real>(c.mel.at(m, t));
    auto logits = net.logits(ad::constant(std::move(X)));
    int C = logits.value().dim(1);
    for (int t = 0; t < c.frames(); t++) {
      int argmax = 0;
      for (int k = 1; k < C; k++)
        if (logits.value().at(0, k, t) > logits.value().at(0, argmax, t)) argmax = k;
      correct += argmax == c.phones[static_cast<size_t>(t)] ? 1 : 0;
      total++;
    }
  }
  if (total > 0) result.val_frame_accuracy = static_cast<double>(correct) / total;
  return result;
}

// Plain supervised trainer for a mel classifier (capacity checks and small
// tools; the adversarial loop trains C_e for real).
template <typename Real>
struct ClassifierTrainResult {
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

template <typename Real>
inline ClassifierTrainResult<Real> train_emotion_classifier(Classifier<Real> &cls,
                                                            const TrainingData &data,
                                                            const PretrainConfig &cfg) {
  cls.store().set_trainable(true);
  AdamWConfig ocfg;
  ocfg.lr = cfg.lr;
  AdamW<Real> opt({&cls.store()}, ocfg);
  Rng rng(cfg.seed ^ 0x434c53ull);
  for (int s = 0; s < cfg.steps; s++) {
    auto crops = sample_crops(data, Split::train, cfg.batch_size, cfg.segment_frames, rng);
    Tensor<Real> X = crops_to_mel<Real>(data, crops, cfg.segment_frames);
    std::vector<int> labels;
    std::vector<char> inc;
    for (const auto &cr : crops) {
      int e = data.clips[static_cast<size_t>(cr.clip)].emotion;
      labels.push_back(std::max(e, 0));
      inc.push_back(e >= 0 ? 1 : 0);
    }
    opt.zero_grad();
    auto loss = ad::nll_rows(ad::row_log_softmax(cls.logits(ad::constant(std::move(X)))),
                             labels, inc);
    ad::backward(loss);
    opt.step();
  }
  cls.store().set_trainable(false);

  ClassifierTrainResult<Real> result;
  auto accuracy_on = [&](Split split) {
    int correct = 0, total = 0;
    for (int idx : data.split(split)) {
      const ClipData &c = data.clips[static_cast<size_t>(idx)];
      if (c.emotion < 0) continue;
      Tensor<Real> X({1, c.mel.dim(0), c.frames()});
      for (int m = 0; m < c.mel.dim(0); m++)
        for (int t = 0; t < c.frames(); t++) X.at(0, m, t) = static_cast<Real>(c.mel.at(m, t));
      auto logits = cls.logits(ad::constant(std::move(X)));
      int argmax = 0;
      for (int k = 1; k < cls.num_classes(); k++)
        if (logits.value().at(0, k) > logits.value().at(0, argmax)) argmax = k;
      correct += argmax == c.emotion ? 1 : 0;
      total++;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
  };
  result.train_accuracy = accuracy_on(Split::train);
  result.val_accuracy = accuracy_on(Split::val);
  return result;
}

}  // namespace emovc

#endif  // EMOVC_TRAIN_PRETRAIN_HPP
