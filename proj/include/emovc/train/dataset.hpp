// emovc/train/dataset.hpp

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

// In-memory training corpus: per clip, the log-mel, the pitch-oracle contour
// and voicing mask, and any sidecar phone labels.  Batch assembly draws from
// one RNG stream in a fixed order; emotion labels are never consulted during
// sampling, which is what makes the labels-stripped replay bit-identical on
// every unsupervised term.

#ifndef EMOVC_TRAIN_DATASET_HPP
#define EMOVC_TRAIN_DATASET_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "emovc/audio/manifest.hpp"
#include "emovc/audio/mel.hpp"
#include "emovc/audio/pitch.hpp"
#include "emovc/audio/resample.hpp"
#include "emovc/features/descriptors.hpp"

namespace emovc {

struct ClipData {
  std::string path;
  int speaker_code = 0;
  int emotion = -1;
  Split split = Split::train;
  Tensor<double> mel;       // [n_mels, frames]
  std::vector<double> f0;   // oracle contour
  std::vector<double> conf;
  VoicingMask mask;
  std::vector<int> phones;  // per frame; empty when no sidecar
  std::string text;

  int frames() const { return mel.dim(1); }
};

enum class DomainKind { Speaker, Emotion };

struct TrainingData {
  MelConfig mel_cfg;
  double voicing_threshold = 0.5;
  int num_speakers = 0;
  std::vector<ClipData> clips;
  std::vector<int> split_index[3];
  bool has_phones = false;

  int domain_count(DomainKind kind) const {
    return kind == DomainKind::Speaker ? num_speakers : kNumEmotions;
  }

  int domain_of(const ClipData &c, DomainKind kind) const {
    return kind == DomainKind::Speaker ? c.speaker_code : c.emotion;
  }

  const std::vector<int> &split(Split s) const {
    return split_index[static_cast<int>(s)];
  }

  int labeled_count() const {
    int n = 0;
    for (const auto &c : clips) n += c.emotion >= 0 ? 1 : 0;
    return n;
  }

  // Training clips grouped by domain code (for reference draws).
  std::vector<std::vector<int>> train_by_domain(DomainKind kind) const {
    std::vector<std::vector<int>> by(static_cast<size_t>(domain_count(kind)));
    for (int idx : split(Split::train)) {
      int d = domain_of(clips[static_cast<size_t>(idx)], kind);
      if (d >= 0) by[static_cast<size_t>(d)].push_back(idx);
    }
    return by;
  }
};

inline TrainingData load_training_data(const DatasetManifest &manifest,
                                       const MelConfig &mel_cfg,
                                       double voicing_threshold = 0.5) {
  TrainingData data;
  data.mel_cfg = mel_cfg;
  data.voicing_threshold = voicing_threshold;
  data.num_speakers = manifest.num_speakers;
  MelExtractor ext(mel_cfg);
  for (const auto &e : manifest.entries) {
    ClipData c;
    c.path = e.audio_path;
    c.speaker_code = e.speaker_code;
    c.emotion = e.emotion;
    c.split = e.split;
    Waveform w = load_waveform(e.audio_path);
    if (w.sample_rate != mel_cfg.sample_rate) w = resample(w, mel_cfg.sample_rate);
    c.mel = ext.log_mel(w).values;
    F0Contour f0 = oracle_f0(w, mel_cfg);
    c.f0 = f0.f0_hz;
    c.conf = f0.confidence;
    c.mask = voicing_mask(f0, voicing_threshold);

    std::string stem = e.audio_path.substr(0, e.audio_path.rfind('.'));
    if (std::filesystem::exists(stem + ".phn")) {
      std::ifstream phn(stem + ".phn");
      int v;
      while (phn >> v) c.phones.push_back(v);
      EMOVC_CHECK(static_cast<int>(c.phones.size()) == c.frames(),
                  "load_training_data: phone labels misaligned for " << e.audio_path);
      data.has_phones = true;
    }
    if (std::filesystem::exists(stem + ".txt")) {
      std::ifstream txt(stem + ".txt");
      std::getline(txt, c.text);
    }
    data.split_index[static_cast<int>(e.split)].push_back(
        static_cast<int>(data.clips.size()));
    data.clips.push_back(std::move(c));
  }
  return data;
}

// ---------------------------------------------------------------------------
// Batch assembly
// ---------------------------------------------------------------------------

struct CropRef {
  int clip = 0;
  int t0 = 0;
};

template <typename Real>
struct TrainBatch {
  Tensor<Real> X;  // [B, n_mels, S]
  std::vector<int> src_domain, trg_domain;
  std::vector<int> emotion;  // -1 for unlabeled
  Tensor<Real> Xref1, Xref2;
  Tensor<Real> z1, z2;
  Tensor<Real> voiced;  // [B, S] 0/1 from the source masks
  std::vector<VoicingMask> masks;
  std::vector<DescriptorWindowPlan<Real>> plans;
  std::vector<CropRef> crops;
  int segment = 0;
};

struct BatchConfig {
  int batch_size = 16;
  int segment_frames = 160;
  int latent_dim = 16;
  int descriptor_window = 8;
  DomainKind domain = DomainKind::Speaker;
};

namespace dataset_detail {

template <typename Real>
inline void copy_crop(const ClipData &c, int t0, int S, Tensor<Real> *dst, int b) {
  int M = c.mel.dim(0);
  for (int m = 0; m < M; m++)
    for (int t = 0; t < S; t++)
      dst->at(b, m, t) = static_cast<Real>(c.mel.at(m, t0 + t));
}

inline int crop_offset(const ClipData &c, int S, Rng &rng) {
  EMOVC_CHECK(c.frames() >= S, "sample_batch: clip shorter than one training segment: "
                                   << c.path << " (" << c.frames() << " < " << S << ")");
  int slack = c.frames() - S;
  return slack == 0 ? 0 : static_cast<int>(rng.uniform_int(slack + 1));
}

}  // namespace dataset_detail

// Draw order is fixed: per item (source clip, crop, target domain, ref1,
// crop1, ref2, crop2), then the two latent batches.  Labels are copied but
// never drive a draw.
template <typename Real>
inline TrainBatch<Real> sample_batch(const TrainingData &data, Rng &rng,
                                     const BatchConfig &cfg,
                                     const std::vector<std::vector<int>> &by_domain) {
  const auto &train = data.split(Split::train);
  EMOVC_CHECK(!train.empty(), "sample_batch: empty training split");
  int B = cfg.batch_size, S = cfg.segment_frames;
  int n_mels = data.mel_cfg.n_mels;
  int K = data.domain_count(cfg.domain);

  TrainBatch<Real> batch;
  batch.segment = S;
  batch.X = Tensor<Real>({B, n_mels, S});
  batch.Xref1 = Tensor<Real>({B, n_mels, S});
  batch.Xref2 = Tensor<Real>({B, n_mels, S});
  batch.voiced = Tensor<Real>({B, S});
  batch.src_domain.resize(static_cast<size_t>(B));
  batch.trg_domain.resize(static_cast<size_t>(B));
  batch.emotion.resize(static_cast<size_t>(B));
  batch.masks.resize(static_cast<size_t>(B));
  batch.plans.resize(static_cast<size_t>(B));
  batch.crops.resize(static_cast<size_t>(B));

  for (int b = 0; b < B; b++) {
    int idx = train[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(train.size())))];
    const ClipData &src = data.clips[static_cast<size_t>(idx)];
    int src_dom = data.domain_of(src, cfg.domain);
    EMOVC_CHECK(src_dom >= 0, "sample_batch: clip without a domain code (unlabeled "
                              "entry in an emotion-domain run): " << src.path);
    int t0 = dataset_detail::crop_offset(src, S, rng);
    dataset_detail::copy_crop(src, t0, S, &batch.X, b);
    batch.crops[static_cast<size_t>(b)] = {idx, t0};
    batch.src_domain[static_cast<size_t>(b)] = src_dom;
    batch.emotion[static_cast<size_t>(b)] = src.emotion;

    VoicingMask cropped;
    cropped.source = src.mask.source;
    cropped.voiced.assign(src.mask.voiced.begin() + t0, src.mask.voiced.begin() + t0 + S);
    for (int t = 0; t < S; t++)
      batch.voiced.at(b, t) = cropped.voiced[static_cast<size_t>(t)] ? Real(1) : Real(0);
    batch.plans[static_cast<size_t>(b)] =
        build_descriptor_plan<Real>(cropped, cfg.descriptor_window);
    batch.masks[static_cast<size_t>(b)] = std::move(cropped);

    int trg = static_cast<int>(rng.uniform_int(K));
    // target domain must have reference material
    while (by_domain[static_cast<size_t>(trg)].empty()) trg = (trg + 1) % K;
    batch.trg_domain[static_cast<size_t>(b)] = trg;
    for (int r = 0; r < 2; r++) {
      const auto &pool = by_domain[static_cast<size_t>(trg)];
      int ridx = pool[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(pool.size())))];
      const ClipData &ref = data.clips[static_cast<size_t>(ridx)];
      int rt0 = dataset_detail::crop_offset(ref, S, rng);
      dataset_detail::copy_crop(ref, rt0, S, r == 0 ? &batch.Xref1 : &batch.Xref2, b);
    }
  }
  batch.z1 = Tensor<Real>({B, cfg.latent_dim});
  batch.z2 = Tensor<Real>({B, cfg.latent_dim});
  for (int64_t i = 0; i < batch.z1.size(); i++) batch.z1[i] = static_cast<Real>(rng.normal());
  for (int64_t i = 0; i < batch.z2.size(); i++) batch.z2[i] = static_cast<Real>(rng.normal());
  return batch;
}

// Simple crop drawer for the supervised pretraining loops.
inline std::vector<CropRef> sample_crops(const TrainingData &data, Split split, int count,
                                         int segment, Rng &rng) {
  const auto &idxs = data.split(split);
  EMOVC_CHECK(!idxs.empty(), "sample_crops: empty split");
  std::vector<CropRef> out;
  for (int i = 0; i < count; i++) {
    int idx = idxs[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(idxs.size())))];
    out.push_back({idx, dataset_detail::crop_offset(data.clips[static_cast<size_t>(idx)],
                                                    segment, rng)});
  }
  return out;
}

template <typename Real>
inline Tensor<Real> crops_to_mel(const TrainingData &data, const std::vector<CropRef> &crops,
                                 int segment) {
  Tensor<Real> X({static_cast<int>(crops.size()), data.mel_cfg.n_mels, segment});
  for (size_t b = 0; b < crops.size(); b++)
    dataset_detail::copy_crop(data.clips[static_cast<size_t>(crops[b].clip)], crops[b].t0,
                              segment, &X, static_cast<int>(b));
  return X;
}

}  // namespace emovc

#endif  // EMOVC_TRAIN_DATASET_HPP
