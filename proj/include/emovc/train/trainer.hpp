// emovc/train/trainer.hpp

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

// Alternating adversarial training.  Each step runs a discriminator phase
// (update D, C_s, C_e with the generator frozen) followed by a generator
// phase (update G, SE, M with the critics frozen), each phase evaluated under
// both a mapped and a reference-encoded style draw.  Freezing is enforced by
// the autodiff requires_grad flags, so cross-phase gradients are exactly
// zero, not merely unapplied.
//
// The same trainer drives voice conversion (speaker domains) and the
// Stage-I emotion-conversion run (emotion domains, F0 conditioning and the
// source-speaker classifier disabled).

#ifndef EMOVC_TRAIN_TRAINER_HPP
#define EMOVC_TRAIN_TRAINER_HPP

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "emovc/audio/mel.hpp"
#include "emovc/emotion/embedding.hpp"
#include "emovc/losses/losses.hpp"
#include "emovc/nn/adamw.hpp"
#include "emovc/nn/checkpoint.hpp"
#include "emovc/train/config.hpp"
#include "emovc/train/dataset.hpp"

namespace emovc {

struct TrainSetup {
  DomainKind domain = DomainKind::Speaker;
  bool use_f0 = true;
  bool use_cs = true;   // adversarial source-speaker classifier in play
  bool use_asr = true;
  LossWeights weights;
  int max_steps = 0;  // 0 = derive from epochs
};

// Stage-I preset: the upstream objective on emotion domains, with the
// F0-conditioning path and the source-speaker classifier disabled.
inline TrainSetup stage1_setup(const LossWeights &base) {
  TrainSetup s;
  s.domain = DomainKind::Emotion;
  s.use_f0 = false;
  s.use_cs = false;
  s.weights = base;
  s.weights.af = s.weights.embed = s.weights.emog = s.weights.emod = 0.0;
  s.weights.aspk = s.weights.spk = 0.0;
  s.weights.f0 = 0.0;
  return s;
}

// Scope guard: temporarily freezes a set of stores (diversity-term second
// conversions are compared against as constants).
template <typename Real>
class FreezeScope {
 public:
  explicit FreezeScope(std::vector<ParamStore<Real> *> stores) : stores_(std::move(stores)) {
    for (auto *s : stores_) {
      was_.push_back(s->trainable());
      s->set_trainable(false);
    }
  }
  ~FreezeScope() {
    for (size_t i = 0; i < stores_.size(); i++) stores_[i]->set_trainable(was_[i]);
  }

 private:
  std::vector<ParamStore<Real> *> stores_;
  std::vector<bool> was_;
};

template <typename Real>
class Trainer {
 public:
  Trainer(const Config &config, const TrainingData &data, const TrainSetup &setup,
          EmbeddingExtractor<Real> *extractor = nullptr)
      : config_(config),
        data_(data),
        setup_(setup),
        extractor_(extractor),
        init_rng_(Rng(static_cast<uint64_t>(config.get_int("train.seed"))).fork("init")),
        bundle_(config.net<Real>(), data.domain_count(setup.domain), setup.use_f0,
                init_rng_),
        rng_(Rng(static_cast<uint64_t>(config.get_int("train.seed"))).fork("train")) {
    setup_.weights.validate();
    if (setup_.domain == DomainKind::Emotion) {
      for (int idx : data_.split(Split::train))
        EMOVC_CHECK(data_.clips[static_cast<size_t>(idx)].emotion >= 0,
                    "trainer: emotion-domain run requires labels on every entry; "
                        << data_.clips[static_cast<size_t>(idx)].path << " has none");
      std::vector<int> present(kNumEmotions, 0);
      for (int idx : data_.split(Split::train))
        present[static_cast<size_t>(data_.clips[static_cast<size_t>(idx)].emotion)] = 1;
      int classes = 0;
      for (int p : present) classes += p;
      EMOVC_CHECK(classes >= 2,
                  "trainer: emotion-domain run needs at least 2 emotion classes, got "
                      << classes);
    }
    if (setup_.weights.embed > 0.0)
      EMOVC_CHECK(extractor_ != nullptr,
                  "trainer: embedding loss active but no extractor provided");
    bundle_.config_hash = config_.run_hash();

    AdamWConfig ocfg;
    ocfg.lr = config_.get_double("train.lr");
    ocfg.beta1 = config_.get_double("train.beta1");
    ocfg.beta2 = config_.get_double("train.beta2");
    ocfg.eps = config_.get_double("train.adam_eps");
    ocfg.weight_decay = config_.get_double("train.weight_decay");
    ocfg.grad_clip = config_.get_double("train.grad_clip");
    opt_g_ = AdamW<Real>({&bundle_.G.store(), &bundle_.SE.store(), &bundle_.M.store()}, ocfg);
    opt_d_ = AdamW<Real>({&bundle_.D.store(), &bundle_.Cs.store(), &bundle_.Ce.store()}, ocfg);

    batch_cfg_.batch_size = static_cast<int>(config_.get_int("train.batch_size"));
    EMOVC_CHECK(batch_cfg_.batch_size >= 1, "trainer: batch size must be >= 1");
    batch_cfg_.segment_frames = config_.segment_frames();
    batch_cfg_.latent_dim = static_cast<int>(config_.get_int("net.latent_dim"));
    batch_cfg_.descriptor_window = static_cast<int>(config_.get_int("desc.window_frames"));
    batch_cfg_.domain = setup_.domain;
    by_domain_ = data_.train_by_domain(setup_.domain);
    kinds_ = config_.descriptor_kinds();
    center_freqs_ = MelExtractor(config_.mel()).center_freqs();

    // frozen components stay frozen through both phases
    bundle_.f0net.store().set_trainable(false);
    bundle_.lingnet.store().set_trainable(false);
    if (extractor_) extractor_->set_frozen();
  }

  ModelBundle<Real> &bundle() { return bundle_; }
  const std::vector<LossReport> &trace() const { return trace_; }
  int64_t step_count() const { return bundle_.step; }
  Rng &rng() { return rng_; }

  int64_t max_steps() const {
    if (setup_.max_steps > 0) return setup_.max_steps;
    int64_t per_epoch =
        (static_cast<int64_t>(data_.split(Split::train).size()) + batch_cfg_.batch_size - 1) /
        batch_cfg_.batch_size;
    return per_epoch * config_.get_int("train.epochs");
  }

  void set_run_dir(const std::string &dir) {
    run_dir_ = dir;
    if (!dir.empty()) {
      std::filesystem::create_directories(dir);
      config_.write_snapshot(dir + "/config.snapshot");
      log_.open(dir + "/train_log.txt", std::ios::app);
    }
  }

  // One full training step: discriminator phase then generator phase.
  LossReport step() {
    EMOVC_CHECK(!data_.split(Split::train).empty(), "trainer: empty training split");
    LossReport report;
    report.batch_size = batch_cfg_.batch_size;

    int d_reps = static_cast<int>(config_.get_int("train.d_steps_per_g"));
    TrainBatch<Real> batch;
    for (int r = 0; r < std::max(1, d_reps); r++) {
      batch = sample_batch<Real>(data_, rng_, batch_cfg_, by_domain_);
      run_discriminator_phase(batch, &report);
    }
    run_generator_phase(batch, &report);

    bundle_.step++;
    report.step = bundle_.step;
    for (int e : batch.emotion) report.labeled_count += e >= 0 ? 1 : 0;
    report.emotion_flagged = report.labeled_count == 0;
    report.total_g = total_generator_loss(report.g_terms, setup_.weights);
    report.total_d = total_discriminator_loss(report.d_terms, setup_.weights);

    if (!is_finite(report.total_g) || !is_finite(report.total_d)) {
      if (!run_dir_.empty()) save_checkpoint(run_dir_ + "/diagnostic_snapshot");
      throw std::runtime_error("trainer: non-finite loss at step " +
                               std::to_string(bundle_.step) +
                               (run_dir_.empty() ? "" : "; diagnostic snapshot written"));
    }
    trace_.push_back(report);
    if (log_.is_open()) log_ << report.serialize() << "\n" << std::flush;
    return report;
  }

  // Runs to max_steps with periodic checkpoints.
  void train(const std::function<void(const LossReport &)> &on_step = nullptr) {
    int64_t target = max_steps();
    int64_t ckpt_every = config_.get_int("train.checkpoint_every");
    while (bundle_.step < target) {
      LossReport r = step();
      if (on_step) on_step(r);
      if (!run_dir_.empty() && ckpt_every > 0 && bundle_.step % ckpt_every == 0)
        save_checkpoint(run_dir_ + "/checkpoint");
    }
    if (!run_dir_.empty()) save_checkpoint(run_dir_ + "/checkpoint");
  }

  // ------------------------------------------------------------------
  // Checkpointing
  // ------------------------------------------------------------------

  void save_checkpoint(const std::string &dir) {
    std::filesystem::create_directories(dir);
    save_bundle(dir + "/bundle.bin", bundle_);
    save_moments(dir + "/optim_g.bin", opt_g_);
    save_moments(dir + "/optim_d.bin", opt_d_);
    save_kv(dir + "/state.txt",
            {{"step", std::to_string(bundle_.step)},
             {"epoch", std::to_string(epoch())},
             {"config_hash", std::to_string(config_.run_hash())},
             {"rng", rng_.serialize()},
             {"opt_g_t", std::to_string(opt_g_.steps_taken())},
             {"opt_d_t", std::to_string(opt_d_.steps_taken())}});
    config_.write_snapshot(dir + "/config.snapshot");
  }

  void load_checkpoint(const std::string &dir) {
    auto kv = load_kv(dir + "/state.txt");
    uint64_t saved_hash = std::stoull(kv.at("config_hash"));
    if (saved_hash != config_.run_hash())
      throw ConfigError("trainer: refusing to resume: config hash mismatch (checkpoint " +
                        std::to_string(saved_hash) + " vs run " +
                        std::to_string(config_.run_hash()) + ")");
    load_bundle(dir + "/bundle.bin", bundle_);
    load_moments(dir + "/optim_g.bin", opt_g_);
    load_moments(dir + "/optim_d.bin", opt_d_);
    bundle_.step = std::stoll(kv.at("step"));
    opt_g_.set_steps_taken(std::stoll(kv.at("opt_g_t")));
    opt_d_.set_steps_taken(std::stoll(kv.at("opt_d_t")));
    rng_ = Rng::deserialize(kv.at("rng"));
  }

  int64_t epoch() const {
    int64_t n_train = static_cast<int64_t>(data_.split(Split::train).size());
    return n_train == 0 ? 0 : bundle_.step * batch_cfg_.batch_size / n_train;
  }

  // ------------------------------------------------------------------
  // Conversion
  // ------------------------------------------------------------------

  struct Conversion {
    MelSpectrogram mel;
    Waveform wave;
  };

  // Full-utterance conversion with Griffin-Lim waveform fallback.  The style
  // comes either from a reference clip (style_ref != nullptr) or a latent
  // draw seeded by latent_seed.
  Conversion convert(const Waveform &source, int target_code, const Waveform *style_ref,
                     uint64_t latent_seed, int griffin_lim_iters = 60) {
    EMOVC_CHECK(target_code >= 0 && target_code < bundle_.num_domains,
                "convert: unknown domain code " << target_code);
    MelExtractor ext(config_.mel());
    MelSpectrogram src_mel = ext.log_mel(source);
    int frames = src_mel.values.dim(1);

    FreezeScope<Real> freeze({&bundle_.G.store(), &bundle_.SE.store(), &bundle_.M.store(),
                              &bundle_.D.store(), &bundle_.Cs.store(), &bundle_.Ce.store()});
    Tensor<Real> X({1, src_mel.values.dim(0), frames});
    for (int m = 0; m < src_mel.values.dim(0); m++)
      for (int t = 0; t < frames; t++) X.at(0, m, t) = static_cast<Real>(src_mel.values.at(m, t));
    auto Xv = ad::constant(std::move(X));

    ad::Var<Real> style;
    if (style_ref != nullptr) {
      MelSpectrogram ref_mel = ext.log_mel(*style_ref);
      Tensor<Real> R({1, ref_mel.values.dim(0), ref_mel.values.dim(1)});
      for (int m = 0; m < ref_mel.values.dim(0); m++)
        for (int t = 0; t < ref_mel.values.dim(1); t++)
          R.at(0, m, t) = static_cast<Real>(ref_mel.values.at(m, t));
      style = bundle_.SE.forward(ad::constant(std::move(R)), {target_code});
    } else {
      Rng zr(latent_seed ^ 0x636f6e76ull);
      Tensor<Real> z({1, batch_cfg_.latent_dim});
      for (int64_t i = 0; i < z.size(); i++) z[i] = static_cast<Real>(zr.normal());
      style = bundle_.M.forward(ad::constant(std::move(z)), {target_code});
    }

    ad::Var<Real> femb;
    if (bundle_.use_f0) femb = bundle_.f0net.forward(Xv).embedding;
    auto fake = bundle_.G.forward(Xv, femb, style);

    Conversion out;
    out.mel.center_freqs = src_mel.center_freqs;
    out.mel.hop_seconds = src_mel.hop_seconds;
    out.mel.values = Tensor<double>({src_mel.values.dim(0), frames});
    for (int m = 0; m < src_mel.values.dim(0); m++)
      for (int t = 0; t < frames; t++)
        out.mel.values.at(m, t) = static_cast<double>(fake.value().at(0, m, t));
    out.wave = ext.invert(out.mel, griffin_lim_iters, latent_seed);
    return out;
  }

 private:
  // ------------------------------------------------------------------
  // Phases
  // ------------------------------------------------------------------

  std::vector<int> all_ones(int n) const { return std::vector<int>(static_cast<size_t>(n), 1); }

  void run_discriminator_phase(const TrainBatch<Real> &batch, LossReport *report) {
    using namespace ad;
    const auto &w = setup_.weights;
    // phase isolation: generator side frozen, critic side live
    bundle_.G.store().set_trainable(false);
    bundle_.SE.store().set_trainable(false);
    bundle_.M.store().set_trainable(false);
    bundle_.D.store().set_trainable(true);
    bundle_.Cs.store().set_trainable(setup_.use_cs);
    bundle_.Ce.store().set_trainable(true);
    opt_d_.zero_grad();

    auto Xv = constant(Tensor<Real>(batch.X));
    Var<Real> femb;
    if (setup_.use_f0) femb = bundle_.f0net.forward(Xv).embedding;

    auto adv_real = loss::adv_real_ce(bundle_.D.forward(Xv, batch.src_domain));
    Var<Real> adv_fake, spk;
    for (int ctx = 0; ctx < 2; ctx++) {
      Var<Real> h1;
      {
        // style and fake are constants in this phase (their stores are frozen)
        h1 = ctx == 0 ? bundle_.M.forward(constant(Tensor<Real>(batch.z1)), batch.trg_domain)
                      : bundle_.SE.forward(constant(Tensor<Real>(batch.Xref1)), batch.trg_domain);
      }
      auto fake = bundle_.G.forward(Xv, femb, h1);
      auto term = loss::adv_fake_ce(bundle_.D.forward(fake, batch.trg_domain));
      adv_fake = ctx == 0 ? term : add(adv_fake, term);
      if (setup_.use_cs && w.spk > 0.0) {
        auto ce = nll_rows(row_log_softmax(bundle_.Cs.logits(fake)), batch.src_domain,
                           std::vector<char>(batch.src_domain.size(), 1));
        spk = ctx == 0 ? ce : add(spk, ce);
      }
    }
    adv_fake = scalar_mul(adv_fake, Real(0.5));
    auto d_ce = add(adv_real, adv_fake);

    Var<Real> total = d_ce;
    double emod_value = 0.0, spk_value = 0.0;
    if (w.emod > 0.0) {
      auto emod = loss::emotion_ce(bundle_.Ce.logits(Xv), batch.emotion);
      emod_value = static_cast<double>(emod.value()[0]);
      total = add(total, scalar_mul(emod, static_cast<Real>(w.emod)));
    }
    if (spk.defined()) {
      spk = scalar_mul(spk, Real(0.5));
      spk_value = static_cast<double>(spk.value()[0]);
      total = add(total, scalar_mul(spk, static_cast<Real>(w.spk)));
    }
    backward(total);
    opt_d_.step();

    // Reported adv is the quantity the discriminator maximizes, so the
    // composed objective is -adv + w_emod*emod + w_spk*spk.
    report->d_terms["adv"] = -static_cast<double>(d_ce.value()[0]);
    report->d_terms["emod"] = emod_value;
    report->d_terms["spk"] = spk_value;
  }

  void run_generator_phase(const TrainBatch<Real> &batch, LossReport *report) {
    using namespace ad;
    const auto &w = setup_.weights;
    bundle_.G.store().set_trainable(true);
    bundle_.SE.store().set_trainable(true);
    bundle_.M.store().set_trainable(true);
    bundle_.D.store().set_trainable(false);
    bundle_.Cs.store().set_trainable(false);
    bundle_.Ce.store().set_trainable(false);
    opt_g_.zero_grad();

    const int B = batch.X.dim(0);
    auto Xv = constant(Tensor<Real>(batch.X));
    Var<Real> femb, f0_src, ling_src, emb_src;
    if (setup_.use_f0) {
      auto out = bundle_.f0net.forward(Xv);
      femb = out.embedding;
      f0_src = out.f0;
    }
    if (setup_.use_asr && w.asr > 0.0) ling_src = bundle_.lingnet.features(Xv);
    if (extractor_ && w.embed > 0.0) emb_src = extractor_->extract(Xv);

    // source-side descriptor series, one per (kind, sample); constants
    std::vector<std::vector<Var<Real>>> src_series;
    if (w.af > 0.0) src_series = batch_series(Xv, f0_src, batch);

    auto h_src = bundle_.SE.forward(Xv, batch.src_domain);

    std::map<std::string, Var<Real>> acc;
    auto accumulate = [&](const std::string &name, const Var<Real> &v) {
      auto it = acc.find(name);
      if (it == acc.end()) acc.emplace(name, v);
      else it->second = add(it->second, v);
    };

    for (int ctx = 0; ctx < 2; ctx++) {
      Var<Real> h1 = ctx == 0
                         ? bundle_.M.forward(constant(Tensor<Real>(batch.z1)), batch.trg_domain)
                         : bundle_.SE.forward(constant(Tensor<Real>(batch.Xref1)), batch.trg_domain);
      auto fake = bundle_.G.forward(Xv, femb, h1);
      accumulate("adv", loss::adv_nonsaturating(bundle_.D.forward(fake, batch.trg_domain)));
      accumulate("sty", mean_abs_diff(bundle_.SE.forward(fake, batch.trg_domain), h1));

      if (w.ds > 0.0) {
        Var<Real> fake2;
        {
          FreezeScope<Real> freeze(
              {&bundle_.G.store(), &bundle_.SE.store(), &bundle_.M.store()});
          Var<Real> h2 = ctx == 0 ? bundle_.M.forward(constant(Tensor<Real>(batch.z2)),
                                                      batch.trg_domain)
                                  : bundle_.SE.forward(constant(Tensor<Real>(batch.Xref2)),
                                                       batch.trg_domain);
          fake2 = bundle_.G.forward(Xv, femb, h2);
        }
        accumulate("ds", mean_abs_diff(fake, fake2));
      }

      if (w.cyc > 0.0) {
        Var<Real> femb_fake;
        Var<Real> f0_fake;
        if (setup_.use_f0) {
          auto out = bundle_.f0net.forward(fake);
          femb_fake = out.embedding;
          f0_fake = out.f0;
        }
        auto rec = bundle_.G.forward(fake, femb_fake, h_src);
        accumulate("cyc", mean_abs_diff(rec, Xv));
        if (setup_.use_f0 && w.f0 > 0.0)
          accumulate("f0", loss::f0_consistency(f0_src, f0_fake, batch.voiced));
      } else if (setup_.use_f0 && w.f0 > 0.0) {
        accumulate("f0",
                   loss::f0_consistency(f0_src, bundle_.f0net.forward(fake).f0, batch.voiced));
      }

      if (w.emog > 0.0)
        accumulate("emog", loss::emotion_ce(bundle_.Ce.logits(fake), batch.emotion));
      if (setup_.use_cs && w.aspk > 0.0)
        accumulate("aspk",
                   nll_rows(row_log_softmax(bundle_.Cs.logits(fake)), batch.trg_domain,
                            std::vector<char>(batch.trg_domain.size(), 1)));
      if (setup_.use_asr && w.asr > 0.0)
        accumulate("asr", mean_abs_diff(bundle_.lingnet.features(fake), ling_src));
      if (extractor_ && w.embed > 0.0)
        accumulate("embed", mean_abs_diff(extractor_->extract(fake), emb_src));
      if (w.af > 0.0) {
        Var<Real> f0_fake_for_desc;
        bool need_f0 = false;
        for (auto k : kinds_) need_f0 = need_f0 || k == DescriptorKind::DeltaF0;
        if (need_f0 && setup_.use_f0) f0_fake_for_desc = bundle_.f0net.forward(fake).f0;
        auto conv_series = batch_series(fake, f0_fake_for_desc, batch);
        std::vector<loss::SeriesPair<Real>> pairs;
        std::vector<DescriptorKind> pair_kinds;
        for (size_t k = 0; k < kinds_.size(); k++)
          for (int b = 0; b < B; b++) {
            pairs.push_back({conv_series[k][static_cast<size_t>(b)],
                             src_series[k][static_cast<size_t>(b)]});
            pair_kinds.push_back(kinds_[k]);
          }
        accumulate("af", loss::acoustic_feature(pairs, &report->empty_series, &pair_kinds));
      }
    }

    Var<Real> total;
    auto weighted = [&](const std::string &name, double weight, double sign = 1.0) {
      auto it = acc.find(name);
      if (it == acc.end()) return;
      auto mean_ctx = scalar_mul(it->second, Real(0.5));
      report->g_terms[name] = static_cast<double>(mean_ctx.value()[0]);
      if (weight == 0.0) return;
      auto term = scalar_mul(mean_ctx, static_cast<Real>(sign * weight));
      total = total.defined() ? add(total, term) : term;
    };
    weighted("adv", 1.0);
    weighted("af", w.af);
    weighted("embed", w.embed);
    weighted("emog", w.emog);
    weighted("aspk", w.aspk);
    weighted("sty", w.sty);
    weighted("ds", w.ds, -1.0);
    weighted("f0", w.f0);
    weighted("asr", w.asr);
    weighted("cyc", w.cyc);
    // make sure every standard term is present in the report
    for (const char *name : {"adv", "sty", "ds", "cyc", "f0", "asr", "emog", "aspk", "af", "embed"})
      if (!report->g_terms.count(name)) report->g_terms[name] = 0.0;

    backward(total);
    opt_g_.step();
  }

  // Per-(kind, sample) descriptor series for a batch of mels.
  std::vector<std::vector<ad::Var<Real>>> batch_series(const ad::Var<Real> &mels,
                                                       const ad::Var<Real> &f0,
                                                       const TrainBatch<Real> &batch) {
    const int B = batch.X.dim(0);
    std::vector<std::vector<ad::Var<Real>>> out(kinds_.size());
    for (size_t k = 0; k < kinds_.size(); k++) {
      out[k].resize(static_cast<size_t>(B));
      for (int b = 0; b < B; b++) {
        ad::Var<Real> mel_b = ad::slice_batch(mels, b);
        ad::Var<Real> f0_b;
        if (kinds_[k] == DescriptorKind::DeltaF0) {
          if (!f0.defined()) continue;  // no differentiable F0 available
          f0_b = ad::slice_batch(f0, b);
        }
        out[k][static_cast<size_t>(b)] = descriptor_series_var<Real>(
            kinds_[k], mel_b, center_freqs_, f0_b, batch.plans[static_cast<size_t>(b)]);
      }
    }
    return out;
  }

  Config config_;
  const TrainingData &data_;
  TrainSetup setup_;
  EmbeddingExtractor<Real> *extractor_;
  Rng init_rng_;
  ModelBundle<Real> bundle_;
  Rng rng_;
  AdamW<Real> opt_g_, opt_d_;
  BatchConfig batch_cfg_;
  std::vector<std::vector<int>> by_domain_;
  std::vector<DescriptorKind> kinds_;
  std::vector<double> center_freqs_;
  std::vector<LossReport> trace_;
  std::string run_dir_;
  std::ofstream log_;

  void save_moments(const std::string &path, AdamW<Real> &opt) {
    std::vector<NamedTensor<Real>> blobs;
    for (size_t i = 0; i < opt.moments_m().size(); i++) {
      blobs.push_back({"m." + std::to_string(i), &opt.moments_m()[i]});
      blobs.push_back({"v." + std::to_string(i), &opt.moments_v()[i]});
    }
    save_blobs(path, blobs, config_.run_hash());
  }

  void load_moments(const std::string &path, AdamW<Real> &opt) {
    auto blobs = load_blobs<Real>(path);
    for (size_t i = 0; i < opt.moments_m().size(); i++) {
      opt.moments_m()[i] = blobs.tensors.at("m." + std::to_string(i));
      opt.moments_v()[i] = blobs.tensors.at("v." + std::to_string(i));
    }
  }
};

}  // namespace emovc

#endif  // EMOVC_TRAIN_TRAINER_HPP
