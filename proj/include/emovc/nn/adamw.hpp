// emovc/nn/adamw.hpp

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

#ifndef EMOVC_NN_ADAMW_HPP
#define EMOVC_NN_ADAMW_HPP

#include <vector>

#include "emovc/nn/nn.hpp"

namespace emovc {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;  // decoupled
  double grad_clip = 0.0;      // 0 = off; otherwise global max-abs clip
};

// Adam with decoupled weight decay over a fixed parameter list.  Moments are
// part of TrainState and serialize bit-exactly for resumption.
template <typename Real>
class AdamW {
 public:
  AdamW() = default;

  AdamW(std::vector<ParamStore<Real> *> stores, AdamWConfig cfg) : cfg_(cfg) {
    for (auto *s : stores)
      for (auto &p : s->params()) params_.push_back(p.var);
    init_moments();
  }

  AdamW(std::vector<Param<Real> *> params, AdamWConfig cfg) : cfg_(cfg) {
    for (auto *p : params) params_.push_back(p->var);
    init_moments();
  }

  int64_t steps_taken() const { return t_; }
  size_t param_tensors() const { return params_.size(); }

  void zero_grad() {
    for (auto &p : params_) p.zero_grad();
  }

  // Applies one update from accumulated gradients.  Parameters whose grad was
  // never touched this phase (frozen or unused heads) see only their moment
  // decay skipped: an absent gradient is a zero gradient.
  void step() {
    t_++;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); i++) {
      auto &p = params_[i];
      Tensor<Real> &val = p.mutable_value();
      const bool has_grad = p.has_grad();
      Tensor<Real> &m = m_[i];
      Tensor<Real> &v = v_[i];
      Real *pv = val.data();
      Real *mv = m.data();
      Real *vv = v.data();
      const Real *gv = has_grad ? p.node()->grad.data() : nullptr;
      for (int64_t j = 0; j < val.size(); j++) {
        double g = gv ? static_cast<double>(gv[j]) : 0.0;
        if (cfg_.grad_clip > 0.0) {
          if (g > cfg_.grad_clip) g = cfg_.grad_clip;
          if (g < -cfg_.grad_clip) g = -cfg_.grad_clip;
        }
        double md = cfg_.beta1 * static_cast<double>(mv[j]) + (1.0 - cfg_.beta1) * g;
        double vd = cfg_.beta2 * static_cast<double>(vv[j]) + (1.0 - cfg_.beta2) * g * g;
        mv[j] = static_cast<Real>(md);
        vv[j] = static_cast<Real>(vd);
        double update = (md / bc1) / (std::sqrt(vd / bc2) + cfg_.eps) +
                        cfg_.weight_decay * static_cast<double>(pv[j]);
        pv[j] = static_cast<Real>(static_cast<double>(pv[j]) - cfg_.lr * update);
      }
    }
  }

  // Moment blobs for checkpointing, in parameter order.
  std::vector<Tensor<Real>> &moments_m() { return m_; }
  std::vector<Tensor<Real>> &moments_v() { return v_; }
  void set_steps_taken(int64_t t) { t_ = t; }

 private:
  void init_moments() {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (auto &p : params_) {
      m_.emplace_back(p.value().shape());
      v_.emplace_back(p.value().shape());
    }
  }

  AdamWConfig cfg_;
  std::vector<ad::Var<Real>> params_;
  std::vector<Tensor<Real>> m_, v_;
  int64_t t_ = 0;
};

}  // namespace emovc

#endif  // EMOVC_NN_ADAMW_HPP
