// emovc/nn/nn.hpp

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

#ifndef EMOVC_NN_NN_HPP
#define EMOVC_NN_NN_HPP

#include <string>
#include <vector>

#include "emovc/core/autodiff.hpp"
#include "emovc/core/rng.hpp"

namespace emovc {

template <typename Real>
struct Param {
  std::string name;
  ad::Var<Real> var;
};

// Flat registry of one network's trainable tensors.  Phase freezing flips
// requires_grad on every member, which the autodiff accumulate guard turns
// into exactly-zero gradients.
template <typename Real>
class ParamStore {
 public:
  ad::Var<Real> add(const std::string &name, Tensor<Real> init) {
    auto v = ad::Var<Real>::leaf(std::move(init), true);
    params_.push_back({name, v});
    return v;
  }

  std::vector<Param<Real>> &params() { return params_; }
  const std::vector<Param<Real>> &params() const { return params_; }

  void set_trainable(bool on) {
    for (auto &p : params_) p.var.set_requires_grad(on);
  }

  // Flip only parameters whose name starts with `prefix` (fine-tuning scopes).
  void set_trainable_matching(const std::string &prefix, bool on) {
    for (auto &p : params_)
      if (p.name.rfind(prefix, 0) == 0) p.var.set_requires_grad(on);
  }

  std::vector<Param<Real> *> matching(const std::string &prefix) {
    std::vector<Param<Real> *> out;
    for (auto &p : params_)
      if (p.name.rfind(prefix, 0) == 0) out.push_back(&p);
    return out;
  }
  bool trainable() const { return !params_.empty() && params_.front().var.requires_grad(); }

  void zero_grad() {
    for (auto &p : params_) p.var.zero_grad();
  }

  int64_t param_count() const {
    int64_t n = 0;
    for (const auto &p : params_) n += p.var.value().size();
    return n;
  }

  bool all_finite() const {
    for (const auto &p : params_)
      if (!p.var.value().all_finite()) return false;
    return true;
  }

  double max_abs_grad() const {
    double m = 0.0;
    for (const auto &p : params_)
      if (p.var.has_grad())
        for (int64_t i = 0; i < p.var.node()->grad.size(); i++)
          m = std::max(m, std::abs(static_cast<double>(p.var.node()->grad[i])));
    return m;
  }

 private:
  std::vector<Param<Real>> params_;
};

namespace nn {

template <typename Real>
inline Tensor<Real> he_init(std::vector<int> shape, int fan_in, Rng &rng) {
  Real stddev = static_cast<Real>(std::sqrt(2.0 / std::max(fan_in, 1)));
  return Tensor<Real>::randn(std::move(shape), rng, stddev);
}

template <typename Real>
struct Conv1dLayer {
  ad::Var<Real> w, b;
  int stride = 1, pad = 0;

  Conv1dLayer() = default;
  Conv1dLayer(ParamStore<Real> &ps, const std::string &name, int in_ch, int out_ch,
              int kernel, int stride_, Rng &rng)
      : stride(stride_), pad(kernel / 2) {
    w = ps.add(name + ".w", he_init<Real>({out_ch, in_ch, kernel}, in_ch * kernel, rng));
    b = ps.add(name + ".b", Tensor<Real>({out_ch}));
  }

  ad::Var<Real> forward(const ad::Var<Real> &x) const {
    return ad::conv1d(x, w, b, stride, pad);
  }
};

template <typename Real>
struct LinearLayer {
  ad::Var<Real> w, b;

  LinearLayer() = default;
  LinearLayer(ParamStore<Real> &ps, const std::string &name, int in_dim, int out_dim,
              Rng &rng) {
    w = ps.add(name + ".w", he_init<Real>({out_dim, in_dim}, in_dim, rng));
    b = ps.add(name + ".b", Tensor<Real>({out_dim}));
  }

  ad::Var<Real> forward(const ad::Var<Real> &x) const { return ad::linear(x, w, b); }
};

// One private linear head per domain code.
template <typename Real>
struct IndexedHeads {
  ad::Var<Real> w, b;

  IndexedHeads() = default;
  IndexedHeads(ParamStore<Real> &ps, const std::string &name, int num_heads, int in_dim,
               int out_dim, Rng &rng) {
    w = ps.add(name + ".w", he_init<Real>({num_heads, out_dim, in_dim}, in_dim, rng));
    b = ps.add(name + ".b", Tensor<Real>({num_heads, out_dim}));
  }

  ad::Var<Real> forward(const ad::Var<Real> &x, const std::vector<int> &codes) const {
    return ad::indexed_linear(w, b, x, codes);
  }
};

// Adaptive instance norm: IN over time, then a style-conditioned affine.
template <typename Real>
struct AdainLayer {
  LinearLayer<Real> gamma_fc, beta_fc;

  AdainLayer() = default;
  AdainLayer(ParamStore<Real> &ps, const std::string &name, int style_dim, int channels,
             Rng &rng)
      : gamma_fc(ps, name + ".gamma", style_dim, channels, rng),
        beta_fc(ps, name + ".beta", style_dim, channels, rng) {}

  ad::Var<Real> forward(const ad::Var<Real> &x, const ad::Var<Real> &style) const {
    return ad::channel_affine(ad::instance_norm(x, static_cast<Real>(1e-5)),
                              gamma_fc.forward(style), beta_fc.forward(style));
  }
};

}  // namespace nn
}  // namespace emovc

#endif  // EMOVC_NN_NN_HPP
