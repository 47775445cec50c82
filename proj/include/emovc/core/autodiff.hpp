// emovc/core/autodiff.hpp

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

// Reverse-mode automatic differentiation over dense tensors.
//
// Each op eagerly computes its value and, when any input participates in
// gradient flow, records a backward closure plus parent links.  backward()
// topologically sorts the reachable subgraph by creation order, giving a
// fixed reduction order: repeated runs over identical inputs produce
// bit-identical gradients.  Leaves with requires_grad=false never receive
// gradient, which is what makes per-phase freezing exact rather than
// approximate.

#ifndef EMOVC_CORE_AUTODIFF_HPP
#define EMOVC_CORE_AUTODIFF_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "emovc/core/gemm.hpp"
#include "emovc/core/tensor.hpp"

namespace emovc {
namespace ad {

template <typename Real>
struct Node {
  Tensor<Real> value;
  Tensor<Real> grad;  // allocated lazily, same shape as value
  bool requires_grad = false;
  int64_t order = 0;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backprop;

  void ensure_grad() {
    if (grad.size() != value.size()) grad = Tensor<Real>(value.shape());
  }

  static int64_t next_order() {
    static int64_t counter = 0;
    return ++counter;
  }
};

template <typename Real>
using NodePtr = std::shared_ptr<Node<Real>>;

template <typename Real>
class Var {
 public:
  Var() = default;
  explicit Var(NodePtr<Real> n) : node_(std::move(n)) {}

  static Var leaf(Tensor<Real> value, bool requires_grad = false) {
    auto n = std::make_shared<Node<Real>>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    n->order = Node<Real>::next_order();
    return Var(std::move(n));
  }

  bool defined() const { return node_ != nullptr; }
  const Tensor<Real> &value() const { return node_->value; }
  Tensor<Real> &mutable_value() { return node_->value; }
  Tensor<Real> &grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  void set_requires_grad(bool rg) { node_->requires_grad = rg; }
  void zero_grad() {
    if (node_->grad.size() > 0) node_->grad.fill(Real(0));
  }
  NodePtr<Real> node() const { return node_; }

 private:
  NodePtr<Real> node_;
};

template <typename Real>
inline Var<Real> constant(Tensor<Real> value) {
  return Var<Real>::leaf(std::move(value), false);
}

namespace detail {

template <typename Real>
inline NodePtr<Real> make_result(Tensor<Real> value,
                                 std::vector<NodePtr<Real>> parents) {
  auto n = std::make_shared<Node<Real>>();
  n->value = std::move(value);
  n->order = Node<Real>::next_order();
  bool rg = false;
  for (const auto &p : parents)
    if (p->requires_grad) rg = true;
  n->requires_grad = rg;
  if (rg) n->parents = std::move(parents);
  return n;
}

// Accumulate helper: respects the freeze flag, so frozen leaves stay at
// exactly zero gradient.
template <typename Real>
inline Tensor<Real> *grad_sink(const NodePtr<Real> &p) {
  if (!p->requires_grad) return nullptr;
  p->ensure_grad();
  return &p->grad;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise ops
// ---------------------------------------------------------------------------

template <typename Real, typename Fwd, typename Bwd>
inline Var<Real> elementwise_unary(const Var<Real> &x, Fwd fwd, Bwd dfdx) {
  Tensor<Real> out(x.value().shape());
  const Real *xv = x.value().data();
  Real *ov = out.data();
  for (int64_t i = 0; i < out.size(); i++) ov[i] = fwd(xv[i]);
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, dfdx](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        const Real *g = self.grad.data();
        const Real *xv2 = xp->value.data();
        const Real *yv = self.value.data();
        Real *gxd = gx->data();
        for (int64_t i = 0; i < self.value.size(); i++)
          gxd[i] += g[i] * dfdx(xv2[i], yv[i]);
      }
    };
  }
  return Var<Real>(n);
}

template <typename Real>
inline Var<Real> neg(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return -v; }, [](Real, Real) { return Real(-1); });
}

template <typename Real>
inline Var<Real> exp_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return std::exp(v); }, [](Real, Real y) { return y; });
}

template <typename Real>
inline Var<Real> log_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return std::log(v); },
      [](Real v, Real) { return Real(1) / v; });
}

// ln(max(x, lo)); zero gradient in the clamped region.
template <typename Real>
inline Var<Real> log_clamped(const Var<Real> &x, Real lo) {
  return elementwise_unary(
      x, [lo](Real v) { return std::log(std::max(v, lo)); },
      [lo](Real v, Real) { return v > lo ? Real(1) / v : Real(0); });
}

template <typename Real>
inline Var<Real> sqrt_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return std::sqrt(v); },
      [](Real, Real y) { return Real(0.5) / y; });
}

template <typename Real>
inline Var<Real> square_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return v * v; }, [](Real v, Real) { return Real(2) * v; });
}

template <typename Real>
inline Var<Real> abs_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return std::abs(v); },
      [](Real v, Real) { return v > Real(0) ? Real(1) : (v < Real(0) ? Real(-1) : Real(0)); });
}

template <typename Real>
inline Var<Real> tanh_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return std::tanh(v); },
      [](Real, Real y) { return Real(1) - y * y; });
}

template <typename Real>
inline Var<Real> sigmoid_v(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return Real(1) / (Real(1) + std::exp(-v)); },
      [](Real, Real y) { return y * (Real(1) - y); });
}

template <typename Real>
inline Var<Real> softplus_v(const Var<Real> &x) {
  return elementwise_unary(
      x,
      [](Real v) {
        return v > Real(0) ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
      },
      [](Real v, Real) { return Real(1) / (Real(1) + std::exp(-v)); });
}

template <typename Real>
inline Var<Real> relu(const Var<Real> &x) {
  return elementwise_unary(
      x, [](Real v) { return v > Real(0) ? v : Real(0); },
      [](Real v, Real) { return v > Real(0) ? Real(1) : Real(0); });
}

template <typename Real>
inline Var<Real> leaky_relu(const Var<Real> &x, Real slope = Real(0.2)) {
  return elementwise_unary(
      x, [slope](Real v) { return v > Real(0) ? v : slope * v; },
      [slope](Real v, Real) { return v > Real(0) ? Real(1) : slope; });
}

template <typename Real>
inline Var<Real> scalar_mul(const Var<Real> &x, Real c) {
  return elementwise_unary(
      x, [c](Real v) { return c * v; }, [c](Real, Real) { return c; });
}

template <typename Real>
inline Var<Real> scalar_add(const Var<Real> &x, Real c) {
  return elementwise_unary(
      x, [c](Real v) { return v + c; }, [](Real, Real) { return Real(1); });
}

template <typename Real, typename Fwd, typename DA, typename DB>
inline Var<Real> elementwise_binary(const Var<Real> &a, const Var<Real> &b, Fwd fwd,
                                    DA dfda, DB dfdb) {
  EMOVC_CHECK(a.value().same_shape(b.value()), "elementwise op: shape mismatch");
  Tensor<Real> out(a.value().shape());
  const Real *av = a.value().data();
  const Real *bv = b.value().data();
  Real *ov = out.data();
  for (int64_t i = 0; i < out.size(); i++) ov[i] = fwd(av[i], bv[i]);
  auto n = detail::make_result<Real>(std::move(out), {a.node(), b.node()});
  if (n->requires_grad) {
    auto ap = a.node(), bp = b.node();
    n->backprop = [ap, bp, dfda, dfdb](Node<Real> &self) {
      const Real *g = self.grad.data();
      const Real *av2 = ap->value.data();
      const Real *bv2 = bp->value.data();
      if (auto *ga = detail::grad_sink(ap)) {
        Real *gad = ga->data();
        for (int64_t i = 0; i < self.value.size(); i++)
          gad[i] += g[i] * dfda(av2[i], bv2[i]);
      }
      if (auto *gb = detail::grad_sink(bp)) {
        Real *gbd = gb->data();
        for (int64_t i = 0; i < self.value.size(); i++)
          gbd[i] += g[i] * dfdb(av2[i], bv2[i]);
      }
    };
  }
  return Var<Real>(n);
}

template <typename Real>
inline Var<Real> add(const Var<Real> &a, const Var<Real> &b) {
  return elementwise_binary(
      a, b, [](Real x, Real y) { return x + y; },
      [](Real, Real) { return Real(1); }, [](Real, Real) { return Real(1); });
}

template <typename Real>
inline Var<Real> sub(const Var<Real> &a, const Var<Real> &b) {
  return elementwise_binary(
      a, b, [](Real x, Real y) { return x - y; },
      [](Real, Real) { return Real(1); }, [](Real, Real) { return Real(-1); });
}

template <typename Real>
inline Var<Real> mul(const Var<Real> &a, const Var<Real> &b) {
  return elementwise_binary(
      a, b, [](Real x, Real y) { return x * y; },
      [](Real, Real y) { return y; }, [](Real x, Real) { return x; });
}

template <typename Real>
inline Var<Real> div_v(const Var<Real> &a, const Var<Real> &b) {
  return elementwise_binary(
      a, b, [](Real x, Real y) { return x / y; },
      [](Real, Real y) { return Real(1) / y; },
      [](Real x, Real y) { return -x / (y * y); });
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

template <typename Real>
inline Var<Real> sum_all(const Var<Real> &x) {
  Tensor<Real> out = Tensor<Real>::scalar(x.value().sum());
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        Real g = self.grad[0];
        Real *gxd = gx->data();
        for (int64_t i = 0; i < gx->size(); i++) gxd[i] += g;
      }
    };
  }
  return Var<Real>(n);
}

template <typename Real>
inline Var<Real> mean_all(const Var<Real> &x) {
  EMOVC_CHECK(x.value().size() > 0, "mean_all: empty tensor");
  return scalar_mul(sum_all(x), Real(1) / static_cast<Real>(x.value().size()));
}

template <typename Real>
inline Var<Real> mean_abs_diff(const Var<Real> &a, const Var<Real> &b) {
  return mean_all(abs_v(sub(a, b)));
}

// ---------------------------------------------------------------------------
// Structural ops
// ---------------------------------------------------------------------------

template <typename Real>
inline Var<Real> detach(const Var<Real> &x) {
  return constant(Tensor<Real>(x.value()));
}

// Concatenate along the channel axis of [B, C, T] tensors.
template <typename Real>
inline Var<Real> concat_channels(const Var<Real> &a, const Var<Real> &b) {
  const auto &sa = a.value().shape(), &sb = b.value().shape();
  EMOVC_CHECK(sa.size() == 3 && sb.size() == 3 && sa[0] == sb[0] && sa[2] == sb[2],
              "concat_channels: incompatible shapes");
  int B = sa[0], Ca = sa[1], Cb = sb[1], T = sa[2];
  Tensor<Real> out({B, Ca + Cb, T});
  for (int bi = 0; bi < B; bi++) {
    std::copy_n(&a.value().at(bi, 0, 0), static_cast<size_t>(Ca) * T, &out.at(bi, 0, 0));
    std::copy_n(&b.value().at(bi, 0, 0), static_cast<size_t>(Cb) * T, &out.at(bi, Ca, 0));
  }
  auto n = detail::make_result<Real>(std::move(out), {a.node(), b.node()});
  if (n->requires_grad) {
    auto ap = a.node(), bp = b.node();
    n->backprop = [ap, bp, B, Ca, Cb, T](Node<Real> &self) {
      for (int bi = 0; bi < B; bi++) {
        if (auto *ga = detail::grad_sink(ap)) {
          const Real *g = &self.grad.at(bi, 0, 0);
          Real *gd = &ga->at(bi, 0, 0);
          for (int64_t i = 0; i < static_cast<int64_t>(Ca) * T; i++) gd[i] += g[i];
        }
        if (auto *gb = detail::grad_sink(bp)) {
          const Real *g = &self.grad.at(bi, Ca, 0);
          Real *gd = &gb->at(bi, 0, 0);
          for (int64_t i = 0; i < static_cast<int64_t>(Cb) * T; i++) gd[i] += g[i];
        }
      }
    };
  }
  return Var<Real>(n);
}

// out[i, j] = row[i] - x[0, j], for a constant row vector and a [1, W] input.
// Gives central-moment descriptor algebra without a broadcast op zoo.
template <typename Real>
inline Var<Real> outer_sub(const Tensor<Real> &row, const Var<Real> &x) {
  EMOVC_CHECK(row.rank() == 1 && x.value().rank() == 2 && x.value().dim(0) == 1,
              "outer_sub: expected row [M] and x [1, W]");
  int M = row.dim(0), W = x.value().dim(1);
  Tensor<Real> out({M, W});
  for (int i = 0; i < M; i++)
    for (int j = 0; j < W; j++) out.at(i, j) = row[i] - x.value().at(0, j);
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, M, W](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int j = 0; j < W; j++) {
          Real acc = 0;
          for (int i = 0; i < M; i++) acc += self.grad.at(i, j);
          gx->at(0, j) -= acc;
        }
      }
    };
  }
  return Var<Real>(n);
}

// Same data, new shape (numel must match).
template <typename Real>
inline Var<Real> reshape(const Var<Real> &x, std::vector<int> new_shape) {
  Tensor<Real> out(new_shape);
  EMOVC_CHECK(out.size() == x.value().size(), "reshape: numel mismatch");
  std::copy_n(x.value().data(), out.size(), out.data());
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        const Real *g = self.grad.data();
        Real *gd = gx->data();
        for (int64_t i = 0; i < self.grad.size(); i++) gd[i] += g[i];
      }
    };
  }
  return Var<Real>(n);
}

// Drop the leading (batch) axis at index b: [B, ...] -> [...].
template <typename Real>
inline Var<Real> slice_batch(const Var<Real> &x, int b) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() >= 2 && b >= 0 && b < s[0], "slice_batch: bad index");
  std::vector<int> os(s.begin() + 1, s.end());
  Tensor<Real> out(os);
  int64_t stride = out.size();
  std::copy_n(x.value().data() + b * stride, stride, out.data());
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, b, stride](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        const Real *g = self.grad.data();
        Real *gd = gx->data() + b * stride;
        for (int64_t i = 0; i < stride; i++) gd[i] += g[i];
      }
    };
  }
  return Var<Real>(n);
}

// [B, 1, T] -> [B, T]
template <typename Real>
inline Var<Real> squeeze_channel(const Var<Real> &x) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 3 && s[1] == 1, "squeeze_channel: expected [B,1,T]");
  Tensor<Real> out({s[0], s[2]});
  std::copy_n(x.value().data(), out.size(), out.data());
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        const Real *g = self.grad.data();
        Real *gd = gx->data();
        for (int64_t i = 0; i < self.grad.size(); i++) gd[i] += g[i];
      }
    };
  }
  return Var<Real>(n);
}

// Nearest-neighbour upsample of [B, C, T] along time to length t_out;
// index j reads source floor(j * T / t_out).
template <typename Real>
inline Var<Real> upsample_nearest(const Var<Real> &x, int t_out) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 3 && t_out >= s[2], "upsample_nearest: bad target length");
  int B = s[0], C = s[1], T = s[2];
  Tensor<Real> out({B, C, t_out});
  std::vector<int> src(static_cast<size_t>(t_out));
  for (int j = 0; j < t_out; j++) src[static_cast<size_t>(j)] = static_cast<int>(static_cast<int64_t>(j) * T / t_out);
  for (int b = 0; b < B; b++)
    for (int c = 0; c < C; c++) {
      const Real *xr = &x.value().at(b, c, 0);
      Real *orow = &out.at(b, c, 0);
      for (int j = 0; j < t_out; j++) orow[j] = xr[src[static_cast<size_t>(j)]];
    }
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, B, C, t_out, src](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++)
          for (int c = 0; c < C; c++) {
            const Real *g = &self.grad.at(b, c, 0);
            Real *gd = &gx->at(b, c, 0);
            for (int j = 0; j < t_out; j++) gd[src[static_cast<size_t>(j)]] += g[j];
          }
      }
    };
  }
  return Var<Real>(n);
}

// Global average over time: [B, C, T] -> [B, C].
template <typename Real>
inline Var<Real> mean_time(const Var<Real> &x) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 3, "mean_time: expected [B,C,T]");
  int B = s[0], C = s[1], T = s[2];
  Tensor<Real> out({B, C});
  for (int b = 0; b < B; b++)
    for (int c = 0; c < C; c++) {
      Real acc = 0;
      const Real *xr = &x.value().at(b, c, 0);
      for (int t = 0; t < T; t++) acc += xr[t];
      out.at(b, c) = acc / static_cast<Real>(T);
    }
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, B, C, T](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++)
          for (int c = 0; c < C; c++) {
            Real g = self.grad.at(b, c) / static_cast<Real>(T);
            Real *gd = &gx->at(b, c, 0);
            for (int t = 0; t < T; t++) gd[t] += g;
          }
      }
    };
  }
  return Var<Real>(n);
}

// y[b] = x[b, j]
template <typename Real>
inline Var<Real> col_select(const Var<Real> &x, int j) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 2 && j >= 0 && j < s[1], "col_select: bad column");
  int B = s[0], N = s[1];
  Tensor<Real> out({B});
  for (int b = 0; b < B; b++) out[b] = x.value().at(b, j);
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, B, N, j](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++) gx->at(b, j) += self.grad[b];
      }
    };
  }
  return Var<Real>(n);
}

// y[b, d] = x[b, d] * s[b]
template <typename Real>
inline Var<Real> scale_rows(const Var<Real> &x, const Var<Real> &scale) {
  const auto &sx = x.value().shape();
  EMOVC_CHECK(sx.size() == 2 && scale.value().rank() == 1 && scale.value().dim(0) == sx[0],
              "scale_rows: shape mismatch");
  int B = sx[0], D = sx[1];
  Tensor<Real> out({B, D});
  for (int b = 0; b < B; b++) {
    Real sv = scale.value()[b];
    const Real *xr = &x.value().at(b, 0);
    Real *orow = &out.at(b, 0);
    for (int d = 0; d < D; d++) orow[d] = xr[d] * sv;
  }
  auto n = detail::make_result<Real>(std::move(out), {x.node(), scale.node()});
  if (n->requires_grad) {
    auto xp = x.node(), sp = scale.node();
    n->backprop = [xp, sp, B, D](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++) {
          Real sv = sp->value[b];
          const Real *g = &self.grad.at(b, 0);
          Real *gd = &gx->at(b, 0);
          for (int d = 0; d < D; d++) gd[d] += g[d] * sv;
        }
      }
      if (auto *gs = detail::grad_sink(sp)) {
        for (int b = 0; b < B; b++) {
          Real acc = 0;
          const Real *g = &self.grad.at(b, 0);
          const Real *xr = &xp->value.at(b, 0);
          for (int d = 0; d < D; d++) acc += g[d] * xr[d];
          (*gs)[b] += acc;
        }
      }
    };
  }
  return Var<Real>(n);
}

// y[b, t] = x[b, t] / (d[b] + eps)
template <typename Real>
inline Var<Real> div_rows(const Var<Real> &x, const Var<Real> &denom, Real eps) {
  const auto &sx = x.value().shape();
  EMOVC_CHECK(sx.size() == 2 && denom.value().rank() == 1 && denom.value().dim(0) == sx[0],
              "div_rows: shape mismatch");
  int B = sx[0], T = sx[1];
  Tensor<Real> out({B, T});
  for (int b = 0; b < B; b++) {
    Real dv = denom.value()[b] + eps;
    const Real *xr = &x.value().at(b, 0);
    Real *orow = &out.at(b, 0);
    for (int t = 0; t < T; t++) orow[t] = xr[t] / dv;
  }
  auto n = detail::make_result<Real>(std::move(out), {x.node(), denom.node()});
  if (n->requires_grad) {
    auto xp = x.node(), dp = denom.node();
    n->backprop = [xp, dp, B, T, eps](Node<Real> &self) {
      for (int b = 0; b < B; b++) {
        Real dv = dp->value[b] + eps;
        const Real *g = &self.grad.at(b, 0);
        if (auto *gx = detail::grad_sink(xp)) {
          Real *gd = &gx->at(b, 0);
          for (int t = 0; t < T; t++) gd[t] += g[t] / dv;
        }
        if (auto *gden = detail::grad_sink(dp)) {
          Real acc = 0;
          const Real *xr = &xp->value.at(b, 0);
          for (int t = 0; t < T; t++) acc += g[t] * (-xr[t] / (dv * dv));
          (*gden)[b] += acc;
        }
      }
    };
  }
  return Var<Real>(n);
}

// Per-row weighted mean with a constant 0/1 mask: y[b] = sum(m*x)/max(sum(m),1).
template <typename Real>
inline Var<Real> masked_row_mean(const Var<Real> &x, const Tensor<Real> &mask) {
  const auto &sx = x.value().shape();
  EMOVC_CHECK(sx.size() == 2 && mask.shape() == sx, "masked_row_mean: shape mismatch");
  int B = sx[0], T = sx[1];
  Tensor<Real> out({B});
  std::vector<Real> counts(static_cast<size_t>(B));
  for (int b = 0; b < B; b++) {
    Real acc = 0, cnt = 0;
    const Real *xr = &x.value().at(b, 0);
    const Real *mr = &mask.at(b, 0);
    for (int t = 0; t < T; t++) {
      acc += xr[t] * mr[t];
      cnt += mr[t];
    }
    counts[static_cast<size_t>(b)] = std::max(cnt, Real(1));
    out[b] = acc / counts[static_cast<size_t>(b)];
  }
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    Tensor<Real> m = mask;
    n->backprop = [xp, m, B, T, counts](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++) {
          Real g = self.grad[b] / counts[static_cast<size_t>(b)];
          const Real *mr = &m.at(b, 0);
          Real *gd = &gx->at(b, 0);
          for (int t = 0; t < T; t++) gd[t] += g * mr[t];
        }
      }
    };
  }
  return Var<Real>(n);
}

// First differences along a 1-D tensor: y[t] = x[t+1] - x[t].
template <typename Real>
inline Var<Real> diff_time(const Var<Real> &x) {
  EMOVC_CHECK(x.value().rank() == 1 && x.value().dim(0) >= 2, "diff_time: need >= 2 samples");
  int T = x.value().dim(0);
  Tensor<Real> out({T - 1});
  for (int t = 0; t + 1 < T; t++) out[t] = x.value()[t + 1] - x.value()[t];
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, T](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int t = 0; t + 1 < T; t++) {
          (*gx)[t + 1] += self.grad[t];
          (*gx)[t] -= self.grad[t];
        }
      }
    };
  }
  return Var<Real>(n);
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

template <typename Real>
inline Var<Real> matmul(const Var<Real> &a, const Var<Real> &b) {
  const auto &sa = a.value().shape(), &sb = b.value().shape();
  EMOVC_CHECK(sa.size() == 2 && sb.size() == 2 && sa[1] == sb[0], "matmul: shape mismatch");
  int m = sa[0], k = sa[1], nn = sb[1];
  Tensor<Real> out({m, nn});
  gemm(false, false, m, nn, k, Real(1), a.value().data(), k, b.value().data(), nn,
       Real(0), out.data(), nn);
  auto n = detail::make_result<Real>(std::move(out), {a.node(), b.node()});
  if (n->requires_grad) {
    auto ap = a.node(), bp = b.node();
    n->backprop = [ap, bp, m, k, nn](Node<Real> &self) {
      if (auto *ga = detail::grad_sink(ap)) {
        // dA = g * B^T
        gemm(false, true, m, k, nn, Real(1), self.grad.data(), nn, bp->value.data(),
             nn, Real(1), ga->data(), k);
      }
      if (auto *gb = detail::grad_sink(bp)) {
        // dB = A^T * g
        gemm(true, false, k, nn, m, Real(1), ap->value.data(), k, self.grad.data(),
             nn, Real(1), gb->data(), nn);
      }
    };
  }
  return Var<Real>(n);
}

// y = x * W^T + bias;  x: [B, I], W: [O, I], bias: [O].
template <typename Real>
inline Var<Real> linear(const Var<Real> &x, const Var<Real> &w, const Var<Real> &bias) {
  const auto &sx = x.value().shape(), &sw = w.value().shape();
  EMOVC_CHECK(sx.size() == 2 && sw.size() == 2 && sx[1] == sw[1], "linear: shape mismatch");
  EMOVC_CHECK(bias.value().rank() == 1 && bias.value().dim(0) == sw[0],
              "linear: bias shape mismatch");
  int B = sx[0], I = sx[1], O = sw[0];
  Tensor<Real> out({B, O});
  gemm(false, true, B, O, I, Real(1), x.value().data(), I, w.value().data(), I,
       Real(0), out.data(), O);
  for (int b = 0; b < B; b++)
    for (int o = 0; o < O; o++) out.at(b, o) += bias.value()[o];
  auto n = detail::make_result<Real>(std::move(out), {x.node(), w.node(), bias.node()});
  if (n->requires_grad) {
    auto xp = x.node(), wp = w.node(), bp = bias.node();
    n->backprop = [xp, wp, bp, B, I, O](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        gemm(false, false, B, I, O, Real(1), self.grad.data(), O, wp->value.data(), I,
             Real(1), gx->data(), I);
      }
      if (auto *gw = detail::grad_sink(wp)) {
        gemm(true, false, O, I, B, Real(1), self.grad.data(), O, xp->value.data(), I,
             Real(1), gw->data(), I);
      }
      if (auto *gb = detail::grad_sink(bp)) {
        for (int b = 0; b < B; b++)
          for (int o = 0; o < O; o++) (*gb)[o] += self.grad.at(b, o);
      }
    };
  }
  return Var<Real>(n);
}

// Per-sample head selection: y[b] = W[codes[b]] x[b] + bias[codes[b]].
// W: [K, O, I], bias: [K, O], x: [B, I].
template <typename Real>
inline Var<Real> indexed_linear(const Var<Real> &w, const Var<Real> &bias,
                                const Var<Real> &x, const std::vector<int> &codes) {
  const auto &sw = w.value().shape(), &sx = x.value().shape();
  EMOVC_CHECK(sw.size() == 3 && sx.size() == 2 && sw[2] == sx[1],
              "indexed_linear: shape mismatch");
  int K = sw[0], O = sw[1], I = sw[2], B = sx[0];
  EMOVC_CHECK(static_cast<int>(codes.size()) == B, "indexed_linear: codes size mismatch");
  for (int c : codes) EMOVC_CHECK(c >= 0 && c < K, "indexed_linear: code out of range");
  Tensor<Real> out({B, O});
  for (int b = 0; b < B; b++) {
    const Real *wb = &w.value().at(codes[static_cast<size_t>(b)], 0, 0);
    const Real *xb = &x.value().at(b, 0);
    const Real *bb = &bias.value().at(codes[static_cast<size_t>(b)], 0);
    Real *ob = &out.at(b, 0);
    for (int o = 0; o < O; o++) {
      Real acc = bb[o];
      const Real *wr = wb + static_cast<int64_t>(o) * I;
      for (int i = 0; i < I; i++) acc += wr[i] * xb[i];
      ob[o] = acc;
    }
  }
  auto n = detail::make_result<Real>(std::move(out), {w.node(), bias.node(), x.node()});
  if (n->requires_grad) {
    auto wp = w.node(), bp = bias.node(), xp = x.node();
    auto cds = codes;
    n->backprop = [wp, bp, xp, cds, O, I](Node<Real> &self) {
      int B = self.value.dim(0);
      for (int b = 0; b < B; b++) {
        int code = cds[static_cast<size_t>(b)];
        const Real *g = &self.grad.at(b, 0);
        const Real *xb = &xp->value.at(b, 0);
        if (auto *gw = detail::grad_sink(wp)) {
          Real *gwb = &gw->at(code, 0, 0);
          for (int o = 0; o < O; o++) {
            Real go = g[o];
            Real *gr = gwb + static_cast<int64_t>(o) * I;
            for (int i = 0; i < I; i++) gr[i] += go * xb[i];
          }
        }
        if (auto *gb = detail::grad_sink(bp)) {
          Real *gbb = &gb->at(code, 0);
          for (int o = 0; o < O; o++) gbb[o] += g[o];
        }
        if (auto *gx = detail::grad_sink(xp)) {
          const Real *wb = &wp->value.at(code, 0, 0);
          Real *gxb = &gx->at(b, 0);
          for (int o = 0; o < O; o++) {
            Real go = g[o];
            const Real *wr = wb + static_cast<int64_t>(o) * I;
            for (int i = 0; i < I; i++) gxb[i] += go * wr[i];
          }
        }
      }
    };
  }
  return Var<Real>(n);
}

namespace detail {

// im2col for 1-D convolution: x[C, T] -> col[C*Kw, T_out].
template <typename Real>
inline void im2col(const Real *x, int C, int T, int kw, int stride, int pad,
                   int t_out, Real *col) {
  for (int c = 0; c < C; c++) {
    for (int k = 0; k < kw; k++) {
      Real *row = col + (static_cast<int64_t>(c) * kw + k) * t_out;
      for (int t = 0; t < t_out; t++) {
        int src = t * stride + k - pad;
        row[t] = (src >= 0 && src < T) ? x[static_cast<int64_t>(c) * T + src] : Real(0);
      }
    }
  }
}

template <typename Real>
inline void col2im_add(const Real *col, int C, int T, int kw, int stride, int pad,
                       int t_out, Real *gx) {
  for (int c = 0; c < C; c++) {
    for (int k = 0; k < kw; k++) {
      const Real *row = col + (static_cast<int64_t>(c) * kw + k) * t_out;
      for (int t = 0; t < t_out; t++) {
        int src = t * stride + k - pad;
        if (src >= 0 && src < T) gx[static_cast<int64_t>(c) * T + src] += row[t];
      }
    }
  }
}

}  // namespace detail

// 1-D convolution over [B, C, T] with kernel [O, C, Kw], bias [O].
// "same"-style padding is the caller's choice via pad.
template <typename Real>
inline Var<Real> conv1d(const Var<Real> &x, const Var<Real> &w, const Var<Real> &bias,
                        int stride, int pad) {
  const auto &sx = x.value().shape(), &sw = w.value().shape();
  EMOVC_CHECK(sx.size() == 3 && sw.size() == 3 && sx[1] == sw[1], "conv1d: shape mismatch");
  EMOVC_CHECK(stride >= 1 && pad >= 0, "conv1d: bad stride/pad");
  int B = sx[0], C = sx[1], T = sx[2], O = sw[0], Kw = sw[2];
  int t_out = (T + 2 * pad - Kw) / stride + 1;
  EMOVC_CHECK(t_out >= 1, "conv1d: input too short for kernel");
  Tensor<Real> out({B, O, t_out});
  std::vector<Real> col(static_cast<size_t>(C) * Kw * t_out);
  for (int b = 0; b < B; b++) {
    detail::im2col(&x.value().at(b, 0, 0), C, T, Kw, stride, pad, t_out, col.data());
    gemm(false, false, O, t_out, C * Kw, Real(1), w.value().data(), C * Kw, col.data(),
         t_out, Real(0), &out.at(b, 0, 0), t_out);
    for (int o = 0; o < O; o++) {
      Real bv = bias.value()[o];
      Real *orow = &out.at(b, o, 0);
      for (int t = 0; t < t_out; t++) orow[t] += bv;
    }
  }
  auto n = detail::make_result<Real>(std::move(out), {x.node(), w.node(), bias.node()});
  if (n->requires_grad) {
    auto xp = x.node(), wp = w.node(), bp = bias.node();
    n->backprop = [xp, wp, bp, B, C, T, O, Kw, stride, pad, t_out](Node<Real> &self) {
      std::vector<Real> col(static_cast<size_t>(C) * Kw * t_out);
      std::vector<Real> gcol;
      auto *gx = detail::grad_sink(xp);
      auto *gw = detail::grad_sink(wp);
      auto *gb = detail::grad_sink(bp);
      if (gx) gcol.resize(col.size());
      for (int b = 0; b < B; b++) {
        const Real *g = &self.grad.at(b, 0, 0);
        if (gw) {
          detail::im2col(&xp->value.at(b, 0, 0), C, T, Kw, stride, pad, t_out, col.data());
          // dW += g_b * col_b^T
          gemm(false, true, O, C * Kw, t_out, Real(1), g, t_out, col.data(), t_out,
               Real(1), gw->data(), C * Kw);
        }
        if (gx) {
          // dcol = W^T * g_b, then scatter back
          gemm(true, false, C * Kw, t_out, O, Real(1), wp->value.data(), C * Kw, g,
               t_out, Real(0), gcol.data(), t_out);
          detail::col2im_add(gcol.data(), C, T, Kw, stride, pad, t_out,
                             &gx->at(b, 0, 0));
        }
        if (gb) {
          for (int o = 0; o < O; o++) {
            Real acc = 0;
            const Real *gr = g + static_cast<int64_t>(o) * t_out;
            for (int t = 0; t < t_out; t++) acc += gr[t];
            (*gb)[o] += acc;
          }
        }
      }
    };
  }
  return Var<Real>(n);
}

// Instance normalization over the time axis of [B, C, T] (no affine part).
template <typename Real>
inline Var<Real> instance_norm(const Var<Real> &x, Real eps = Real(1e-5)) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 3 && s[2] >= 1, "instance_norm: expected [B,C,T]");
  int B = s[0], C = s[1], T = s[2];
  Tensor<Real> out({B, C, T});
  std::vector<Real> inv_std(static_cast<size_t>(B) * C);
  for (int b = 0; b < B; b++)
    for (int c = 0; c < C; c++) {
      const Real *xr = &x.value().at(b, c, 0);
      Real mean = 0;
      for (int t = 0; t < T; t++) mean += xr[t];
      mean /= static_cast<Real>(T);
      Real var = 0;
      for (int t = 0; t < T; t++) {
        Real d = xr[t] - mean;
        var += d * d;
      }
      var /= static_cast<Real>(T);
      Real is = Real(1) / std::sqrt(var + eps);
      inv_std[static_cast<size_t>(b) * C + c] = is;
      Real *orow = &out.at(b, c, 0);
      for (int t = 0; t < T; t++) orow[t] = (xr[t] - mean) * is;
    }
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, B, C, T, inv_std](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++)
          for (int c = 0; c < C; c++) {
            const Real *g = &self.grad.at(b, c, 0);
            const Real *y = &self.value.at(b, c, 0);
            Real gmean = 0, gymean = 0;
            for (int t = 0; t < T; t++) {
              gmean += g[t];
              gymean += g[t] * y[t];
            }
            gmean /= static_cast<Real>(T);
            gymean /= static_cast<Real>(T);
            Real is = inv_std[static_cast<size_t>(b) * C + c];
            Real *gd = &gx->at(b, c, 0);
            for (int t = 0; t < T; t++) gd[t] += (g[t] - gmean - y[t] * gymean) * is;
          }
      }
    };
  }
  return Var<Real>(n);
}

// AdaIN-style affine: y[b,c,t] = x[b,c,t] * (1 + gamma[b,c]) + beta[b,c].
template <typename Real>
inline Var<Real> channel_affine(const Var<Real> &x, const Var<Real> &gamma,
                                const Var<Real> &beta) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 3, "channel_affine: expected [B,C,T]");
  int B = s[0], C = s[1], T = s[2];
  EMOVC_CHECK(gamma.value().shape() == std::vector<int>({B, C}) &&
                  beta.value().shape() == std::vector<int>({B, C}),
              "channel_affine: conditioning shape mismatch");
  Tensor<Real> out({B, C, T});
  for (int b = 0; b < B; b++)
    for (int c = 0; c < C; c++) {
      Real gmul = Real(1) + gamma.value().at(b, c);
      Real badd = beta.value().at(b, c);
      const Real *xr = &x.value().at(b, c, 0);
      Real *orow = &out.at(b, c, 0);
      for (int t = 0; t < T; t++) orow[t] = xr[t] * gmul + badd;
    }
  auto n = detail::make_result<Real>(std::move(out), {x.node(), gamma.node(), beta.node()});
  if (n->requires_grad) {
    auto xp = x.node(), gp = gamma.node(), bp = beta.node();
    n->backprop = [xp, gp, bp, B, C, T](Node<Real> &self) {
      auto *gx = detail::grad_sink(xp);
      auto *gg = detail::grad_sink(gp);
      auto *gb = detail::grad_sink(bp);
      for (int b = 0; b < B; b++)
        for (int c = 0; c < C; c++) {
          const Real *g = &self.grad.at(b, c, 0);
          const Real *xr = &xp->value.at(b, c, 0);
          Real gmul = Real(1) + gp->value.at(b, c);
          if (gx) {
            Real *gd = &gx->at(b, c, 0);
            for (int t = 0; t < T; t++) gd[t] += g[t] * gmul;
          }
          if (gg) {
            Real acc = 0;
            for (int t = 0; t < T; t++) acc += g[t] * xr[t];
            gg->at(b, c) += acc;
          }
          if (gb) {
            Real acc = 0;
            for (int t = 0; t < T; t++) acc += g[t];
            gb->at(b, c) += acc;
          }
        }
    };
  }
  return Var<Real>(n);
}

// ---------------------------------------------------------------------------
// Softmax / cross-entropy
// ---------------------------------------------------------------------------

template <typename Real>
inline Var<Real> row_log_softmax(const Var<Real> &x) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 2, "row_log_softmax: expected [B,N]");
  int B = s[0], N = s[1];
  Tensor<Real> out({B, N});
  for (int b = 0; b < B; b++) {
    const Real *xr = &x.value().at(b, 0);
    Real mx = xr[0];
    for (int j = 1; j < N; j++) mx = std::max(mx, xr[j]);
    Real lse = 0;
    for (int j = 0; j < N; j++) lse += std::exp(xr[j] - mx);
    lse = mx + std::log(lse);
    Real *orow = &out.at(b, 0);
    for (int j = 0; j < N; j++) orow[j] = xr[j] - lse;
  }
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, B, N](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++) {
          const Real *g = &self.grad.at(b, 0);
          const Real *lp = &self.value.at(b, 0);
          Real gsum = 0;
          for (int j = 0; j < N; j++) gsum += g[j];
          Real *gd = &gx->at(b, 0);
          for (int j = 0; j < N; j++) gd[j] += g[j] - std::exp(lp[j]) * gsum;
        }
      }
    };
  }
  return Var<Real>(n);
}

template <typename Real>
inline Var<Real> row_softmax(const Var<Real> &x) {
  return exp_v(row_log_softmax(x));
}

// Mean negative log likelihood over rows selected by `included`.
// With zero included rows the result is the constant 0 (semi-supervised
// batches contribute nothing rather than erroring).
template <typename Real>
inline Var<Real> nll_rows(const Var<Real> &logp, const std::vector<int> &labels,
                          const std::vector<char> &included) {
  const auto &s = logp.value().shape();
  EMOVC_CHECK(s.size() == 2, "nll_rows: expected [B,N]");
  int B = s[0], N = s[1];
  EMOVC_CHECK(static_cast<int>(labels.size()) == B &&
                  static_cast<int>(included.size()) == B,
              "nll_rows: labels size mismatch");
  int m = 0;
  Real acc = 0;
  for (int b = 0; b < B; b++) {
    if (!included[static_cast<size_t>(b)]) continue;
    EMOVC_CHECK(labels[static_cast<size_t>(b)] >= 0 && labels[static_cast<size_t>(b)] < N,
                "nll_rows: label out of range");
    acc -= logp.value().at(b, labels[static_cast<size_t>(b)]);
    m++;
  }
  if (m == 0) return constant(Tensor<Real>::scalar(Real(0)));
  Tensor<Real> out = Tensor<Real>::scalar(acc / static_cast<Real>(m));
  auto n = detail::make_result<Real>(std::move(out), {logp.node()});
  if (n->requires_grad) {
    auto lp = logp.node();
    auto labs = labels;
    auto inc = included;
    n->backprop = [lp, labs, inc, m](Node<Real> &self) {
      if (auto *gl = detail::grad_sink(lp)) {
        Real g = self.grad[0] / static_cast<Real>(m);
        int B = lp->value.dim(0);
        for (int b = 0; b < B; b++)
          if (inc[static_cast<size_t>(b)]) gl->at(b, labs[static_cast<size_t>(b)]) -= g;
      }
    };
  }
  return Var<Real>(n);
}

// Log-softmax across the channel axis of [B, C, T] (per-frame distributions).
template <typename Real>
inline Var<Real> channel_log_softmax(const Var<Real> &x) {
  const auto &s = x.value().shape();
  EMOVC_CHECK(s.size() == 3, "channel_log_softmax: expected [B,C,T]");
  int B = s[0], C = s[1], T = s[2];
  Tensor<Real> out({B, C, T});
  for (int b = 0; b < B; b++)
    for (int t = 0; t < T; t++) {
      Real mx = x.value().at(b, 0, t);
      for (int c = 1; c < C; c++) mx = std::max(mx, x.value().at(b, c, t));
      Real lse = 0;
      for (int c = 0; c < C; c++) lse += std::exp(x.value().at(b, c, t) - mx);
      lse = mx + std::log(lse);
      for (int c = 0; c < C; c++) out.at(b, c, t) = x.value().at(b, c, t) - lse;
    }
  auto n = detail::make_result<Real>(std::move(out), {x.node()});
  if (n->requires_grad) {
    auto xp = x.node();
    n->backprop = [xp, B, C, T](Node<Real> &self) {
      if (auto *gx = detail::grad_sink(xp)) {
        for (int b = 0; b < B; b++)
          for (int t = 0; t < T; t++) {
            Real gsum = 0;
            for (int c = 0; c < C; c++) gsum += self.grad.at(b, c, t);
            for (int c = 0; c < C; c++)
              gx->at(b, c, t) +=
                  self.grad.at(b, c, t) - std::exp(self.value.at(b, c, t)) * gsum;
          }
      }
    };
  }
  return Var<Real>(n);
}

// Mean NLL over frames: logp [B, C, T], labels/included flattened [B*T].
template <typename Real>
inline Var<Real> nll_frames(const Var<Real> &logp, const std::vector<int> &labels,
                            const std::vector<char> &included) {
  const auto &s = logp.value().shape();
  EMOVC_CHECK(s.size() == 3, "nll_frames: expected [B,C,T]");
  int B = s[0], C = s[1], T = s[2];
  EMOVC_CHECK(labels.size() == static_cast<size_t>(B) * T &&
                  included.size() == static_cast<size_t>(B) * T,
              "nll_frames: labels size mismatch");
  int64_t m = 0;
  Real acc = 0;
  for (int b = 0; b < B; b++)
    for (int t = 0; t < T; t++) {
      size_t idx = static_cast<size_t>(b) * T + t;
      if (!included[idx]) continue;
      int lab = labels[idx];
      EMOVC_CHECK(lab >= 0 && lab < C, "nll_frames: label out of range");
      acc -= logp.value().at(b, lab, t);
      m++;
    }
  if (m == 0) return constant(Tensor<Real>::scalar(Real(0)));
  Tensor<Real> out = Tensor<Real>::scalar(acc / static_cast<Real>(m));
  auto n = detail::make_result<Real>(std::move(out), {logp.node()});
  if (n->requires_grad) {
    auto lp = logp.node();
    auto labs = labels;
    auto inc = included;
    n->backprop = [lp, labs, inc, m, B, T](Node<Real> &self) {
      if (auto *gl = detail::grad_sink(lp)) {
        Real g = self.grad[0] / static_cast<Real>(m);
        for (int b = 0; b < B; b++)
          for (int t = 0; t < T; t++) {
            size_t idx = static_cast<size_t>(b) * T + t;
            if (inc[idx]) gl->at(b, labs[idx], t) -= g;
          }
      }
    };
  }
  return Var<Real>(n);
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

template <typename Real>
inline void backward(const Var<Real> &root) {
  EMOVC_CHECK(root.defined() && root.value().size() == 1,
              "backward: root must be a defined scalar");
  if (!root.requires_grad()) return;
  // Collect the reachable grad-bearing subgraph.
  std::vector<Node<Real> *> nodes;
  std::unordered_set<Node<Real> *> seen;
  std::vector<Node<Real> *> stack{root.node().get()};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    Node<Real> *n = stack.back();
    stack.pop_back();
    nodes.push_back(n);
    for (const auto &p : n->parents) {
      if (p->requires_grad && !seen.count(p.get())) {
        seen.insert(p.get());
        stack.push_back(p.get());
      }
    }
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Node<Real> *a, const Node<Real> *b) { return a->order > b->order; });
  for (auto *n : nodes) n->ensure_grad();
  root.node()->grad.fill(Real(1));
  for (auto *n : nodes)
    if (n->backprop) n->backprop(*n);
}

}  // namespace ad
}  // namespace emovc

#endif  // EMOVC_CORE_AUTODIFF_HPP
