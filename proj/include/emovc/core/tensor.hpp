// emovc/core/tensor.hpp

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

#ifndef EMOVC_CORE_TENSOR_HPP
#define EMOVC_CORE_TENSOR_HPP

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "emovc/core/common.hpp"
#include "emovc/core/rng.hpp"

namespace emovc {

// Dense row-major tensor.  Rank is 0..3 in practice: [T], [R,C], [B,C,T].
template <typename Real>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(numel_of(shape_), Real(0));
  }

  Tensor(std::initializer_list<int> shape) : Tensor(std::vector<int>(shape)) {}

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, Real v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }

  static Tensor scalar(Real v) {
    Tensor t({1});
    t.data_[0] = v;
    return t;
  }

  static Tensor from(std::vector<int> shape, std::vector<Real> values) {
    Tensor t;
    t.shape_ = std::move(shape);
    EMOVC_CHECK(static_cast<size_t>(numel_of(t.shape_)) == values.size(),
                "Tensor::from: shape/value count mismatch");
    t.data_ = std::move(values);
    return t;
  }

  static Tensor randn(std::vector<int> shape, Rng &rng, Real stddev = Real(1)) {
    Tensor t(std::move(shape));
    for (auto &x : t.data_) x = static_cast<Real>(rng.normal()) * stddev;
    return t;
  }

  template <typename Other>
  static Tensor cast(const Tensor<Other> &o) {
    Tensor t;
    t.shape_ = o.shape();
    t.data_.resize(o.size());
    for (int64_t i = 0; i < o.size(); i++) t.data_[i] = static_cast<Real>(o.data()[i]);
    return t;
  }

  const std::vector<int> &shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  Real *data() { return data_.data(); }
  const Real *data() const { return data_.data(); }

  Real &operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  Real operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  Real &at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  const Real &at(int i, int j) const {
    return data_[static_cast<size_t>(i) * shape_[1] + j];
  }
  Real &at(int b, int c, int t) {
    return data_[(static_cast<size_t>(b) * shape_[1] + c) * shape_[2] + t];
  }
  const Real &at(int b, int c, int t) const {
    return data_[(static_cast<size_t>(b) * shape_[1] + c) * shape_[2] + t];
  }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  void fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor &o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (Real x : data_)
      if (!is_finite(x)) return false;
    return true;
  }

  Real sum() const { return std::accumulate(data_.begin(), data_.end(), Real(0)); }

  Real max_abs() const {
    Real m = 0;
    for (Real x : data_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  static int64_t numel_of(const std::vector<int> &shape) {
    int64_t n = 1;
    for (int d : shape) {
      EMOVC_CHECK(d >= 0, "Tensor: negative dimension");
      n *= d;
    }
    return shape.empty() ? 0 : n;
  }

  std::vector<int> shape_;
  std::vector<Real> data_;
};

}  // namespace emovc

#endif  // EMOVC_CORE_TENSOR_HPP
