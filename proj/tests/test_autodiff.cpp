// tests/test_autodiff.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include "emovc/core/autodiff.hpp"
#include "testutil.hpp"

using namespace emovc;
using namespace emovc::ad;

namespace {

// Runs fd_check for a graph builder: op(x) reduced to a scalar by a fixed
// random weighting (rather than a plain sum, so asymmetric errors show up).
double check_op(const std::function<Var<double>(const Var<double> &)> &op,
                std::vector<int> shape, uint64_t seed, int coords = 12,
                double step = 1e-4) {
  Rng rng(seed);
  Tensor<double> x0 = Tensor<double>::randn(shape, rng);
  Var<double> probe = Var<double>::leaf(x0, true);
  Var<double> y = op(probe);
  Tensor<double> w = Tensor<double>::randn(y.value().shape(), rng);

  auto weighted = [&](const Var<double> &v) {
    return sum_all(mul(v, constant(Tensor<double>(w))));
  };

  Var<double> loss = weighted(y);
  backward(loss);
  std::vector<double> analytic(probe.grad().data(), probe.grad().data() + x0.size());

  auto f = [&](const std::vector<double> &flat) {
    Tensor<double> xt = Tensor<double>::from(shape, flat);
    Var<double> leaf = Var<double>::leaf(xt, false);
    return weighted(op(leaf)).value()[0];
  };

  std::vector<double> flat(x0.data(), x0.data() + x0.size());
  auto cs = emovc::test::random_coords(rng, x0.size(), coords);
  return emovc::test::fd_check(f, flat, analytic, cs, step).max_rel_err;
}

}  // namespace

TEST_CASE("elementwise op gradients match finite differences") {
  CHECK(check_op([](const Var<double> &x) { return exp_v(x); }, {3, 7}, 11) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return tanh_v(x); }, {3, 7}, 12) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return sigmoid_v(x); }, {21}, 13) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return softplus_v(x); }, {21}, 14) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return square_v(x); }, {4, 5}, 15) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return leaky_relu(x, 0.2); }, {40}, 16) < 1e-5);
  CHECK(check_op([](const Var<double> &x) { return log_v(scalar_add(square_v(x), 1.0)); },
                 {30}, 17) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return sqrt_v(scalar_add(square_v(x), 0.5)); },
                 {30}, 18) < 1e-6);
}

TEST_CASE("binary op gradients") {
  Rng rng(21);
  Tensor<double> b0 = Tensor<double>::randn({5, 6}, rng);
  auto with_const = [&](auto fn) {
    return [fn, b0](const Var<double> &x) {
      return fn(x, constant(Tensor<double>(b0)));
    };
  };
  CHECK(check_op(with_const([](const Var<double> &a, const Var<double> &b) {
          return mul(a, b);
        }),
        {5, 6}, 22) < 1e-6);
  CHECK(check_op(with_const([](const Var<double> &a, const Var<double> &b) {
          return div_v(a, scalar_add(square_v(b), 1.0));
        }),
        {5, 6}, 23) < 1e-6);
  // both sides of mul fed by the same leaf (diamond graph)
  CHECK(check_op([](const Var<double> &x) { return mul(x, tanh_v(x)); }, {5, 6}, 24) < 1e-6);
}

TEST_CASE("matmul, linear, conv1d gradients") {
  CHECK(check_op(
            [](const Var<double> &x) {
              Rng r(31);
              auto b = constant(Tensor<double>::randn({4, 3}, r));
              return matmul(x, b);
            },
            {5, 4}, 32) < 1e-6);
  CHECK(check_op(
            [](const Var<double> &x) {
              Rng r(33);
              auto a = constant(Tensor<double>::randn({6, 5}, r));
              return matmul(a, x);
            },
            {5, 4}, 34) < 1e-6);
  // linear wrt input / weight / bias
  {
    Rng r(35);
    Tensor<double> w0 = Tensor<double>::randn({4, 6}, r);
    Tensor<double> b0 = Tensor<double>::randn({4}, r);
    CHECK(check_op(
              [&](const Var<double> &x) {
                return linear(x, constant(Tensor<double>(w0)), constant(Tensor<double>(b0)));
              },
              {3, 6}, 36) < 1e-6);
    Tensor<double> x0 = Tensor<double>::randn({3, 6}, r);
    CHECK(check_op(
              [&](const Var<double> &w) {
                return linear(constant(Tensor<double>(x0)), w, constant(Tensor<double>(b0)));
              },
              {4, 6}, 37) < 1e-6);
    CHECK(check_op(
              [&](const Var<double> &b) {
                return linear(constant(Tensor<double>(x0)), constant(Tensor<double>(w0)), b);
              },
              {4}, 38) < 1e-6);
  }
  // conv1d wrt input and weight, stride 1 and 2
  for (int stride : {1, 2}) {
    Rng r(40 + stride);
    Tensor<double> w0 = Tensor<double>::randn({4, 3, 3}, r);
    Tensor<double> b0 = Tensor<double>::randn({4}, r);
    Tensor<double> x0 = Tensor<double>::randn({2, 3, 9}, r);
    CHECK(check_op(
              [&](const Var<double> &x) {
                return conv1d(x, constant(Tensor<double>(w0)), constant(Tensor<double>(b0)),
                              stride, 1);
              },
              {2, 3, 9}, 42u + static_cast<unsigned>(stride)) < 1e-6);
    CHECK(check_op(
              [&](const Var<double> &w) {
                return conv1d(constant(Tensor<double>(x0)), w, constant(Tensor<double>(b0)),
                              stride, 1);
              },
              {4, 3, 3}, 44u + static_cast<unsigned>(stride)) < 1e-6);
  }
}

TEST_CASE("indexed_linear routes gradient only into selected heads") {
  Rng r(50);
  Tensor<double> w0 = Tensor<double>::randn({3, 4, 5}, r);
  Tensor<double> b0 = Tensor<double>::randn({3, 4}, r);
  Tensor<double> x0 = Tensor<double>::randn({2, 5}, r);
  std::vector<int> codes{2, 0};

  Var<double> w = Var<double>::leaf(w0, true);
  Var<double> b = Var<double>::leaf(b0, true);
  Var<double> x = Var<double>::leaf(x0, true);
  auto y = indexed_linear(w, b, x, codes);
  backward(sum_all(y));

  // head 1 untouched by either sample
  for (int o = 0; o < 4; o++) {
    CHECK(w.grad().at(1, o, 0) == 0.0);
    CHECK(b.grad().at(1, o) == 0.0);
  }
  // selected heads receive gradient
  CHECK(w.grad().at(2, 0, 0) != 0.0);
  CHECK(w.grad().at(0, 0, 0) != 0.0);

  CHECK(check_op(
            [&](const Var<double> &xv) {
              return indexed_linear(constant(Tensor<double>(w0)), constant(Tensor<double>(b0)),
                                    xv, codes);
            },
            {2, 5}, 51) < 1e-6);
  CHECK(check_op(
            [&](const Var<double> &wv) {
              return indexed_linear(wv, constant(Tensor<double>(b0)),
                                    constant(Tensor<double>(x0)), codes);
            },
            {3, 4, 5}, 52) < 1e-6);
}

TEST_CASE("normalization and structural op gradients") {
  CHECK(check_op([](const Var<double> &x) { return instance_norm(x, 1e-5); }, {2, 3, 11},
                 61, 12, 1e-5) < 1e-4);
  CHECK(check_op(
            [](const Var<double> &x) {
              Rng r(62);
              auto g = constant(Tensor<double>::randn({2, 3}, r));
              auto b = constant(Tensor<double>::randn({2, 3}, r));
              return channel_affine(x, g, b);
            },
            {2, 3, 7}, 63) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return upsample_nearest(x, 15); }, {2, 3, 7}, 64) <
        1e-6);
  CHECK(check_op([](const Var<double> &x) { return mean_time(x); }, {2, 3, 7}, 65) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return slice_batch(x, 1); }, {3, 4, 5}, 66) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return diff_time(x); }, {9}, 67) < 1e-6);
  CHECK(check_op(
            [](const Var<double> &x) {
              auto s = col_select(x, 1);
              Rng r(68);
              auto m = constant(Tensor<double>::randn({4, 3}, r));
              return scale_rows(m, s);
            },
            {4, 3}, 69) < 1e-6);
  CHECK(check_op(
            [](const Var<double> &x) {
              Rng r(70);
              Tensor<double> d0 = Tensor<double>::randn({3}, r);
              for (int i = 0; i < 3; i++) d0[i] = 2.0 + std::abs(d0[i]);
              return div_rows(x, constant(std::move(d0)), 1e-8);
            },
            {3, 6}, 71) < 1e-6);
  CHECK(check_op(
            [](const Var<double> &x) {
              Tensor<double> m({3, 6});
              for (int b = 0; b < 3; b++)
                for (int t = 0; t < 6; t++) m.at(b, t) = (t % 2 == 0) ? 1.0 : 0.0;
              return masked_row_mean(x, m);
            },
            {3, 6}, 72) < 1e-6);
}

TEST_CASE("softmax and cross-entropy gradients") {
  CHECK(check_op([](const Var<double> &x) { return row_log_softmax(x); }, {3, 5}, 81) < 1e-6);
  CHECK(check_op([](const Var<double> &x) { return row_softmax(x); }, {3, 5}, 82) < 1e-6);
  std::vector<int> labels{1, 3, 0};
  std::vector<char> inc{1, 0, 1};
  CHECK(check_op(
            [&](const Var<double> &x) { return nll_rows(row_log_softmax(x), labels, inc); },
            {3, 5}, 83) < 1e-6);
  std::vector<int> frame_labels{0, 1, 2, 1, 0, 2};
  std::vector<char> finc{1, 1, 0, 1, 1, 1};
  CHECK(check_op(
            [&](const Var<double> &x) {
              return nll_frames(channel_log_softmax(x), frame_labels, finc);
            },
            {2, 3, 3}, 84) < 1e-6);
}

TEST_CASE("softmax rows land on the simplex") {
  Rng rng(91);
  auto x = Var<double>::leaf(Tensor<double>::randn({16, 5}, rng), false);
  auto p = row_softmax(x);
  for (int b = 0; b < 16; b++) {
    double s = 0;
    for (int j = 0; j < 5; j++) {
      double v = p.value().at(b, j);
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) < 1e-6);
  }
}

TEST_CASE("frozen leaves receive exactly zero gradient") {
  Rng rng(101);
  auto a = Var<double>::leaf(Tensor<double>::randn({4}, rng), true);
  auto b = Var<double>::leaf(Tensor<double>::randn({4}, rng), false);
  auto y = sum_all(mul(a, b));
  backward(y);
  CHECK(a.grad().max_abs() > 0.0);
  CHECK(!b.has_grad());  // never allocated, exactly zero by contract

  // flip flags: now only b flows
  a.set_requires_grad(false);
  b.set_requires_grad(true);
  a.zero_grad();
  auto y2 = sum_all(mul(a, b));
  backward(y2);
  CHECK(a.grad().max_abs() == 0.0);
  CHECK(b.grad().max_abs() > 0.0);
}

TEST_CASE("gradient accumulates across backward calls until zeroed") {
  auto a = Var<double>::leaf(Tensor<double>::scalar(3.0), true);
  backward(square_v(a));
  double g1 = a.grad()[0];
  backward(square_v(a));
  CHECK(a.grad()[0] == Catch::Approx(2.0 * g1));
  a.zero_grad();
  backward(square_v(a));
  CHECK(a.grad()[0] == Catch::Approx(g1));
}

TEST_CASE("backward is bit-deterministic across repeats") {
  Rng rng(111);
  Tensor<double> x0 = Tensor<double>::randn({4, 8}, rng);
  std::vector<double> first;
  for (int rep = 0; rep < 2; rep++) {
    auto x = Var<double>::leaf(Tensor<double>(x0), true);
    auto y = mean_all(mul(tanh_v(x), sigmoid_v(x)));
    backward(y);
    if (rep == 0) {
      first.assign(x.grad().data(), x.grad().data() + x.grad().size());
    } else {
      for (int64_t i = 0; i < x.grad().size(); i++) CHECK(x.grad()[i] == first[static_cast<size_t>(i)]);
    }
  }
}

TEST_CASE("concat_channels splits gradient by source") {
  Rng rng(121);
  auto a = Var<double>::leaf(Tensor<double>::randn({2, 3, 4}, rng), true);
  auto b = Var<double>::leaf(Tensor<double>::randn({2, 2, 4}, rng), true);
  auto y = concat_channels(a, b);
  REQUIRE(y.value().shape() == std::vector<int>({2, 5, 4}));
  backward(sum_all(y));
  for (int64_t i = 0; i < a.grad().size(); i++) CHECK(a.grad()[i] == 1.0);
  for (int64_t i = 0; i < b.grad().size(); i++) CHECK(b.grad()[i] == 1.0);
}
