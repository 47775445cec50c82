// tests/testutil.hpp

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

#ifndef EMOVC_TESTS_TESTUTIL_HPP
#define EMOVC_TESTS_TESTUTIL_HPP

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "emovc/core/autodiff.hpp"
#include "emovc/core/rng.hpp"
#include "emovc/core/tensor.hpp"

namespace emovc::test {

// Temporary directory that cleans up on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("emovc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Central finite differences of a scalar-valued function of a flat input
// vector, compared against an analytic gradient.  Returns the worst relative
// error over the probed coordinates.  Denominator follows the usual
// |a - b| / max(|a|, |b|, floor) convention so near-zero entries do not blow
// up the ratio.
struct FdReport {
  double max_rel_err = 0.0;
  int checked = 0;
};

inline FdReport fd_check(const std::function<double(const std::vector<double> &)> &f,
                         std::vector<double> x0, const std::vector<double> &analytic,
                         const std::vector<int64_t> &coords, double step = 1e-4,
                         double denom_floor = 1e-6) {
  FdReport rep;
  for (int64_t c : coords) {
    double keep = x0[static_cast<size_t>(c)];
    x0[static_cast<size_t>(c)] = keep + step;
    double fp = f(x0);
    x0[static_cast<size_t>(c)] = keep - step;
    double fm = f(x0);
    x0[static_cast<size_t>(c)] = keep;
    double fd = (fp - fm) / (2.0 * step);
    double an = analytic[static_cast<size_t>(c)];
    double denom = std::max({std::abs(fd), std::abs(an), denom_floor});
    rep.max_rel_err = std::max(rep.max_rel_err, std::abs(fd - an) / denom);
    rep.checked++;
  }
  return rep;
}

inline std::vector<int64_t> random_coords(Rng &rng, int64_t n, int count) {
  std::vector<int64_t> out;
  for (int i = 0; i < count; i++) out.push_back(rng.uniform_int(n));
  return out;
}

}  // namespace emovc::test

#endif  // EMOVC_TESTS_TESTUTIL_HPP
