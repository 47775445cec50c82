// emovc/core/rng.hpp

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

#ifndef EMOVC_CORE_RNG_HPP
#define EMOVC_CORE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "emovc/core/common.hpp"

namespace emovc {

// xoshiro256** with splitmix64 seeding.  Deterministic streams with a
// four-word state that serializes exactly; checkpoint resumption depends on
// restoring this state bit-for-bit.  The normal sampler always consumes two
// uniforms (no cached spare), so the draw count per call is fixed.
class Rng {
 public:
  Rng() : Rng(0x9e3779b97f4a7c15ull) {}

  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto &w : s_) {
      x += 0x9e3779b97f4a7c15ull;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
  }

  // Independent substream for a named purpose (data order, init, ...).
  Rng fork(const std::string &purpose) const {
    uint64_t h = fnv1a64(purpose);
    for (auto w : s_) h = fnv1a64(&w, sizeof(w), h);
    return Rng(h);
  }

  uint64_t next_u64() {
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int64_t uniform_int(int64_t n) {
    EMOVC_CHECK(n > 0, "uniform_int: n must be positive");
    return static_cast<int64_t>(next_u64() % static_cast<uint64_t>(n));
  }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::string serialize() const {
    std::ostringstream os;
    os << s_[0] << " " << s_[1] << " " << s_[2] << " " << s_[3];
    return os.str();
  }

  static Rng deserialize(const std::string &text) {
    Rng r;
    std::istringstream is(text);
    for (auto &w : r.s_) {
      EMOVC_CHECK(static_cast<bool>(is >> w), "Rng::deserialize: bad state string");
    }
    return r;
  }

  bool operator==(const Rng &o) const { return s_ == o.s_; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> s_{};
};

}  // namespace emovc

#endif  // EMOVC_CORE_RNG_HPP
