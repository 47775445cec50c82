// emovc/core/common.hpp

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

#ifndef EMOVC_CORE_COMMON_HPP
#define EMOVC_CORE_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace emovc {

// Error categories map onto CLI exit codes: usage -> 2, config -> 3,
// anything else -> 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string &msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

#define EMOVC_CHECK(cond, msg)                                    \
  do {                                                            \
    if (!(cond)) {                                                \
      std::ostringstream os__;                                    \
      os__ << msg;                                                \
      throw std::runtime_error(os__.str());                       \
    }                                                             \
  } while (0)

template <typename T>
inline bool is_finite(T x) {
  return std::isfinite(static_cast<double>(x));
}

// FNV-1a, used for config hashing and blob checksums.
inline uint64_t fnv1a64(const void *data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char *p = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < n; i++) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string &s) { return fnv1a64(s.data(), s.size()); }

}  // namespace emovc

#endif  // EMOVC_CORE_COMMON_HPP
