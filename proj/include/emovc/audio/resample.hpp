// emovc/audio/resample.hpp

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

#ifndef EMOVC_AUDIO_RESAMPLE_HPP
#define EMOVC_AUDIO_RESAMPLE_HPP

#include <cmath>

#include "emovc/audio/wav.hpp"

namespace emovc {

namespace resample_detail {

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

// Blackman window on u in [-1, 1].
inline double blackman(double u) {
  if (u < -1.0 || u > 1.0) return 0.0;
  return 0.42 + 0.5 * std::cos(M_PI * u) + 0.08 * std::cos(2.0 * M_PI * u);
}

}  // namespace resample_detail

// Band-limited (windowed-sinc) resampling.  When downsampling, the kernel
// cutoff scales to the target Nyquist and the support widens accordingly.
// Samples outside the input are treated as zero, so the outermost half-kernel
// at each edge tapers toward silence.
inline Waveform resample(const Waveform &w, int target_rate, int taps_per_side = 32) {
  EMOVC_CHECK(target_rate > 0, "resample: target_rate must be positive");
  EMOVC_CHECK(w.sample_rate > 0, "resample: input rate must be positive");
  if (target_rate == w.sample_rate) return w;

  const double ratio = static_cast<double>(target_rate) / w.sample_rate;
  const double cutoff = std::min(1.0, ratio);
  const double half_width = taps_per_side / cutoff;
  const int64_t n_in = static_cast<int64_t>(w.samples.size());
  const int64_t n_out = static_cast<int64_t>(
      std::llround(static_cast<double>(n_in) * target_rate / w.sample_rate));

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(n_out));

  for (int64_t n = 0; n < n_out; n++) {
    double pos = static_cast<double>(n) / ratio;
    int64_t j0 = static_cast<int64_t>(std::ceil(pos - half_width));
    int64_t j1 = static_cast<int64_t>(std::floor(pos + half_width));
    if (j0 < 0) j0 = 0;
    if (j1 >= n_in) j1 = n_in - 1;
    double acc = 0.0;
    for (int64_t j = j0; j <= j1; j++) {
      double d = pos - static_cast<double>(j);
      acc += w.samples[static_cast<size_t>(j)] * cutoff *
             resample_detail::sinc(cutoff * d) * resample_detail::blackman(d / half_width);
    }
    out.samples[static_cast<size_t>(n)] = acc;
  }
  return out;
}

}  // namespace emovc

#endif  // EMOVC_AUDIO_RESAMPLE_HPP
