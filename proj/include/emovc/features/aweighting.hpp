// emovc/features/aweighting.hpp

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

#ifndef EMOVC_FEATURES_AWEIGHTING_HPP
#define EMOVC_FEATURES_AWEIGHTING_HPP

#include <cmath>

namespace emovc {

// IEC 61672 A-weighting magnitude response (amplitude gain, unnormalized).
inline double a_weight_response(double f_hz) {
  double f2 = f_hz * f_hz;
  double num = 12194.0 * 12194.0 * f2 * f2;
  double den = (f2 + 20.6 * 20.6) *
               std::sqrt((f2 + 107.7 * 107.7) * (f2 + 737.9 * 737.9)) *
               (f2 + 12194.0 * 12194.0);
  return num / den;
}

// A-weighting in dB, normalized to exactly 0 dB at 1 kHz.
inline double a_weight_db(double f_hz) {
  if (f_hz <= 0.0) return -200.0;
  static const double ref = 20.0 * std::log10(a_weight_response(1000.0));
  return 20.0 * std::log10(a_weight_response(f_hz)) - ref;
}

// Linear gain applied to band energies: 10^(A_dB/10), so that the loudness
// difference between two point-mass spectra equals their A_dB difference.
inline double a_weight_energy_gain(double f_hz) {
  return std::pow(10.0, a_weight_db(f_hz) / 10.0);
}

}  // namespace emovc

#endif  // EMOVC_FEATURES_AWEIGHTING_HPP
