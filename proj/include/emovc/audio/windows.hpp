// emovc/audio/windows.hpp

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

#ifndef EMOVC_AUDIO_WINDOWS_HPP
#define EMOVC_AUDIO_WINDOWS_HPP

#include <utility>
#include <vector>

#include "emovc/core/common.hpp"

namespace emovc {

// Half-overlapping frame windows over an utterance: hop is always
// window_len / 2 and a trailing partial window is dropped.
struct WindowSequence {
  int window_len = 0;                          // frames
  std::vector<std::pair<int, int>> ranges;     // [begin, end) frame indices

  int hop() const { return window_len / 2; }
  double overlap() const { return 0.5; }
  int count() const { return static_cast<int>(ranges.size()); }
};

inline WindowSequence frame_windows(int n_frames, int window_len) {
  EMOVC_CHECK(window_len >= 2 && window_len % 2 == 0,
              "frame_windows: window_len must be even and >= 2");
  WindowSequence ws;
  ws.window_len = window_len;
  int hop = window_len / 2;
  for (int start = 0; start + window_len <= n_frames; start += hop)
    ws.ranges.emplace_back(start, start + window_len);
  return ws;
}

}  // namespace emovc

#endif  // EMOVC_AUDIO_WINDOWS_HPP
