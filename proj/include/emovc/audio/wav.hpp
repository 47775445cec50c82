// emovc/audio/wav.hpp

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

#ifndef EMOVC_AUDIO_WAV_HPP
#define EMOVC_AUDIO_WAV_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "emovc/core/common.hpp"

namespace emovc {

// Normalized mono waveform.  Samples are amplitude in [-1, 1]; int16 input is
// divided by 32768 so full scale maps to 32767/32768.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

namespace wav_detail {

inline uint32_t read_u32(std::istream &is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char *>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline uint16_t read_u16(std::istream &is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char *>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

inline void write_u32(std::ostream &os, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void write_u16(std::ostream &os, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace wav_detail

// Reads a PCM 16-bit WAV file.  Multi-channel input keeps the first channel.
// Anything other than format tag 1 / 16-bit is rejected.
inline Waveform load_waveform(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("load_waveform: missing file: " + path);

  char tag[4];
  is.read(tag, 4);
  uint32_t riff_size = wav_detail::read_u32(is);
  (void)riff_size;
  char wave[4];
  is.read(wave, 4);
  if (!is || std::memcmp(tag, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
    throw DataError("load_waveform: not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<int16_t> raw;
  bool have_data = false;

  while (is && !have_data) {
    char cid[4];
    is.read(cid, 4);
    if (!is) break;
    uint32_t csize = wav_detail::read_u32(is);
    if (std::memcmp(cid, "fmt ", 4) == 0) {
      format = wav_detail::read_u16(is);
      channels = wav_detail::read_u16(is);
      rate = wav_detail::read_u32(is);
      wav_detail::read_u32(is);  // byte rate
      wav_detail::read_u16(is);  // block align
      bits = wav_detail::read_u16(is);
      if (csize > 16) is.ignore(csize - 16);
      have_fmt = true;
    } else if (std::memcmp(cid, "data", 4) == 0) {
      if (!have_fmt) throw DataError("load_waveform: data chunk before fmt: " + path);
      if (format != 1 || bits != 16)
        throw DataError("load_waveform: unsupported encoding (need PCM16): " + path);
      raw.resize(csize / 2);
      is.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()) * 2);
      have_data = true;
    } else {
      is.ignore(csize + (csize & 1));  // chunks are word-aligned
    }
  }
  if (!have_data) throw DataError("load_waveform: no data chunk: " + path);
  if (channels == 0) throw DataError("load_waveform: zero channels: " + path);

  size_t frames = raw.size() / channels;
  if (frames == 0) throw DataError("load_waveform: zero-length audio: " + path);

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(frames);
  for (size_t i = 0; i < frames; i++)
    w.samples[i] = static_cast<double>(raw[i * channels]) / 32768.0;
  return w;
}

// Writes PCM 16-bit mono.  Values are clamped, then rounded to nearest.
inline void save_waveform(const std::string &path, const Waveform &w) {
  EMOVC_CHECK(w.sample_rate > 0, "save_waveform: invalid sample rate");
  EMOVC_CHECK(!w.samples.empty(), "save_waveform: empty waveform");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("save_waveform: cannot open for write: " + path);

  uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  os.write("RIFF", 4);
  wav_detail::write_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  wav_detail::write_u32(os, 16);
  wav_detail::write_u16(os, 1);  // PCM
  wav_detail::write_u16(os, 1);  // mono
  wav_detail::write_u32(os, static_cast<uint32_t>(w.sample_rate));
  wav_detail::write_u32(os, static_cast<uint32_t>(w.sample_rate) * 2);
  wav_detail::write_u16(os, 2);
  wav_detail::write_u16(os, 16);
  os.write("data", 4);
  wav_detail::write_u32(os, data_bytes);
  for (double s : w.samples) {
    double v = s * 32768.0;
    if (v > 32767.0) v = 32767.0;
    if (v < -32768.0) v = -32768.0;
    int16_t q = static_cast<int16_t>(std::lrint(v));
    wav_detail::write_u16(os, static_cast<uint16_t>(q));
  }
  if (!os) throw DataError("save_waveform: write failed: " + path);
}

}  // namespace emovc

#endif  // EMOVC_AUDIO_WAV_HPP
