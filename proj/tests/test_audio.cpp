// tests/test_audio.cpp

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

#include "emovc/audio/mel.hpp"
#include "emovc/audio/resample.hpp"
#include "emovc/audio/wav.hpp"
#include "emovc/audio/windows.hpp"
#include "testutil.hpp"

using namespace emovc;

TEST_CASE("wav round-trip is bitwise exact for quantized input") {
  test::TempDir tmp("wav");
  Rng rng(7);
  Waveform w;
  w.sample_rate = 24000;
  w.samples.resize(4800);
  for (auto &s : w.samples) {
    int16_t q = static_cast<int16_t>(rng.uniform_int(65536) - 32768);
    s = q / 32768.0;
  }
  std::string path = tmp.str() + "/rt.wav";
  save_waveform(path, w);
  Waveform r = load_waveform(path);
  REQUIRE(r.sample_rate == 24000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); i++) CHECK(r.samples[i] == w.samples[i]);
}

TEST_CASE("silence loads as zeros with preserved rate") {
  test::TempDir tmp("wavz");
  Waveform w;
  w.sample_rate = 24000;
  w.samples.assign(24000, 0.0);
  std::string path = tmp.str() + "/silence.wav";
  save_waveform(path, w);
  Waveform r = load_waveform(path);
  REQUIRE(r.samples.size() == 24000);
  for (double s : r.samples) CHECK(s == 0.0);
}

TEST_CASE("full-scale square wave hits the quantization identity") {
  test::TempDir tmp("wavsq");
  Waveform w;
  w.sample_rate = 8000;
  for (int i = 0; i < 800; i++) w.samples.push_back(i % 2 == 0 ? 1.0 : -1.0);
  std::string path = tmp.str() + "/sq.wav";
  save_waveform(path, w);
  Waveform r = load_waveform(path);
  for (size_t i = 0; i < r.samples.size(); i++) {
    double expect = (i % 2 == 0) ? 32767.0 / 32768.0 : -1.0;
    CHECK(r.samples[i] == Catch::Approx(expect).margin(1e-12));
  }
}

TEST_CASE("wav loader error paths") {
  test::TempDir tmp("waverr");
  CHECK_THROWS_AS(load_waveform(tmp.str() + "/nope.wav"), DataError);
  // zero-length data chunk
  {
    Waveform w;
    w.sample_rate = 8000;
    w.samples = {0.5};
    std::string path = tmp.str() + "/tiny.wav";
    save_waveform(path, w);
    // truncate the data chunk to zero frames by rewriting header with no data
    std::ofstream os(path, std::ios::binary);
    os.write("RIFF", 4);
    char z[4] = {36, 0, 0, 0};
    os.write(z, 4);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    char sixteen[4] = {16, 0, 0, 0};
    os.write(sixteen, 4);
    char fmt[16] = {1, 0, 1, 0, 64, 31, 0, 0, -128, 62, 0, 0, 2, 0, 16, 0};
    os.write(fmt, 16);
    os.write("data", 4);
    char zero[4] = {0, 0, 0, 0};
    os.write(zero, 4);
    os.close();
    CHECK_THROWS_AS(load_waveform(path), DataError);
  }
  // non-PCM format tag rejected
  {
    std::string path = tmp.str() + "/float.wav";
    std::ofstream os(path, std::ios::binary);
    os.write("RIFF", 4);
    char sz[4] = {40, 0, 0, 0};
    os.write(sz, 4);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    char sixteen[4] = {16, 0, 0, 0};
    os.write(sixteen, 4);
    char fmt[16] = {3, 0, 1, 0, 64, 31, 0, 0, 0, 125, 0, 0, 4, 0, 32, 0};
    os.write(fmt, 16);
    os.write("data", 4);
    char four[4] = {4, 0, 0, 0};
    os.write(four, 4);
    char payload[4] = {0, 0, 0, 0};
    os.write(payload, 4);
    os.close();
    CHECK_THROWS_AS(load_waveform(path), DataError);
  }
}

TEST_CASE("multichannel wav keeps the first channel") {
  test::TempDir tmp("wavst");
  std::string path = tmp.str() + "/stereo.wav";
  {
    std::ofstream os(path, std::ios::binary);
    auto w16 = [&](uint16_t v) {
      char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
      os.write(b, 2);
    };
    auto w32 = [&](uint32_t v) {
      char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                   static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
      os.write(b, 4);
    };
    os.write("RIFF", 4);
    w32(36 + 12);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    w32(16);
    w16(1);
    w16(2);  // stereo
    w32(16000);
    w32(16000 * 4);
    w16(4);
    w16(16);
    os.write("data", 4);
    w32(12);
    // 3 frames: L = 100,200,300; R = -1,-2,-3
    int16_t frames[6] = {100, -1, 200, -2, 300, -3};
    os.write(reinterpret_cast<char *>(frames), 12);
  }
  Waveform r = load_waveform(path);
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[0] == Catch::Approx(100.0 / 32768.0));
  CHECK(r.samples[1] == Catch::Approx(200.0 / 32768.0));
  CHECK(r.samples[2] == Catch::Approx(300.0 / 32768.0));
}

TEST_CASE("resample at the identity rate returns identical samples") {
  Rng rng(11);
  Waveform w;
  w.sample_rate = 24000;
  w.samples.resize(1000);
  for (auto &s : w.samples) s = rng.uniform(-0.5, 0.5);
  Waveform r = resample(w, 24000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); i++) CHECK(r.samples[i] == w.samples[i]);
}

TEST_CASE("1 kHz sine downsampled 48k->24k matches the analytic sine") {
  Waveform w;
  w.sample_rate = 48000;
  int n = 48000;
  w.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; i++)
    w.samples[static_cast<size_t>(i)] = 0.7 * std::sin(2.0 * M_PI * 1000.0 * i / 48000.0);
  Waveform r = resample(w, 24000);
  REQUIRE(static_cast<int>(r.samples.size()) == 24000);
  // interior samples (outside the filter half-width at each edge)
  int guard = 200;
  double max_err = 0.0;
  for (int i = guard; i < static_cast<int>(r.samples.size()) - guard; i++) {
    double expect = 0.7 * std::sin(2.0 * M_PI * 1000.0 * i / 24000.0);
    max_err = std::max(max_err, std::abs(r.samples[static_cast<size_t>(i)] - expect));
  }
  CHECK(max_err < 1e-3);
}

TEST_CASE("resampling preserves duration within one sample period") {
  Rng rng(13);
  for (int in_rate : {16000, 22050, 44100}) {
    Waveform w;
    w.sample_rate = in_rate;
    w.samples.assign(static_cast<size_t>(2 * in_rate), 0.1);
    Waveform r = resample(w, 24000);
    CHECK(std::abs(static_cast<int64_t>(r.samples.size()) - 48000) <= 1);
  }
}

TEST_CASE("frame_windows fixtures") {
  auto w1 = frame_windows(8, 4);
  REQUIRE(w1.ranges == std::vector<std::pair<int, int>>{{0, 4}, {2, 6}, {4, 8}});
  CHECK(w1.hop() == 2);
  CHECK(w1.overlap() == 0.5);

  auto w2 = frame_windows(4, 4);
  REQUIRE(w2.ranges == std::vector<std::pair<int, int>>{{0, 4}});

  auto w3 = frame_windows(7, 4);
  REQUIRE(w3.ranges == std::vector<std::pair<int, int>>{{0, 4}, {2, 6}});

  CHECK(frame_windows(3, 4).ranges.empty());  // shorter than one window
  CHECK_THROWS(frame_windows(8, 3));          // odd window_len rejected
}

TEST_CASE("frame_windows tiling: interior frames covered exactly twice") {
  Rng rng(17);
  for (int rep = 0; rep < 20; rep++) {
    int len = 2 * (1 + static_cast<int>(rng.uniform_int(6)));
    int n = len + static_cast<int>(rng.uniform_int(40));
    auto ws = frame_windows(n, len);
    std::vector<int> cover(static_cast<size_t>(n), 0);
    for (auto [b, e] : ws.ranges)
      for (int i = b; i < e; i++) cover[static_cast<size_t>(i)]++;
    if (ws.ranges.empty()) continue;
    int last_covered = ws.ranges.back().second;
    for (int i = len / 2; i < last_covered - len / 2; i++)
      CHECK(cover[static_cast<size_t>(i)] == 2);
  }
}

namespace {

MelConfig test_mel_config() { return MelConfig{}; }

Waveform sine_wave(double freq, double amp, int n, int sr) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; i++)
    w.samples[static_cast<size_t>(i)] = amp * std::sin(2.0 * M_PI * freq * i / sr);
  return w;
}

}  // namespace

TEST_CASE("log-mel of silence is ln(floor) everywhere with the contract shape") {
  MelExtractor ext(test_mel_config());
  Waveform w;
  w.sample_rate = 24000;
  w.samples.assign(48000, 0.0);
  MelSpectrogram mel = ext.log_mel(w);
  REQUIRE(mel.values.dim(0) == 80);
  REQUIRE(mel.values.dim(1) == 48000 / 300 + 1);
  double expect = std::log(1e-5);
  for (int64_t i = 0; i < mel.values.size(); i++) CHECK(mel.values[i] == expect);
}

TEST_CASE("log-mel rejects input shorter than one analysis window") {
  MelExtractor ext(test_mel_config());
  Waveform w;
  w.sample_rate = 24000;
  w.samples.assign(1100, 0.1);
  CHECK_THROWS_AS(ext.log_mel(w), DataError);
  Waveform wrong_rate;
  wrong_rate.sample_rate = 16000;
  wrong_rate.samples.assign(48000, 0.0);
  CHECK_THROWS(ext.log_mel(wrong_rate));
}

TEST_CASE("1 kHz sine concentrates in the band nearest 1 kHz in every frame") {
  MelExtractor ext(test_mel_config());
  Waveform w = sine_wave(1000.0, 0.5, 48000, 24000);
  MelSpectrogram mel = ext.log_mel(w);
  int expect_band = 0;
  double best = 1e18;
  for (size_t m = 0; m < mel.center_freqs.size(); m++) {
    double d = std::abs(mel.center_freqs[m] - 1000.0);
    if (d < best) {
      best = d;
      expect_band = static_cast<int>(m);
    }
  }
  for (int t = 0; t < mel.values.dim(1); t++) {
    int argmax = 0;
    double mx = mel.values.at(0, t);
    for (int m = 1; m < 80; m++)
      if (mel.values.at(m, t) > mx) {
        mx = mel.values.at(m, t);
        argmax = m;
      }
    CHECK(argmax == expect_band);
  }
}

TEST_CASE("doubling amplitude raises above-floor log-mel values by exactly ln 4") {
  MelExtractor ext(test_mel_config());
  Waveform w = sine_wave(440.0, 0.3, 36000, 24000);
  Waveform w2 = w;
  for (auto &s : w2.samples) s *= 2.0;
  MelSpectrogram a = ext.log_mel(w), b = ext.log_mel(w2);
  double floor_log = std::log(1e-5);
  int checked = 0;
  for (int64_t i = 0; i < a.values.size(); i++) {
    if (a.values[i] > floor_log) {
      CHECK(b.values[i] - a.values[i] == Catch::Approx(std::log(4.0)).epsilon(1e-9));
      checked++;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("log-mel energy monotonicity under amplitude scaling") {
  MelExtractor ext(test_mel_config());
  Rng rng(23);
  Waveform w;
  w.sample_rate = 24000;
  w.samples.resize(30000);
  for (auto &s : w.samples) s = rng.uniform(-0.3, 0.3);
  Waveform w2 = w;
  for (auto &s : w2.samples) s *= 1.7;
  MelSpectrogram a = ext.log_mel(w), b = ext.log_mel(w2);
  for (int64_t i = 0; i < a.values.size(); i++) CHECK(b.values[i] >= a.values[i]);
}

TEST_CASE("shifting input by one hop shifts interior frames bit-exactly") {
  MelExtractor ext(test_mel_config());
  Rng rng(29);
  int n = 30000, hop = 300;
  Waveform w;
  w.sample_rate = 24000;
  w.samples.resize(static_cast<size_t>(n + hop));
  for (auto &s : w.samples) s = rng.uniform(-0.4, 0.4);
  Waveform shifted;
  shifted.sample_rate = 24000;
  shifted.samples.assign(w.samples.begin() + hop, w.samples.end());

  MelSpectrogram a = ext.log_mel(w), b = ext.log_mel(shifted);
  // interior frames: windows fully inside both signals
  int guard = 1200 / hop + 2;
  for (int t = guard; t < b.values.dim(1) - guard; t++)
    for (int m = 0; m < 80; m++) CHECK(b.values.at(m, t) == a.values.at(m, t + 1));
}

TEST_CASE("griffin-lim inversion of a sine keeps its pitch recoverable") {
  MelExtractor ext(test_mel_config());
  Waveform w = sine_wave(220.0, 0.5, 48000, 24000);
  MelSpectrogram mel = ext.log_mel(w);
  Waveform rec = ext.invert(mel, 40, 123);
  REQUIRE(rec.samples.size() >= 47000);
  // dominant band of the reconstruction matches the source's
  MelSpectrogram mel2 = ext.log_mel(rec);
  int t = mel2.values.dim(1) / 2;
  int arg1 = 0, arg2 = 0;
  for (int m = 1; m < 80; m++) {
    if (mel.values.at(m, t) > mel.values.at(arg1, t)) arg1 = m;
    if (mel2.values.at(m, t) > mel2.values.at(arg2, t)) arg2 = m;
  }
  CHECK(std::abs(arg1 - arg2) <= 1);
}
