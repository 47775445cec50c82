// emovc/audio/mel.hpp

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

#ifndef EMOVC_AUDIO_MEL_HPP
#define EMOVC_AUDIO_MEL_HPP

#include <complex>
#include <vector>

#include "emovc/audio/wav.hpp"
#include "emovc/core/rng.hpp"
#include "emovc/core/tensor.hpp"

namespace emovc {

// Natural-log mel spectrogram, floored at cfg.floor before the log.  This is
// the currency every network and loss operates on.
struct MelSpectrogram {
  Tensor<double> values;                // [n_mels, n_frames], ln(max(E, floor))
  std::vector<double> center_freqs;     // Hz per mel band
  double hop_seconds = 0.0;
};

struct MelConfig {
  int sample_rate = 24000;
  int n_fft = 2048;
  int win_length = 1200;
  int hop_length = 300;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 12000.0;
  double floor = 1e-5;
};

// Iterative radix-2 FFT with precomputed twiddles.
class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    EMOVC_CHECK(n >= 2 && (n & (n - 1)) == 0, "Fft: size must be a power of two");
    twiddle_.resize(static_cast<size_t>(n / 2));
    for (int k = 0; k < n / 2; k++)
      twiddle_[static_cast<size_t>(k)] =
          std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) / n);
    rev_.resize(static_cast<size_t>(n));
    int bits = 0;
    while ((1 << bits) < n) bits++;
    for (int i = 0; i < n; i++) {
      int r = 0;
      for (int b = 0; b < bits; b++)
        if (i & (1 << b)) r |= 1 << (bits - 1 - b);
      rev_[static_cast<size_t>(i)] = r;
    }
  }

  int size() const { return n_; }

  void forward(std::vector<std::complex<double>> &data) const { run(data, false); }
  void inverse(std::vector<std::complex<double>> &data) const {
    run(data, true);
    for (auto &v : data) v /= static_cast<double>(n_);
  }

 private:
  void run(std::vector<std::complex<double>> &data, bool inv) const {
    EMOVC_CHECK(static_cast<int>(data.size()) == n_, "Fft: wrong buffer size");
    for (int i = 0; i < n_; i++) {
      int r = rev_[static_cast<size_t>(i)];
      if (i < r) std::swap(data[static_cast<size_t>(i)], data[static_cast<size_t>(r)]);
    }
    for (int len = 2; len <= n_; len <<= 1) {
      int half = len / 2, step = n_ / len;
      for (int i = 0; i < n_; i += len) {
        for (int j = 0; j < half; j++) {
          std::complex<double> w = twiddle_[static_cast<size_t>(j * step)];
          if (inv) w = std::conj(w);
          auto u = data[static_cast<size_t>(i + j)];
          auto v = data[static_cast<size_t>(i + j + half)] * w;
          data[static_cast<size_t>(i + j)] = u + v;
          data[static_cast<size_t>(i + j + half)] = u - v;
        }
      }
    }
  }

  int n_;
  std::vector<std::complex<double>> twiddle_;
  std::vector<int> rev_;
};

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// STFT-based log-mel extraction plus Griffin-Lim style inversion through the
// pseudo-inverse filterbank.  Frames are centered at t*hop with reflect
// padding, so an input shifted by exactly one hop shifts interior frames by
// one (bit-equal values).
class MelExtractor {
 public:
  explicit MelExtractor(MelConfig cfg) : cfg_(cfg), fft_(cfg.n_fft) {
    EMOVC_CHECK(cfg.win_length > 0 && cfg.win_length <= cfg.n_fft,
                "MelExtractor: win_length must be in (0, n_fft]");
    EMOVC_CHECK(cfg.hop_length > 0, "MelExtractor: hop must be positive");
    EMOVC_CHECK(cfg.n_mels >= 2, "MelExtractor: need at least 2 mel bands");
    EMOVC_CHECK(cfg.fmax <= cfg.sample_rate / 2.0 + 1e-9,
                "MelExtractor: fmax above Nyquist");
    window_.resize(static_cast<size_t>(cfg.win_length));
    for (int i = 0; i < cfg.win_length; i++)
      window_[static_cast<size_t>(i)] =
          0.5 - 0.5 * std::cos(2.0 * M_PI * i / cfg.win_length);
    build_filterbank();
  }

  const MelConfig &config() const { return cfg_; }
  const std::vector<double> &center_freqs() const { return center_freqs_; }

  int num_frames(int64_t n_samples) const {
    return static_cast<int>(n_samples / cfg_.hop_length) + 1;
  }

  MelSpectrogram log_mel(const Waveform &w) const {
    EMOVC_CHECK(w.sample_rate == cfg_.sample_rate,
                "log_mel: waveform rate " << w.sample_rate << " != config rate "
                                          << cfg_.sample_rate);
    if (static_cast<int>(w.samples.size()) < cfg_.win_length)
      throw DataError("log_mel: waveform shorter than one analysis window");
    int n_bins = cfg_.n_fft / 2 + 1;
    int frames = num_frames(static_cast<int64_t>(w.samples.size()));
    std::vector<double> power(static_cast<size_t>(n_bins));
    MelSpectrogram mel;
    mel.values = Tensor<double>({cfg_.n_mels, frames});
    mel.center_freqs = center_freqs_;
    mel.hop_seconds = static_cast<double>(cfg_.hop_length) / cfg_.sample_rate;
    std::vector<std::complex<double>> buf(static_cast<size_t>(cfg_.n_fft));
    for (int t = 0; t < frames; t++) {
      frame_power(w, t, buf, power);
      for (int m = 0; m < cfg_.n_mels; m++) {
        double e = 0.0;
        const auto &fb = filters_[static_cast<size_t>(m)];
        for (int k = fb.first_bin; k < fb.first_bin + static_cast<int>(fb.weights.size()); k++)
          e += fb.weights[static_cast<size_t>(k - fb.first_bin)] * power[static_cast<size_t>(k)];
        mel.values.at(m, t) = std::log(std::max(e, cfg_.floor));
      }
    }
    return mel;
  }

  // Iterative phase reconstruction from a log-mel matrix.  The neural
  // vocoder of the original system is deliberately out of scope, so this is
  // the waveform route for listening and waveform-domain metrics.
  Waveform invert(const MelSpectrogram &mel, int iterations = 60,
                  uint64_t phase_seed = 0) const {
    int n_bins = cfg_.n_fft / 2 + 1;
    int frames = mel.values.dim(1);
    EMOVC_CHECK(mel.values.dim(0) == cfg_.n_mels, "invert: mel band mismatch");
    ensure_pinv();

    // linear power per bin via the pseudo-inverse filterbank, clamped at 0
    std::vector<std::vector<double>> mag(static_cast<size_t>(frames),
                                         std::vector<double>(static_cast<size_t>(n_bins)));
    for (int t = 0; t < frames; t++) {
      for (int k = 0; k < n_bins; k++) {
        double p = 0.0;
        for (int m = 0; m < cfg_.n_mels; m++)
          p += pinv_[static_cast<size_t>(k) * cfg_.n_mels + m] *
               std::exp(mel.values.at(m, t));
        mag[static_cast<size_t>(t)][static_cast<size_t>(k)] = std::sqrt(std::max(p, 0.0));
      }
    }

    int64_t n_samples = static_cast<int64_t>(frames - 1) * cfg_.hop_length;
    if (n_samples < cfg_.win_length) n_samples = cfg_.win_length;
    Rng rng(phase_seed ^ 0x474c494dull);
    std::vector<std::vector<double>> phase(static_cast<size_t>(frames),
                                           std::vector<double>(static_cast<size_t>(n_bins)));
    for (auto &row : phase)
      for (auto &p : row) p = rng.uniform(-M_PI, M_PI);

    Waveform x;
    x.sample_rate = cfg_.sample_rate;
    for (int it = 0; it < iterations; it++) {
      x.samples = istft(mag, phase, n_samples);
      if (it + 1 == iterations) break;
      update_phase(x, frames, phase);
    }
    double peak = 0.0;
    for (double s : x.samples) peak = std::max(peak, std::abs(s));
    if (peak > 1.0)
      for (double &s : x.samples) s /= peak;
    return x;
  }

 private:
  struct BandFilter {
    int first_bin = 0;
    std::vector<double> weights;
  };

  void build_filterbank() {
    int n_bins = cfg_.n_fft / 2 + 1;
    double mel_lo = hz_to_mel(cfg_.fmin), mel_hi = hz_to_mel(cfg_.fmax);
    std::vector<double> edges(static_cast<size_t>(cfg_.n_mels) + 2);
    for (int i = 0; i < cfg_.n_mels + 2; i++)
      edges[static_cast<size_t>(i)] =
          mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg_.n_mels + 1));
    center_freqs_.assign(edges.begin() + 1, edges.end() - 1);
    filters_.resize(static_cast<size_t>(cfg_.n_mels));
    double bin_hz = static_cast<double>(cfg_.sample_rate) / cfg_.n_fft;
    for (int m = 0; m < cfg_.n_mels; m++) {
      double lo = edges[static_cast<size_t>(m)], mid = edges[static_cast<size_t>(m) + 1],
             hi = edges[static_cast<size_t>(m) + 2];
      BandFilter bf;
      bf.first_bin = -1;
      for (int k = 0; k < n_bins; k++) {
        double f = k * bin_hz;
        double wgt = 0.0;
        if (f > lo && f < hi)
          wgt = f <= mid ? (f - lo) / std::max(mid - lo, 1e-12)
                         : (hi - f) / std::max(hi - mid, 1e-12);
        if (wgt > 0.0) {
          if (bf.first_bin < 0) bf.first_bin = k;
          bf.weights.push_back(wgt);
        } else if (bf.first_bin >= 0) {
          break;
        }
      }
      if (bf.first_bin < 0) bf.first_bin = 0;
      filters_[static_cast<size_t>(m)] = std::move(bf);
    }
  }

  // Reflect-padded sample fetch.
  double sample_at(const Waveform &w, int64_t idx) const {
    int64_t n = static_cast<int64_t>(w.samples.size());
    if (idx < 0) idx = -idx;
    if (idx >= n) idx = 2 * (n - 1) - idx;
    if (idx < 0) idx = 0;  // degenerate, very short inputs
    return w.samples[static_cast<size_t>(idx)];
  }

  void frame_power(const Waveform &w, int t, std::vector<std::complex<double>> &buf,
                   std::vector<double> &power) const {
    int64_t center = static_cast<int64_t>(t) * cfg_.hop_length;
    int64_t start = center - cfg_.win_length / 2;
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < cfg_.win_length; i++)
      buf[static_cast<size_t>(i)] =
          sample_at(w, start + i) * window_[static_cast<size_t>(i)];
    fft_.forward(buf);
    int n_bins = cfg_.n_fft / 2 + 1;
    for (int k = 0; k < n_bins; k++) power[static_cast<size_t>(k)] = std::norm(buf[static_cast<size_t>(k)]);
  }

  void ensure_pinv() const {
    if (!pinv_.empty()) return;
    // P = F^T (F F^T + eps I)^(-1), F = dense filterbank [n_mels, n_bins]
    int n_bins = cfg_.n_fft / 2 + 1;
    int M = cfg_.n_mels;
    std::vector<double> F(static_cast<size_t>(M) * n_bins, 0.0);
    for (int m = 0; m < M; m++) {
      const auto &bf = filters_[static_cast<size_t>(m)];
      for (size_t i = 0; i < bf.weights.size(); i++)
        F[static_cast<size_t>(m) * n_bins + bf.first_bin + static_cast<int>(i)] = bf.weights[i];
    }
    std::vector<double> G(static_cast<size_t>(M) * M, 0.0);
    for (int a = 0; a < M; a++)
      for (int b = a; b < M; b++) {
        double acc = 0.0;
        for (int k = 0; k < n_bins; k++)
          acc += F[static_cast<size_t>(a) * n_bins + k] * F[static_cast<size_t>(b) * n_bins + k];
        G[static_cast<size_t>(a) * M + b] = acc;
        G[static_cast<size_t>(b) * M + a] = acc;
      }
    for (int a = 0; a < M; a++) G[static_cast<size_t>(a) * M + a] += 1e-8;
    // Cholesky G = L L^T
    std::vector<double> L(static_cast<size_t>(M) * M, 0.0);
    for (int i = 0; i < M; i++) {
      for (int j = 0; j <= i; j++) {
        double acc = G[static_cast<size_t>(i) * M + j];
        for (int k = 0; k < j; k++)
          acc -= L[static_cast<size_t>(i) * M + k] * L[static_cast<size_t>(j) * M + k];
        if (i == j)
          L[static_cast<size_t>(i) * M + j] = std::sqrt(std::max(acc, 1e-12));
        else
          L[static_cast<size_t>(i) * M + j] = acc / L[static_cast<size_t>(j) * M + j];
      }
    }
    // Solve G X = F for X [M, n_bins]; pinv = X^T stored [n_bins, M]
    pinv_.assign(static_cast<size_t>(n_bins) * M, 0.0);
    std::vector<double> y(static_cast<size_t>(M)), x(static_cast<size_t>(M));
    for (int k = 0; k < n_bins; k++) {
      for (int i = 0; i < M; i++) {
        double acc = F[static_cast<size_t>(i) * n_bins + k];
        for (int j = 0; j < i; j++) acc -= L[static_cast<size_t>(i) * M + j] * y[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc / L[static_cast<size_t>(i) * M + i];
      }
      for (int i = M - 1; i >= 0; i--) {
        double acc = y[static_cast<size_t>(i)];
        for (int j = i + 1; j < M; j++) acc -= L[static_cast<size_t>(j) * M + i] * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] = acc / L[static_cast<size_t>(i) * M + i];
      }
      for (int m = 0; m < M; m++) pinv_[static_cast<size_t>(k) * M + m] = x[static_cast<size_t>(m)];
    }
  }

  std::vector<double> istft(const std::vector<std::vector<double>> &mag,
                            const std::vector<std::vector<double>> &phase,
                            int64_t n_samples) const {
    int frames = static_cast<int>(mag.size());
    int n_bins = cfg_.n_fft / 2 + 1;
    std::vector<double> out(static_cast<size_t>(n_samples), 0.0);
    std::vector<double> norm(static_cast<size_t>(n_samples), 0.0);
    std::vector<std::complex<double>> buf(static_cast<size_t>(cfg_.n_fft));
    for (int t = 0; t < frames; t++) {
      for (int k = 0; k < n_bins; k++) {
        auto v = std::polar(mag[static_cast<size_t>(t)][static_cast<size_t>(k)],
                            phase[static_cast<size_t>(t)][static_cast<size_t>(k)]);
        buf[static_cast<size_t>(k)] = v;
        if (k > 0 && k < cfg_.n_fft / 2) buf[static_cast<size_t>(cfg_.n_fft - k)] = std::conj(v);
      }
      fft_.inverse(buf);
      int64_t start = static_cast<int64_t>(t) * cfg_.hop_length - cfg_.win_length / 2;
      for (int i = 0; i < cfg_.win_length; i++) {
        int64_t idx = start + i;
        if (idx < 0 || idx >= n_samples) continue;
        double wv = window_[static_cast<size_t>(i)];
        out[static_cast<size_t>(idx)] += buf[static_cast<size_t>(i)].real() * wv;
        norm[static_cast<size_t>(idx)] += wv * wv;
      }
    }
    for (int64_t i = 0; i < n_samples; i++)
      if (norm[static_cast<size_t>(i)] > 1e-9) out[static_cast<size_t>(i)] /= norm[static_cast<size_t>(i)];
    return out;
  }

  void update_phase(const Waveform &x, int frames,
                    std::vector<std::vector<double>> &phase) const {
    std::vector<std::complex<double>> buf(static_cast<size_t>(cfg_.n_fft));
    int n_bins = cfg_.n_fft / 2 + 1;
    for (int t = 0; t < frames; t++) {
      int64_t start = static_cast<int64_t>(t) * cfg_.hop_length - cfg_.win_length / 2;
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      for (int i = 0; i < cfg_.win_length; i++) {
        int64_t idx = start + i;
        double s = (idx >= 0 && idx < static_cast<int64_t>(x.samples.size()))
                       ? x.samples[static_cast<size_t>(idx)]
                       : 0.0;
        buf[static_cast<size_t>(i)] = s * window_[static_cast<size_t>(i)];
      }
      fft_.forward(buf);
      for (int k = 0; k < n_bins; k++)
        phase[static_cast<size_t>(t)][static_cast<size_t>(k)] = std::arg(buf[static_cast<size_t>(k)]);
    }
  }

  MelConfig cfg_;
  Fft fft_;
  std::vector<double> window_;
  std::vector<BandFilter> filters_;
  std::vector<double> center_freqs_;
  mutable std::vector<double> pinv_;  // [n_bins, n_mels], built on first invert
};

}  // namespace emovc

#endif  // EMOVC_AUDIO_MEL_HPP
