// emovc/train/config.hpp

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

// Layered key=value configuration: built-in defaults <- config file <- flag
// overrides.  Unknown keys are rejected, the effective configuration is
// snapshotted into every run directory, and two hashes derive from it: the
// full run hash (resume must match exactly) and the architecture hash
// (conversion/evaluation only needs this one).

#ifndef EMOVC_TRAIN_CONFIG_HPP
#define EMOVC_TRAIN_CONFIG_HPP

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "emovc/audio/mel.hpp"
#include "emovc/losses/losses.hpp"
#include "emovc/nn/networks.hpp"

namespace emovc {

class Config {
 public:
  Config() { defaults(); }

  // One "key = value" per line; '#' comments.
  void load_file(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      line_no++;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: " + path + ":" + std::to_string(line_no) +
                          ": expected key = value");
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void set(const std::string &key, const std::string &value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second = value;
  }

  const std::string &get(const std::string &key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: unknown key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string &key) const {
    try {
      return std::stod(get(key));
    } catch (const std::exception &) {
      throw ConfigError("config: key '" + key + "' is not a number: " + get(key));
    }
  }

  int64_t get_int(const std::string &key) const {
    try {
      return std::stoll(get(key));
    } catch (const std::exception &) {
      throw ConfigError("config: key '" + key + "' is not an integer: " + get(key));
    }
  }

  // Canonical sorted snapshot; what gets written next to every run.
  std::string snapshot() const {
    std::string out;
    for (const auto &[k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  void write_snapshot(const std::string &path) const {
    std::ofstream os(path);
    EMOVC_CHECK(os.good(), "config: cannot write snapshot " << path);
    os << snapshot();
  }

  // Full-run hash: everything except filesystem paths.
  uint64_t run_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto &[k, v] : values_) {
      if (k.rfind("path.", 0) == 0) continue;
      h = fnv1a64(k + "=" + v + ";", h);
    }
    return h;
  }

  // Architecture-only hash: mel front end + network widths + domain layout.
  uint64_t arch_hash() const {
    uint64_t h = 0x1000193ull;
    for (const auto &[k, v] : values_) {
      if (k.rfind("mel.", 0) == 0 || k.rfind("net.", 0) == 0 || k == "data.num_speakers")
        h = fnv1a64(k + "=" + v + ";", h);
    }
    return h;
  }

  const std::map<std::string, std::string> &values() const { return values_; }

  // ------------------------------------------------------------------
  // Typed views
  // ------------------------------------------------------------------

  MelConfig mel() const {
    MelConfig m;
    m.sample_rate = static_cast<int>(get_int("mel.sample_rate"));
    m.n_fft = static_cast<int>(get_int("mel.n_fft"));
    m.win_length = static_cast<int>(get_int("mel.win_length"));
    m.hop_length = static_cast<int>(get_int("mel.hop_length"));
    m.n_mels = static_cast<int>(get_int("mel.n_mels"));
    m.fmin = get_double("mel.fmin");
    m.fmax = get_double("mel.fmax");
    m.floor = get_double("mel.floor");
    return m;
  }

  template <typename Real>
  NetConfig<Real> net() const {
    NetConfig<Real> n;
    n.n_mels = static_cast<int>(get_int("mel.n_mels"));
    n.style_dim = static_cast<int>(get_int("net.style_dim"));
    n.latent_dim = static_cast<int>(get_int("net.latent_dim"));
    n.gen_base = static_cast<int>(get_int("net.gen_base"));
    n.trunk_channels = static_cast<int>(get_int("net.trunk_channels"));
    n.hidden = static_cast<int>(get_int("net.hidden"));
    n.f0_channels = static_cast<int>(get_int("net.f0_channels"));
    n.ling_symbols = static_cast<int>(get_int("net.ling_symbols"));
    n.mel_mean = static_cast<Real>(get_double("net.mel_norm_mean"));
    n.mel_std = static_cast<Real>(get_double("net.mel_norm_std"));
    return n;
  }

  LossWeights loss_weights() const {
    LossWeights w;
    w.af = get_double("loss.lambda_af");
    w.embed = get_double("loss.lambda_embed");
    w.emog = get_double("loss.lambda_emog");
    w.emod = get_double("loss.lambda_emod");
    w.aspk = get_double("loss.lambda_aspk");
    w.spk = get_double("loss.lambda_spk");
    w.sty = get_double("loss.lambda_sty");
    w.ds = get_double("loss.lambda_ds");
    w.f0 = get_double("loss.lambda_f0");
    w.asr = get_double("loss.lambda_asr");
    w.cyc = get_double("loss.lambda_cyc");
    w.validate();
    return w;
  }

  std::vector<DescriptorKind> descriptor_kinds() const {
    std::vector<DescriptorKind> kinds;
    std::string csv = get("desc.kinds");
    size_t start = 0;
    while (start <= csv.size()) {
      size_t pos = csv.find(',', start);
      std::string name =
          pos == std::string::npos ? csv.substr(start) : csv.substr(start, pos - start);
      if (!name.empty()) {
        int k = parse_descriptor(name);
        if (k < 0) throw ConfigError("config: unknown descriptor kind '" + name + "'");
        kinds.push_back(static_cast<DescriptorKind>(k));
      }
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (kinds.empty()) throw ConfigError("config: desc.kinds must name at least one kind");
    return kinds;
  }

  // 2 s at the mel hop must land on a whole frame count.
  int segment_frames() const {
    double seconds = get_double("train.segment_seconds");
    double frames = seconds * get_double("mel.sample_rate") / get_double("mel.hop_length");
    int fi = static_cast<int>(std::lround(frames));
    if (std::abs(frames - fi) > 1e-9 || fi < 8)
      throw ConfigError("config: train.segment_seconds does not map to a whole frame count");
    return fi;
  }

 private:
  void defaults() {
    values_ = {
        {"mel.sample_rate", "24000"},
        {"mel.n_fft", "2048"},
        {"mel.win_length", "1200"},
        {"mel.hop_length", "300"},
        {"mel.n_mels", "80"},
        {"mel.fmin", "0"},
        {"mel.fmax", "12000"},
        {"mel.floor", "1e-5"},
        {"net.style_dim", "64"},
        {"net.latent_dim", "16"},
        {"net.gen_base", "32"},
        {"net.trunk_channels", "64"},
        {"net.hidden", "128"},
        {"net.f0_channels", "16"},
        {"net.ling_symbols", "12"},
        {"net.mel_norm_mean", "-7.0"},
        {"net.mel_norm_std", "3.0"},
        {"desc.window_frames", "8"},
        {"desc.voicing_conf", "0.5"},
        {"desc.kinds", "kurtosis"},
        {"loss.lambda_af", "2"},
        {"loss.lambda_embed", "2"},
        {"loss.lambda_emog", "0.01"},
        {"loss.lambda_emod", "0.01"},
        {"loss.lambda_aspk", "0.1"},
        {"loss.lambda_spk", "0.1"},
        {"loss.lambda_sty", "1"},
        {"loss.lambda_ds", "1"},
        {"loss.lambda_f0", "5"},
        {"loss.lambda_asr", "1"},
        {"loss.lambda_cyc", "1"},
        {"train.batch_size", "16"},
        {"train.segment_seconds", "2.0"},
        {"train.lr", "1e-4"},
        {"train.weight_decay", "1e-4"},
        {"train.beta1", "0.9"},
        {"train.beta2", "0.999"},
        {"train.adam_eps", "1e-8"},
        {"train.epochs", "100"},
        {"train.max_steps", "0"},  // 0 = derive from epochs
        {"train.seed", "1"},
        {"train.checkpoint_every", "500"},
        {"train.d_steps_per_g", "1"},
        {"train.grad_clip", "0"},
        {"pretrain.lr", "1e-3"},
        {"pretrain.f0_steps", "800"},
        {"pretrain.ling_steps", "600"},
        {"stage1.steps", "1500"},
        {"stage2.steps", "400"},
        {"stage2.lr", "1e-3"},
        {"stage2.val_every", "25"},
        {"stage2.select", "val_ce"},
        {"eval.pcc_min_frames", "10"},
        {"toy.clips_per_pair", "5"},
        {"toy.seed", "1"},
        {"toy.unlabeled_fraction", "0"},
        {"data.num_speakers", "0"},  // filled from the manifest at run start
        {"path.data", ""},
        {"path.f0_checkpoint", ""},
        {"path.ling_checkpoint", ""},
        {"path.extractor_checkpoint", ""},
    };
  }

  std::map<std::string, std::string> values_;
};

}  // namespace emovc

#endif  // EMOVC_TRAIN_CONFIG_HPP
