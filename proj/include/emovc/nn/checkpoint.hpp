// emovc/nn/checkpoint.hpp

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

// Versioned binary blob container used for every parameter checkpoint.
// Each blob carries its own FNV checksum; loads verify checksum, shape, and
// scalar width, and refuse mismatched config hashes unless told otherwise.

#ifndef EMOVC_NN_CHECKPOINT_HPP
#define EMOVC_NN_CHECKPOINT_HPP

#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "emovc/core/tensor.hpp"
#include "emovc/nn/networks.hpp"

namespace emovc {

inline constexpr char kCheckpointMagic[8] = {'E', 'M', 'V', 'C', 'C', 'K', 'P', '1'};

namespace ckpt_detail {

inline void write_u64(std::ostream &os, uint64_t v) {
  os.write(reinterpret_cast<const char *>(&v), 8);
}
inline void write_u32(std::ostream &os, uint32_t v) {
  os.write(reinterpret_cast<const char *>(&v), 4);
}
inline uint64_t read_u64(std::istream &is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char *>(&v), 8);
  return v;
}
inline uint32_t read_u32(std::istream &is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char *>(&v), 4);
  return v;
}

}  // namespace ckpt_detail

template <typename Real>
struct NamedTensor {
  std::string name;
  const Tensor<Real> *tensor;
};

template <typename Real>
inline void save_blobs(const std::string &path, const std::vector<NamedTensor<Real>> &blobs,
                       uint64_t config_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("save_blobs: cannot open " + path);
  os.write(kCheckpointMagic, 8);
  ckpt_detail::write_u64(os, config_hash);
  ckpt_detail::write_u64(os, blobs.size());
  for (const auto &b : blobs) {
    ckpt_detail::write_u32(os, static_cast<uint32_t>(b.name.size()));
    os.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    os.put(static_cast<char>(sizeof(Real)));
    const auto &shape = b.tensor->shape();
    ckpt_detail::write_u32(os, static_cast<uint32_t>(shape.size()));
    for (int d : shape) ckpt_detail::write_u32(os, static_cast<uint32_t>(d));
    size_t bytes = static_cast<size_t>(b.tensor->size()) * sizeof(Real);
    os.write(reinterpret_cast<const char *>(b.tensor->data()),
             static_cast<std::streamsize>(bytes));
    ckpt_detail::write_u64(os, fnv1a64(b.tensor->data(), bytes));
  }
  if (!os) throw DataError("save_blobs: write failed: " + path);
}

template <typename Real>
struct LoadedBlobs {
  uint64_t config_hash = 0;
  std::map<std::string, Tensor<Real>> tensors;
};

template <typename Real>
inline LoadedBlobs<Real> load_blobs(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("load_blobs: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw DataError("load_blobs: bad magic (wrong or corrupted file): " + path);
  LoadedBlobs<Real> out;
  out.config_hash = ckpt_detail::read_u64(is);
  uint64_t n = ckpt_detail::read_u64(is);
  for (uint64_t i = 0; i < n; i++) {
    uint32_t name_len = ckpt_detail::read_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    int scalar = is.get();
    if (scalar != static_cast<int>(sizeof(Real)))
      throw DataError("load_blobs: scalar width mismatch in " + path + " for blob " + name);
    uint32_t rank = ckpt_detail::read_u32(is);
    std::vector<int> shape(rank);
    for (auto &d : shape) d = static_cast<int>(ckpt_detail::read_u32(is));
    Tensor<Real> t(shape);
    size_t bytes = static_cast<size_t>(t.size()) * sizeof(Real);
    is.read(reinterpret_cast<char *>(t.data()), static_cast<std::streamsize>(bytes));
    uint64_t expect = ckpt_detail::read_u64(is);
    if (!is) throw DataError("load_blobs: truncated file: " + path);
    uint64_t got = fnv1a64(t.data(), bytes);
    if (got != expect)
      throw DataError("load_blobs: checksum mismatch for blob " + name + " in " + path);
    out.tensors.emplace(std::move(name), std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Component-level helpers
// ---------------------------------------------------------------------------

template <typename Real>
inline void collect_store(const std::string &prefix, ParamStore<Real> &store,
                          std::vector<NamedTensor<Real>> *out) {
  for (auto &p : store.params()) out->push_back({prefix + "/" + p.name, &p.var.value()});
}

template <typename Real>
inline void restore_store(const std::string &prefix, ParamStore<Real> &store,
                          const LoadedBlobs<Real> &blobs) {
  for (auto &p : store.params()) {
    auto it = blobs.tensors.find(prefix + "/" + p.name);
    if (it == blobs.tensors.end())
      throw DataError("checkpoint: missing parameter " + prefix + "/" + p.name);
    EMOVC_CHECK(it->second.shape() == p.var.value().shape(),
                "checkpoint: shape mismatch for " << prefix << "/" << p.name);
    p.var.mutable_value() = it->second;
  }
}

template <typename Real>
inline void save_bundle(const std::string &path, ModelBundle<Real> &bundle) {
  std::vector<NamedTensor<Real>> blobs;
  for (auto &[name, ps] : bundle.components()) collect_store(name, *ps, &blobs);
  save_blobs(path, blobs, bundle.config_hash);
}

template <typename Real>
inline void load_bundle(const std::string &path, ModelBundle<Real> &bundle,
                        bool require_hash_match = true) {
  auto blobs = load_blobs<Real>(path);
  if (require_hash_match && bundle.config_hash != 0 &&
      blobs.config_hash != bundle.config_hash)
    throw ConfigError("checkpoint: config hash mismatch (checkpoint " +
                      std::to_string(blobs.config_hash) + " vs run " +
                      std::to_string(bundle.config_hash) + ")");
  for (auto &[name, ps] : bundle.components()) restore_store(name, *ps, blobs);
}

// Single-component save/load (pretrained F0 / linguistic nets, extractor).
template <typename Real>
inline void save_component(const std::string &path, const std::string &name,
                           ParamStore<Real> &store, uint64_t config_hash) {
  std::vector<NamedTensor<Real>> blobs;
  collect_store(name, store, &blobs);
  save_blobs(path, blobs, config_hash);
}

template <typename Real>
inline void load_component(const std::string &path, const std::string &name,
                           ParamStore<Real> &store) {
  auto blobs = load_blobs<Real>(path);
  restore_store(name, store, blobs);
}

// Small ordered key=value text file (run state, speaker maps).
inline void save_kv(const std::string &path, const std::vector<std::pair<std::string, std::string>> &kv) {
  std::ofstream os(path);
  EMOVC_CHECK(os.good(), "save_kv: cannot write " << path);
  for (const auto &[k, v] : kv) os << k << "=" << v << "\n";
}

inline std::map<std::string, std::string> load_kv(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("load_kv: cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto pos = line.find('=');
    if (pos == std::string::npos) continue;
    out[line.substr(0, pos)] = line.substr(pos + 1);
  }
  return out;
}

}  // namespace emovc

#endif  // EMOVC_NN_CHECKPOINT_HPP
