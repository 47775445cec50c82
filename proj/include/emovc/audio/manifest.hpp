// emovc/audio/manifest.hpp

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

#ifndef EMOVC_AUDIO_MANIFEST_HPP
#define EMOVC_AUDIO_MANIFEST_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "emovc/audio/toy.hpp"
#include "emovc/core/common.hpp"

namespace emovc {

enum class Split { train = 0, val = 1, test = 2 };

inline const char *split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

struct ManifestEntry {
  std::string audio_path;   // resolved (absolute or manifest-relative)
  std::string raw_path;     // as written in the file
  int speaker_code = 0;     // contiguous 0..K-1
  int64_t speaker_id = 0;   // original id from the file
  int emotion = -1;         // -1 = unlabeled
  Split split = Split::train;
};

// Dataset manifest: one record per line,
//   audio_path <TAB> speaker_id <TAB> emotion|- <TAB> split
// Speaker ids are remapped to a contiguous code space; the id map is kept on
// the record so it can be persisted next to checkpoints.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::map<int64_t, int> speaker_code_of;  // original -> contiguous
  int num_speakers = 0;

  int count(Split s) const {
    int n = 0;
    for (const auto &e : entries) n += e.split == s ? 1 : 0;
    return n;
  }
  int unlabeled_count() const {
    int n = 0;
    for (const auto &e : entries) n += e.emotion < 0 ? 1 : 0;
    return n;
  }
};

namespace manifest_detail {

inline std::vector<std::string> split_fields(const std::string &line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace manifest_detail

inline DatasetManifest load_manifest(const std::string &path, bool check_audio_exists = true) {
  std::ifstream is(path);
  if (!is) throw DataError("load_manifest: cannot open " + path);
  namespace fs = std::filesystem;
  fs::path base = fs::path(path).parent_path();

  DatasetManifest m;
  std::set<std::string> seen_paths;
  std::set<int64_t> speaker_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (line.empty() || line[0] == '#') continue;
    auto fields = manifest_detail::split_fields(line, '\t');
    if (fields.size() != 4)
      throw DataError("load_manifest: line " + std::to_string(line_no) +
                      ": expected 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    ManifestEntry e;
    e.raw_path = fields[0];
    if (e.raw_path.empty())
      throw DataError("load_manifest: line " + std::to_string(line_no) +
                      ": missing audio path");
    fs::path ap(e.raw_path);
    e.audio_path = ap.is_absolute() ? ap.string() : (base / ap).string();
    if (!seen_paths.insert(e.raw_path).second)
      throw DataError("load_manifest: line " + std::to_string(line_no) +
                      ": duplicate entry " + e.raw_path);
    if (check_audio_exists && !fs::exists(e.audio_path))
      throw DataError("load_manifest: line " + std::to_string(line_no) +
                      ": missing audio path " + e.audio_path);
    try {
      e.speaker_id = std::stoll(fields[1]);
    } catch (const std::exception &) {
      throw DataError("load_manifest: line " + std::to_string(line_no) +
                      ": bad speaker id '" + fields[1] + "'");
    }
    if (fields[2].empty() || fields[2] == "-") {
      e.emotion = -1;
    } else {
      e.emotion = parse_emotion(fields[2]);
      if (e.emotion < 0)
        throw DataError("load_manifest: line " + std::to_string(line_no) +
                        ": unknown emotion '" + fields[2] + "'");
    }
    if (fields[3] == "train") e.split = Split::train;
    else if (fields[3] == "val") e.split = Split::val;
    else if (fields[3] == "test") e.split = Split::test;
    else
      throw DataError("load_manifest: line " + std::to_string(line_no) +
                      ": unknown split '" + fields[3] + "'");
    speaker_ids.insert(e.speaker_id);
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw DataError("load_manifest: no entries in " + path);

  int code = 0;
  for (int64_t id : speaker_ids) m.speaker_code_of[id] = code++;
  m.num_speakers = code;
  for (auto &e : m.entries) e.speaker_code = m.speaker_code_of.at(e.speaker_id);
  return m;
}

// Persisted id map, one "original<TAB>code" pair per line.
inline void save_speaker_map(const DatasetManifest &m, const std::string &path) {
  std::ofstream os(path);
  EMOVC_CHECK(os.good(), "save_speaker_map: cannot write " << path);
  for (const auto &[id, code] : m.speaker_code_of) os << id << "\t" << code << "\n";
}

}  // namespace emovc

#endif  // EMOVC_AUDIO_MANIFEST_HPP
