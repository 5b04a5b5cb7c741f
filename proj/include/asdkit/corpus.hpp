// Copyright (c) 2026 The asdkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASDKIT_CORPUS_HPP_
#define ASDKIT_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace asdkit {

inline constexpr int kSampleRate = 16000;

enum class Domain { kSource, kTarget };
enum class Split { kTrain, kTest };
enum class Condition { kNormal, kAnomaly, kUnknown };

std::string_view ToString(Domain d);
std::string_view ToString(Split s);
std::string_view ToString(Condition c);
std::optional<Domain> ParseDomain(std::string_view token);
std::optional<Split> ParseSplit(std::string_view token);
std::optional<Condition> ParseCondition(std::string_view token);

/// Metadata of one clip. `clip_id` is `<machine>/<file stem>`.
struct ClipInfo {
  std::string clip_id;
  std::string machine;
  std::string section;  // two-digit section number, e.g. "00"
  Domain domain = Domain::kSource;
  Split split = Split::kTrain;
  Condition condition = Condition::kNormal;
  std::string index;  // zero-padded clip index as it appears in the name
  std::optional<std::string> attribute;
  std::filesystem::path path;  // empty for in-memory clips

  bool operator==(const ClipInfo&) const = default;
};

struct AudioClip {
  ClipInfo info;
  std::vector<float> samples;  // mono, kSampleRate
};

/// Parses `.../<machine>/[train|test/]section_<NN>_<domain>_<split>_<condition>_<idx>[_<attr...>].wav`.
/// Throws Error(kMalformedName).
ClipInfo ParseFilename(const std::filesystem::path& path);

/// Inverse of ParseFilename for the file name only (no directory).
std::string FormatFilename(const ClipInfo& info);

struct CorpusManifest {
  std::vector<ClipInfo> clips;  // sorted by clip_id
  std::vector<std::string> machines;

  using CountKey = std::tuple<std::string, Domain, Split>;
  std::map<CountKey, int> Counts() const;

  const ClipInfo& Find(std::string_view clip_id) const;

  /// Sorts clips, fills `machines`, checks clip_id uniqueness and train=>normal.
  void Finalize();
};

/// CSV with header clip_id,machine,section,domain,split,condition,attribute.
void WriteManifestCsv(const CorpusManifest& manifest,
                      const std::filesystem::path& path);

/// Scans `root` for WAV files grouped in machine directories. Every file is
/// header-validated; all failures are collected into a single IoError.
CorpusManifest LoadCorpus(const std::filesystem::path& root);

// --- WAV ---------------------------------------------------------------

/// Reads a mono 16 kHz WAV (16-bit PCM or 32-bit float).
std::vector<float> ReadWav(const std::filesystem::path& path);

/// Writes 32-bit float mono WAV at kSampleRate.
void WriteWav(const std::filesystem::path& path,
              const std::vector<float>& samples);

// --- Synthetic corpus ---------------------------------------------------

enum class AnomalyKind { kPitchShift, kTransientBurst };

struct SyntheticSpec {
  int machines = 2;
  int attributes_per_machine = 3;
  int clips_per_attribute = 40;
  double noise_level_db = -10.0;  // broadband noise power relative to tone
  AnomalyKind anomaly_kind = AnomalyKind::kPitchShift;
  std::uint64_t seed = 0;

  double duration_s = 1.0;
  int target_train_clips = 10;        // per machine
  int test_normals_per_domain = 20;   // per machine
  int test_anomalies_per_domain = 20; // per machine
  double pitch_shift_factor = 1.12;
  double attribute_ratio = 1.3;  // f0 ratio between neighbouring attributes

  void Validate() const;
};

struct SyntheticCorpus {
  CorpusManifest manifest;
  std::vector<AudioClip> clips;  // same order as manifest.clips

  const AudioClip& Clip(std::string_view clip_id) const;
};

/// Fundamental frequency of the planted template for (machine, attribute).
/// `attribute == spec.attributes_per_machine` denotes the target domain.
double SyntheticFundamental(const SyntheticSpec& spec, int machine,
                            int attribute);

SyntheticCorpus GenerateSynthetic(const SyntheticSpec& spec);

/// Writes every clip as `<root>/<machine>/<filename>.wav` plus manifest.csv.
void WriteSyntheticCorpus(const SyntheticCorpus& corpus,
                          const std::filesystem::path& root);

}  // namespace asdkit

#endif  // ASDKIT_CORPUS_HPP_
