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

#ifndef ASDKIT_PIPELINE_HPP_
#define ASDKIT_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asdkit/backend.hpp"
#include "asdkit/corpus.hpp"
#include "asdkit/embedder.hpp"
#include "asdkit/evalkit.hpp"
#include "asdkit/frontend.hpp"
#include "asdkit/pseudolabel.hpp"
#include "asdkit/trainer.hpp"

namespace asdkit {

enum class LabelMethod { kNone, kClass, kTriplet, kExternal, kGroundTruth };

std::string_view ToString(LabelMethod m);
LabelMethod ParseLabelMethod(std::string_view s);

struct ExperimentConfig {
  std::string corpus_root;  // empty: generate `synthetic` in memory
  SyntheticSpec synthetic;
  SpectralConfig spectral;
  ArchitectureConfig arch;
  TrainConfig train;
  TrainConfig space_train;  // class-space embedder (machine labels only)
  TripletConfig triplet;
  LabelMethod method = LabelMethod::kClass;
  std::string external_embeddings;  // CSV for method=external
  ClusteringConfig clustering;
  BackendConfig backend;
  AucGrouping grouping = AucGrouping::kChallenge;
  double pauc_p = 0.1;
  std::vector<std::uint64_t> trial_seeds{0};
  std::string output_dir = "runs/default";
  int workers = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ExperimentConfig FromJson(const nlohmann::json& j);
  static ExperimentConfig Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;
  /// Applies "a.b.c=value"; the value is parsed as JSON, falling back to a string.
  void Override(const std::string& assignment);
  /// Digest of every field that affects results (not output_dir or workers).
  std::string Hash() const;
};

struct LoadedCorpus {
  CorpusManifest manifest;
  std::map<std::string, std::vector<float>> audio;  // clip_id -> samples
  std::vector<ClipInfo> TrainClips() const;
  std::vector<ClipInfo> TestClips() const;
};

LoadedCorpus LoadExperimentCorpus(const ExperimentConfig& cfg);

ClipFeatures ExtractAllFeatures(const LoadedCorpus& corpus, const SpectralConfig& spectral, int workers);

ModelSpec ExperimentModelSpec(const ExperimentConfig& cfg, const LoadedCorpus& corpus);

/// Pseudo-labels for method class, triplet or external; nullopt otherwise.
std::optional<PseudoLabelTable> RunPseudoLabel(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                                               const ClipFeatures& features, std::uint64_t seed);

/// Class string per train clip: none -> machine/domain, ground_truth ->
/// machine/attribute, pseudo-label methods -> machine/domain/cluster.
std::map<std::string, std::string> TrainingLabels(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                                                  const std::optional<PseudoLabelTable>& table);

/// Scores every test clip with each checkpoint's backend and averages
/// the per-clip scores across checkpoints.
std::vector<ScoredRecord> ScoreTestSet(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                                       const ClipFeatures& features,
                                       const std::vector<std::pair<int, EmbeddingModel>>& checkpoints,
                                       std::uint64_t seed);

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::optional<PseudoLabelTable> labels;
  std::vector<ScoredRecord> scores;
  EvalReport report;
  TrainLog log;
};

/// One full trial. Artifacts go to `trial_dir` unless it is empty.
TrialOutcome RunTrial(const ExperimentConfig& cfg, const LoadedCorpus& corpus, const ClipFeatures& features,
                      std::uint64_t seed, const std::filesystem::path& trial_dir);

struct ExperimentOutcome {
  std::vector<TrialOutcome> trials;
  std::map<std::string, MeanStd> summary;
};

/// Pseudo-label, train, score and evaluate every trial seed; writes
/// config.json, per-trial artifacts, report.json and report.txt.
/// Refuses a non-empty output directory unless `force`.
ExperimentOutcome RunExperiment(const ExperimentConfig& cfg, bool force);

/// Fails unless `dir` is absent or empty, or `force` is set.
void PrepareOutputDir(const std::filesystem::path& dir, bool force);

/// One CSV per machine, "scores_<machine>.csv" in `dir`, with a
/// "# config_hash=..." line and columns clip_id,domain,condition,score.
/// The condition is blank for unlabeled clips. Returns the written paths.
std::vector<std::filesystem::path> WriteScoreFiles(const std::filesystem::path& dir,
                                                   const std::vector<ScoredRecord>& records,
                                                   const std::string& config_hash);
struct ScoreFile {
  std::string config_hash;
  std::vector<ScoredRecord> records;
};
ScoreFile ReadScoreFile(const std::filesystem::path& path);

/// Evaluates score files; throws KeyMismatch if their config hashes differ.
EvalReport EvaluateScoreFiles(const std::vector<std::filesystem::path>& paths, AucGrouping grouping,
                              double p, std::string* config_hash = nullptr);

/// Reduced coordinates of every labeled clip: clip_id,machine,domain,x,y,
/// cluster_id,attribute. Input to the viz command.
void WritePseudoCoordsCsv(const std::filesystem::path& path, const PseudoLabelTable& table,
                          const LoadedCorpus& corpus, const std::string& hash);

/// Reads "key=value" metadata comments of an artifact CSV.
std::map<std::string, std::string> ArtifactMetadata(const std::filesystem::path& path);

}  // namespace asdkit

#endif  // ASDKIT_PIPELINE_HPP_
