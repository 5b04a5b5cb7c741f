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

#ifndef ASDKIT_PSEUDOLABEL_HPP_
#define ASDKIT_PSEUDOLABEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "asdkit/corpus.hpp"
#include "asdkit/embedder.hpp"
#include "asdkit/frontend.hpp"
#include "asdkit/gmm.hpp"
#include "asdkit/trainer.hpp"

namespace asdkit {

enum class SpaceKind { kClassTrained, kTriplet, kExternal };

std::string_view ToString(SpaceKind k);

struct FeatureSpaceSource {
  SpaceKind kind = SpaceKind::kExternal;
  std::map<std::string, Eigen::VectorXd> vectors;  // clip_id -> vector
  int dim = 0;

  /// Throws MissingClip / DimMismatch / InvalidArgument.
  void Validate(const std::vector<std::string>& required_ids) const;
  /// Rows in the order of `clip_ids`.
  Eigen::MatrixXd Rows(const std::vector<std::string>& clip_ids) const;
};

using ClipFeatures = std::map<std::string, FeatureSet>;

// --- Class space ---------------------------------------------------------

/// Trains the embedder with machine type as the only label and returns z_cat
/// for every clip in `train_clips`.
FeatureSpaceSource BuildSpaceClass(const std::vector<ClipInfo>& train_clips,
                                   const ClipFeatures& features, const ModelSpec& spec,
                                   const TrainConfig& cfg);

// --- Triplet space -------------------------------------------------------

struct TripletConfig {
  double margin = 1.0;
  double snr_low_db = -5.0, snr_high_db = 5.0;  // [low, high)
  double shrink_low = 0.5, shrink_high = 0.8;   // resize scales [0.5, 0.8)
  double grow_low = 1.2, grow_high = 1.5;       // and [1.2, 1.5)
  int dft_size = 1024;
  int epochs = 6;
  int batch_size = 32;
  double lr = 1e-3;
  int embedding_dim = 128;
  std::vector<ConvSpec> conv_stack{{16, 3, 2}, {32, 3, 2}, {32, 3, 2}};
  void Validate() const;
};

/// Amplitude spectrograms grouped by machine type.
struct SpectrogramPool {
  std::vector<std::string> machines;  // per item
  std::vector<Spectrogram> items;
  void Add(std::string machine, Spectrogram s);
};

/// x + g * n with g chosen so that 10 log10(P(x) / P(g n)) = snr_db, where
/// P is the mean squared amplitude. `n` is cropped or zero-padded to x's shape.
Spectrogram AddNoise(const Spectrogram& x, const Spectrogram& n, double snr_db);

/// Bilinear rescale of both axes by `scale`, then centre crop or zero-pad
/// back to the original shape.
Spectrogram Resize(const Spectrogram& x, double scale);

double MeanPower(const Spectrogram& x);

enum class NegativeKind { kResize, kNoiseResize, kOther, kNoiseOther };

std::string_view ToString(NegativeKind k);

struct TripletProvenance {
  std::size_t anchor_index = 0;
  bool anchor_noised = false;
  NegativeKind negative_kind = NegativeKind::kResize;
  std::size_t other_index = 0;             // X_j for kOther / kNoiseOther
  double anchor_snr_db = 0.0;              // when anchor_noised
  double positive_snr_db = 0.0;
  double negative_snr_db = 0.0;            // when the negative is noised
  double resize_scale = 1.0;               // when the negative is resized
  std::vector<std::size_t> interferers;    // pool indices used by Noise(), in draw order
};

struct Triplet {
  Spectrogram anchor, positive, negative;
  TripletProvenance provenance;
};

/// Throws PoolTooSmall unless there are two machine types and every machine
/// type has at least two clips.
void CheckTripletPool(const SpectrogramPool& pool);

/// Triplet for anchor clip `i`.
Triplet SampleTriplet(const SpectrogramPool& pool, std::size_t i, const TripletConfig& cfg, Rng& rng);
/// Triplet for a uniformly drawn anchor clip.
Triplet SampleTriplet(const SpectrogramPool& pool, const TripletConfig& cfg, Rng& rng);

/// Hinge loss max(0, |a - p| - |a - n| + margin).
double TripletHinge(double d_ap, double d_an, double margin);

struct TripletModel {
  BranchNetworkSpec spec;
  nn::Sequential net;
  Eigen::VectorXd Embed(const Spectrogram& s) const;
};

struct TripletTrainResult {
  TripletModel model;
  std::vector<double> epoch_loss;
};

TripletTrainResult TrainTripletNetwork(const SpectrogramPool& pool, const TripletConfig& cfg,
                                       std::uint64_t seed);

/// Computes 1024-point spectrograms of the train clips, trains the triplet
/// network and returns its embedding of every clip.
FeatureSpaceSource BuildSpaceTriplet(const std::vector<ClipInfo>& train_clips,
                                     const std::map<std::string, std::vector<float>>& audio,
                                     const SpectralConfig& spectral, const TripletConfig& cfg,
                                     std::uint64_t seed);

// --- External space -------------------------------------------------------

/// CSV rows "clip_id,v0,v1,...", optional header row starting with clip_id.
FeatureSpaceSource ImportExternalSpace(const std::filesystem::path& path,
                                       const std::vector<std::string>& required_ids);

// --- Clustering -----------------------------------------------------------

struct ClusteringConfig {
  int reduced_dim = 2;
  int kmax_source = 16;
  int kmax_target = 2;
  int restarts = 5;
  std::string reducer = "tsne";
  double perplexity = 30.0;  // t-SNE only
  // Per-group preprocessing before reduction: "none", "l2" (unit rows) or
  // "standardize" (zero mean, unit variance per dimension).
  std::string normalize = "standardize";
  void Validate() const;
};

struct PseudoLabelEntry {
  std::string machine;
  Domain domain = Domain::kSource;
  int cluster_id = 0;
};

struct PseudoLabelGroup {
  std::string machine;
  Domain domain = Domain::kSource;
  int k_chosen = 0;
  std::vector<double> bic;
  std::vector<std::string> clip_ids;
  std::vector<int> cluster_ids;  // aligned with clip_ids, dense from 0
  Eigen::MatrixXd coords;  // reduced points, rows aligned with clip_ids
  std::vector<std::string> warnings;
};

struct PseudoLabelTable {
  std::string method;
  std::map<std::string, PseudoLabelEntry> entries;  // clip_id -> label
  std::vector<PseudoLabelGroup> groups;

  /// Training class string: machine / domain / cluster.
  std::string ClassLabel(const std::string& clip_id) const;
  /// CSV clip_id,machine,domain,cluster_id,method,k_chosen.
  void WriteCsv(const std::filesystem::path& path, const std::string& config_hash) const;
  static PseudoLabelTable ReadCsv(const std::filesystem::path& path);
};

/// Clusters each (machine, domain) group of train clips independently.
/// `workers` > 1 processes groups concurrently; results do not depend on it.
PseudoLabelTable MakePseudoLabels(const std::vector<ClipInfo>& train_clips,
                                  const FeatureSpaceSource& space, const ClusteringConfig& cfg,
                                  std::uint64_t seed, std::string method = "external",
                                  int workers = 1);

// --- Cluster agreement ------------------------------------------------------

double AdjustedRandIndex(const std::vector<int>& a, const std::vector<int>& b);

/// Mean silhouette coefficient under the euclidean metric.
double Silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels);

}  // namespace asdkit

#endif  // ASDKIT_PSEUDOLABEL_HPP_
