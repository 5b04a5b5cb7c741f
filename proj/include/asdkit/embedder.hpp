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

#ifndef ASDKIT_EMBEDDER_HPP_
#define ASDKIT_EMBEDDER_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asdkit/frontend.hpp"
#include "asdkit/nn.hpp"

namespace asdkit {

enum class InputKind { kSpectrum, kSpectrogram };

struct ConvSpec {
  int channels = 0;
  int kernel = 0;
  int stride = 1;
  bool operator==(const ConvSpec&) const = default;
};

/// One branch network g_m. Spectrum branches convolve along frequency only;
/// spectrogram branches use square kernels (clamped along time when the
/// remaining time extent is shorter than the kernel) and average over time
/// before the embedding layer.
struct BranchNetworkSpec {
  InputKind input_kind = InputKind::kSpectrogram;
  int input_frames = 1;  // 1 for spectrum branches
  int input_bins = 0;
  std::vector<ConvSpec> conv_stack;
  int embedding_dim = 128;
  bool log_compress = true;

  bool operator==(const BranchNetworkSpec&) const = default;
};

struct ModelSpec {
  std::vector<BranchNetworkSpec> branches;

  int NumBranches() const { return static_cast<int>(branches.size()); }
  int EmbeddingDim() const { return branches.empty() ? 0 : branches.front().embedding_dim; }
  int JointDim() const { return NumBranches() * EmbeddingDim(); }
  bool operator==(const ModelSpec&) const = default;
};

/// Architecture knobs independent of input geometry.
struct ArchitectureConfig {
  int embedding_dim = 128;
  std::vector<ConvSpec> spectrum_stack{{16, 64, 16}, {32, 16, 4}, {32, 4, 2}};
  std::vector<ConvSpec> spectrogram_stack{{16, 3, 2}, {32, 3, 2}, {32, 3, 2}};
  int crop_frames = 0;  // 0: use every frame of a clip of the reference length
  bool log_compress = true;
};

/// Builds a spec for clips of `clip_samples` samples under `cfg`.
ModelSpec MakeModelSpec(const SpectralConfig& cfg, int clip_samples, const ArchitectureConfig& arch);

nn::Sequential BuildBranch(const BranchNetworkSpec& spec, Rng& rng);
std::size_t BranchParameterCount(const BranchNetworkSpec& spec);

struct JointEmbedding {
  std::vector<std::vector<float>> branch;  // M vectors of length D
  std::vector<float> cat;                  // concatenation in branch order
};

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(ModelSpec spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  int NumBranches() const { return spec_.NumBranches(); }

  /// Per-branch input tensors for a batch. With `rng` the spectrogram time
  /// crop is random (training); without it the crop is centred.
  std::vector<nn::Tensor> MakeInputs(const std::vector<const FeatureSet*>& batch, Rng* rng) const;

  /// Inference-mode embedding; read-only and thread-safe.
  JointEmbedding Forward(const FeatureSet& features) const;
  std::vector<JointEmbedding> ForwardBatch(const std::vector<const FeatureSet*>& batch) const;

  /// Training-mode branch pass (batch statistics, caches activations).
  nn::Tensor TrainForward(int branch, const nn::Tensor& input);
  void TrainBackward(int branch, const nn::Tensor& grad_embedding);

  std::vector<nn::Param*> Params();
  std::vector<std::vector<float>*> Buffers();
  void ZeroGrad();
  std::size_t ParameterCount() const;

 private:
  void CheckFeatures(const FeatureSet& f) const;

  ModelSpec spec_;
  std::vector<nn::Sequential> branches_;
};

/// File name carrying the epoch tag, e.g. "epoch=16.ckpt".
std::string CheckpointFileName(int epoch);

struct Checkpoint {
  EmbeddingModel model;
  int epoch = 0;
  std::string config_hash;
};

void SaveCheckpoint(const std::filesystem::path& path, const EmbeddingModel& model, int epoch,
                    const std::string& config_hash);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);
/// As LoadCheckpoint, but throws ShapeMismatch unless the stored spec equals `expected`.
Checkpoint LoadCheckpoint(const std::filesystem::path& path, const ModelSpec& expected);

}  // namespace asdkit

#endif  // ASDKIT_EMBEDDER_HPP_
