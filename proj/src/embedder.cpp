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

#include "asdkit/embedder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "asdkit/error.hpp"

namespace asdkit {

using nlohmann::json;

ModelSpec MakeModelSpec(const SpectralConfig& cfg, int clip_samples,
                        const ArchitectureConfig& arch) {
  cfg.Validate();
  ModelSpec spec;
  BranchNetworkSpec spectrum;
  spectrum.input_kind = InputKind::kSpectrum;
  spectrum.input_frames = 1;
  spectrum.input_bins = BandBins(cfg.SpectrumLength(), cfg).count();
  spectrum.conv_stack = arch.spectrum_stack;
  spectrum.embedding_dim = arch.embedding_dim;
  spectrum.log_compress = arch.log_compress;
  spec.branches.push_back(spectrum);
  for (int n : cfg.dft_sizes) {
    BranchNetworkSpec b;
    b.input_kind = InputKind::kSpectrogram;
    const int frames = FrameCount(clip_samples, n);
    Require(frames >= 1, Errc::kClipTooShort,
            "reference clip length shorter than DFT size " + std::to_string(n));
    b.input_frames = arch.crop_frames > 0 ? arch.crop_frames : frames;
    b.input_bins = BandBins(n, cfg).count();
    b.conv_stack = arch.spectrogram_stack;
    b.embedding_dim = arch.embedding_dim;
    b.log_compress = arch.log_compress;
    spec.branches.push_back(b);
  }
  return spec;
}

nn::Sequential BuildBranch(const BranchNetworkSpec& spec, Rng& rng) {
  Require(spec.input_frames >= 1 && spec.input_bins >= 1 && spec.embedding_dim >= 1,
          Errc::kInvalidArgument, "branch: input and embedding sizes must be positive");
  nn::Sequential net;
  int c = 1, h = spec.input_frames, w = spec.input_bins;
  if (spec.log_compress) net.Add(std::make_unique<nn::LogCompress>());
  net.Add(std::make_unique<nn::BatchNorm>(1));
  const bool spectrum = spec.input_kind == InputKind::kSpectrum;
  for (const ConvSpec& layer : spec.conv_stack) {
    Require(layer.channels > 0 && layer.kernel > 0 && layer.stride > 0, Errc::kInvalidArgument,
            "branch: conv layer sizes must be positive");
    const int kw = std::min(layer.kernel, w);
    const int sw = layer.stride;
    int kh = 1, sh = 1;
    if (!spectrum) {
      kh = std::min(layer.kernel, h);
      sh = h >= layer.kernel ? layer.stride : 1;
    }
    auto conv = std::make_unique<nn::Conv2d>(c, layer.channels, kh, kw, sh, sw, rng);
    h = conv->OutHeight(h);
    w = conv->OutWidth(w);
    c = layer.channels;
    net.Add(std::move(conv));
    net.Add(std::make_unique<nn::BatchNorm>(c));
    net.Add(std::make_unique<nn::Relu>());
  }
  if (!spectrum && h > 1) {
    net.Add(std::make_unique<nn::MeanPoolH>());
    h = 1;
  }
  net.Add(std::make_unique<nn::Linear>(c * h * w, spec.embedding_dim, rng));
  return net;
}

std::size_t BranchParameterCount(const BranchNetworkSpec& spec) {
  Rng rng(0);
  return BuildBranch(spec, rng).ParameterCount();
}

EmbeddingModel::EmbeddingModel(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  Require(!spec_.branches.empty(), Errc::kInvalidArgument, "model: no branches");
  for (const auto& b : spec_.branches)
    Require(b.embedding_dim == spec_.EmbeddingDim(), Errc::kInvalidArgument,
            "model: all branches must share the embedding dimension");
  for (std::size_t m = 0; m < spec_.branches.size(); ++m) {
    Rng rng(MixSeed(seed, m));
    branches_.push_back(BuildBranch(spec_.branches[m], rng));
  }
}

void EmbeddingModel::CheckFeatures(const FeatureSet& f) const {
  Require(f.NumInputs() == NumBranches(), Errc::kShapeMismatch,
          "model has " + std::to_string(NumBranches()) + " branches, features have " +
              std::to_string(f.NumInputs()) + " inputs");
  Require(static_cast<int>(f.spectrum.size()) == spec_.branches[0].input_bins,
          Errc::kShapeMismatch, "spectrum bin count does not match the model");
  for (int m = 1; m < NumBranches(); ++m)
    Require(f.spectrograms[m - 1].bins == spec_.branches[m].input_bins, Errc::kShapeMismatch,
            "spectrogram " + std::to_string(m) + " bin count does not match the model");
}

std::vector<nn::Tensor> EmbeddingModel::MakeInputs(const std::vector<const FeatureSet*>& batch,
                                                   Rng* rng) const {
  const int n = static_cast<int>(batch.size());
  std::vector<nn::Tensor> inputs;
  for (const FeatureSet* f : batch) CheckFeatures(*f);
  for (int m = 0; m < NumBranches(); ++m) {
    const auto& bs = spec_.branches[m];
    nn::Tensor t(n, 1, bs.input_frames, bs.input_bins);
    for (int i = 0; i < n; ++i) {
      float* dst = t.Sample(i);
      if (m == 0) {
        std::copy(batch[i]->spectrum.begin(), batch[i]->spectrum.end(), dst);
        continue;
      }
      const Spectrogram& s = batch[i]->spectrograms[m - 1];
      const int keep = std::min(s.frames, bs.input_frames);
      int offset = (s.frames - keep) / 2;
      if (rng && s.frames > keep) offset = static_cast<int>(UniformIndex(*rng, s.frames - keep + 1));
      std::copy(s.values.begin() + static_cast<std::size_t>(offset) * s.bins,
                s.values.begin() + static_cast<std::size_t>(offset + keep) * s.bins, dst);
    }
    inputs.push_back(std::move(t));
  }
  return inputs;
}

std::vector<JointEmbedding> EmbeddingModel::ForwardBatch(
    const std::vector<const FeatureSet*>& batch) const {
  auto inputs = MakeInputs(batch, nullptr);
  const int d = spec_.EmbeddingDim();
  std::vector<JointEmbedding> out(batch.size());
  for (int m = 0; m < NumBranches(); ++m) {
    nn::Tensor z = branches_[m].Infer(inputs[m]);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const float* p = z.Sample(static_cast<int>(i));
      out[i].branch.emplace_back(p, p + d);
    }
  }
  for (auto& e : out)
    for (const auto& b : e.branch) e.cat.insert(e.cat.end(), b.begin(), b.end());
  return out;
}

JointEmbedding EmbeddingModel::Forward(const FeatureSet& features) const {
  return ForwardBatch({&features}).front();
}

nn::Tensor EmbeddingModel::TrainForward(int branch, const nn::Tensor& input) {
  return branches_.at(branch).Forward(input);
}

void EmbeddingModel::TrainBackward(int branch, const nn::Tensor& grad) {
  branches_.at(branch).Backward(grad);
}

std::vector<nn::Param*> EmbeddingModel::Params() {
  std::vector<nn::Param*> out;
  for (auto& b : branches_)
    for (auto* p : b.Params()) out.push_back(p);
  return out;
}

std::vector<std::vector<float>*> EmbeddingModel::Buffers() {
  std::vector<std::vector<float>*> out;
  for (auto& b : branches_)
    for (auto* p : b.Buffers()) out.push_back(p);
  return out;
}

void EmbeddingModel::ZeroGrad() {
  for (auto* p : Params()) p->ZeroGrad();
}

std::size_t EmbeddingModel::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& b : branches_) n += b.ParameterCount();
  return n;
}

// --- Checkpoints ----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'S', 'D', 'K', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

json SpecToJson(const ModelSpec& spec) {
  json branches = json::array();
  for (const auto& b : spec.branches) {
    json stack = json::array();
    for (const auto& c : b.conv_stack) stack.push_back({c.channels, c.kernel, c.stride});
    branches.push_back({{"input_kind", b.input_kind == InputKind::kSpectrum ? "spectrum" : "spectrogram"},
                        {"input_frames", b.input_frames},
                        {"input_bins", b.input_bins},
                        {"conv_stack", stack},
                        {"embedding_dim", b.embedding_dim},
                        {"log_compress", b.log_compress}});
  }
  return {{"branches", branches}};
}

ModelSpec SpecFromJson(const json& j) {
  ModelSpec spec;
  for (const auto& b : j.at("branches")) {
    BranchNetworkSpec s;
    s.input_kind = b.at("input_kind") == "spectrum" ? InputKind::kSpectrum : InputKind::kSpectrogram;
    s.input_frames = b.at("input_frames");
    s.input_bins = b.at("input_bins");
    for (const auto& c : b.at("conv_stack")) s.conv_stack.push_back({c.at(0), c.at(1), c.at(2)});
    s.embedding_dim = b.at("embedding_dim");
    s.log_compress = b.at("log_compress");
    spec.branches.push_back(s);
  }
  return spec;
}

void WriteFloats(std::ostream& out, const std::vector<float>& v) {
  const std::uint64_t n = v.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(float)));
}

void ReadFloats(std::istream& in, std::vector<float>& v, const std::string& where) {
  std::uint64_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof(n)))
    Fail(Errc::kCorruptFile, where + ": truncated array header");
  if (n != v.size())
    Fail(Errc::kCorruptFile, where + ": array of " + std::to_string(n) + " values, expected " +
                                 std::to_string(v.size()));
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(float))))
    Fail(Errc::kCorruptFile, where + ": truncated array data");
}

}  // namespace

std::string CheckpointFileName(int epoch) { return "epoch=" + std::to_string(epoch) + ".ckpt"; }

void SaveCheckpoint(const std::filesystem::path& path, const EmbeddingModel& model, int epoch,
                    const std::string& config_hash) {
  auto& mut = const_cast<EmbeddingModel&>(model);  // Params() exposes mutable views only
  for (auto* p : mut.Params())
    for (float v : p->value)
      Require(std::isfinite(v), Errc::kNonFiniteLoss, "checkpoint: non-finite parameter in " + p->name);
  json header = {{"format", "asdkit-checkpoint"},
                 {"version", kCheckpointVersion},
                 {"epoch", epoch},
                 {"config_hash", config_hash},
                 {"spec", SpecToJson(model.spec())}};
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(Errc::kIoError, path.string() + ": cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kCheckpointVersion), sizeof(kCheckpointVersion));
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(len));
  for (auto* p : mut.Params()) WriteFloats(out, p->value);
  for (auto* b : mut.Buffers()) WriteFloats(out, *b);
  if (!out) Fail(Errc::kIoError, path.string() + ": write failed");
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(Errc::kIoError, where + ": cannot open");
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    Fail(Errc::kCorruptFile, where + ": not an asdkit checkpoint");
  if (!in.read(reinterpret_cast<char*>(&version), sizeof(version)) || version != kCheckpointVersion)
    Fail(Errc::kCorruptFile, where + ": unsupported checkpoint version " + std::to_string(version));
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len)) || len > (1u << 24))
    Fail(Errc::kCorruptFile, where + ": bad header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len)))
    Fail(Errc::kCorruptFile, where + ": truncated header");
  Checkpoint ck;
  try {
    json header = json::parse(text);
    ck.epoch = header.at("epoch");
    ck.config_hash = header.at("config_hash");
    ck.model = EmbeddingModel(SpecFromJson(header.at("spec")), 0);
  } catch (const json::exception& e) {
    Fail(Errc::kCorruptFile, where + ": bad header: " + e.what());
  }
  for (auto* p : ck.model.Params()) ReadFloats(in, p->value, where);
  for (auto* b : ck.model.Buffers()) ReadFloats(in, *b, where);
  return ck;
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path, const ModelSpec& expected) {
  Checkpoint ck = LoadCheckpoint(path);
  if (!(ck.model.spec() == expected))
    Fail(Errc::kShapeMismatch,
         path.string() + ": stored model has " + std::to_string(ck.model.NumBranches()) +
             " branches / different geometry than the expected model with " +
             std::to_string(expected.NumBranches()) + " branches");
  return ck;
}

}  // namespace asdkit
