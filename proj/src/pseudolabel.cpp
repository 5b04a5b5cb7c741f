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

#include "asdkit/pseudolabel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <opencv2/imgproc.hpp>
#include <set>

#include "asdkit/error.hpp"
#include "asdkit/reducer.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

std::string_view ToString(SpaceKind k) {
  switch (k) {
    case SpaceKind::kClassTrained: return "class";
    case SpaceKind::kTriplet: return "triplet";
    case SpaceKind::kExternal: return "external";
  }
  return "external";
}

void FeatureSpaceSource::Validate(const std::vector<std::string>& required_ids) const {
  for (const auto& id : required_ids)
    if (!vectors.count(id)) Fail(Errc::kMissingClip, "feature space has no vector for clip '" + id + "'");
  for (const auto& [id, v] : vectors) {
    Require(v.size() == dim, Errc::kDimMismatch,
            "feature space: clip '" + id + "' has dim " + std::to_string(v.size()) + ", expected " +
                std::to_string(dim));
    Require(v.allFinite(), Errc::kInvalidArgument, "feature space: non-finite vector for clip '" + id + "'");
  }
}

Eigen::MatrixXd FeatureSpaceSource::Rows(const std::vector<std::string>& clip_ids) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(clip_ids.size()), dim);
  for (std::size_t i = 0; i < clip_ids.size(); ++i) {
    auto it = vectors.find(clip_ids[i]);
    if (it == vectors.end()) Fail(Errc::kMissingClip, "feature space has no vector for clip '" + clip_ids[i] + "'");
    out.row(static_cast<Eigen::Index>(i)) = it->second.transpose();
  }
  return out;
}

// --- Class space ---------------------------------------------------------

FeatureSpaceSource BuildSpaceClass(const std::vector<ClipInfo>& train_clips, const ClipFeatures& features,
                                   const ModelSpec& spec, const TrainConfig& cfg) {
  std::set<std::string> machines;
  TrainingSet data;
  for (const auto& c : train_clips) {
    auto it = features.find(c.clip_id);
    if (it == features.end()) Fail(Errc::kMissingClip, "class space: no features for clip '" + c.clip_id + "'");
    machines.insert(c.machine);
    data.features.push_back(&it->second);
    data.labels.push_back(c.machine);
  }
  Require(machines.size() >= 2, Errc::kSingleClass,
          "class space needs at least two machine types, found " + std::to_string(machines.size()));
  TrainResult trained = Train(spec, data, cfg);
  FeatureSpaceSource space;
  space.kind = SpaceKind::kClassTrained;
  space.dim = spec.JointDim();
  for (std::size_t i = 0; i < train_clips.size(); ++i) {
    const JointEmbedding e = trained.final_model.Forward(*data.features[i]);
    Eigen::VectorXd v(space.dim);
    for (int k = 0; k < space.dim; ++k) v[k] = e.cat[k];
    space.vectors[train_clips[i].clip_id] = std::move(v);
  }
  return space;
}

// --- Triplet space -------------------------------------------------------

void TripletConfig::Validate() const {
  Require(margin > 0.0, Errc::kInvalidArgument, "triplet: margin must be > 0");
  Require(snr_low_db < snr_high_db, Errc::kInvalidArgument, "triplet: empty SNR range");
  Require(0.0 < shrink_low && shrink_low < shrink_high && grow_low < grow_high, Errc::kInvalidArgument,
          "triplet: empty resize range");
  Require(dft_size >= 16 && epochs >= 1 && batch_size >= 2 && lr > 0.0 && embedding_dim >= 1,
          Errc::kInvalidArgument, "triplet: invalid training settings");
}

void SpectrogramPool::Add(std::string machine, Spectrogram s) {
  machines.push_back(std::move(machine));
  items.push_back(std::move(s));
}

double MeanPower(const Spectrogram& x) {
  if (x.values.empty()) return 0.0;
  double s = 0.0;
  for (float v : x.values) s += static_cast<double>(v) * v;
  return s / static_cast<double>(x.values.size());
}

namespace {

Spectrogram FitShape(const Spectrogram& n, int frames, int bins) {
  if (n.frames == frames && n.bins == bins) return n;
  Spectrogram out{frames, bins, std::vector<float>(static_cast<std::size_t>(frames) * bins, 0.0f)};
  for (int f = 0; f < std::min(frames, n.frames); ++f)
    for (int b = 0; b < std::min(bins, n.bins); ++b)
      out.values[static_cast<std::size_t>(f) * bins + b] = n.at(f, b);
  return out;
}

}  // namespace

Spectrogram AddNoise(const Spectrogram& x, const Spectrogram& n, double snr_db) {
  const Spectrogram noise = FitShape(n, x.frames, x.bins);
  const double px = MeanPower(x), pn = MeanPower(noise);
  Spectrogram out = x;
  if (pn <= 0.0) return out;
  const double gain = std::sqrt(px / (pn * std::pow(10.0, snr_db / 10.0)));
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += static_cast<float>(gain * noise.values[i]);
  return out;
}

Spectrogram Resize(const Spectrogram& x, double scale) {
  Require(scale > 0.0, Errc::kInvalidArgument, "resize: scale must be > 0");
  cv::Mat src(x.frames, x.bins, CV_32F, const_cast<float*>(x.values.data()));
  const int h = std::max(1, static_cast<int>(std::lround(x.frames * scale)));
  const int w = std::max(1, static_cast<int>(std::lround(x.bins * scale)));
  cv::Mat scaled;
  cv::resize(src, scaled, cv::Size(w, h), 0, 0, cv::INTER_LINEAR);
  Spectrogram out{x.frames, x.bins, std::vector<float>(x.values.size(), 0.0f)};
  // Centre crop when larger, centre zero-pad when smaller.
  const int oh = (h - x.frames) / 2, ow = (w - x.bins) / 2;
  for (int f = 0; f < x.frames; ++f) {
    const int sf = f + oh;
    if (sf < 0 || sf >= h) continue;
    for (int b = 0; b < x.bins; ++b) {
      const int sb = b + ow;
      if (sb < 0 || sb >= w) continue;
      out.values[static_cast<std::size_t>(f) * x.bins + b] = scaled.at<float>(sf, sb);
    }
  }
  return out;
}

std::string_view ToString(NegativeKind k) {
  switch (k) {
    case NegativeKind::kResize: return "resize";
    case NegativeKind::kNoiseResize: return "noise_resize";
    case NegativeKind::kOther: return "other";
    case NegativeKind::kNoiseOther: return "noise_other";
  }
  return "resize";
}

void CheckTripletPool(const SpectrogramPool& pool) {
  std::map<std::string, int> counts;
  for (const auto& m : pool.machines) ++counts[m];
  Require(counts.size() >= 2, Errc::kPoolTooSmall,
          "triplet pool needs at least two machine types, found " + std::to_string(counts.size()));
  for (const auto& [m, c] : counts)
    Require(c >= 2, Errc::kPoolTooSmall, "triplet pool has fewer than two clips of '" + m + "'");
}

namespace {

struct NoiseDraw {
  Spectrogram mixed;
  std::size_t interferer;
  double snr_db;
};

NoiseDraw ApplyNoise(const SpectrogramPool& pool, const Spectrogram& x, const std::string& machine,
                     const TripletConfig& cfg, Rng& rng) {
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < pool.items.size(); ++k)
    if (pool.machines[k] != machine) others.push_back(k);
  const std::size_t pick = others[UniformIndex(rng, others.size())];
  const double snr = Uniform(rng, cfg.snr_low_db, cfg.snr_high_db);
  return {AddNoise(x, pool.items[pick], snr), pick, snr};
}

double DrawScale(const TripletConfig& cfg, Rng& rng) {
  return Uniform(rng, 0.0, 1.0) < 0.5 ? Uniform(rng, cfg.shrink_low, cfg.shrink_high)
                                      : Uniform(rng, cfg.grow_low, cfg.grow_high);
}

}  // namespace

Triplet SampleTriplet(const SpectrogramPool& pool, std::size_t i, const TripletConfig& cfg, Rng& rng) {
  CheckTripletPool(pool);
  Require(i < pool.items.size(), Errc::kInvalidArgument, "triplet: anchor index out of range");
  const std::string& machine = pool.machines[i];
  const Spectrogram& xi = pool.items[i];
  Triplet t;
  auto& prov = t.provenance;
  prov.anchor_index = i;

  prov.anchor_noised = Uniform(rng, 0.0, 1.0) < 0.5;
  if (prov.anchor_noised) {
    NoiseDraw d = ApplyNoise(pool, xi, machine, cfg, rng);
    t.anchor = std::move(d.mixed);
    prov.anchor_snr_db = d.snr_db;
    prov.interferers.push_back(d.interferer);
  } else {
    t.anchor = xi;
  }

  NoiseDraw pos = ApplyNoise(pool, xi, machine, cfg, rng);
  t.positive = std::move(pos.mixed);
  prov.positive_snr_db = pos.snr_db;
  prov.interferers.push_back(pos.interferer);

  prov.negative_kind = static_cast<NegativeKind>(UniformIndex(rng, 4));
  Spectrogram base;
  if (prov.negative_kind == NegativeKind::kResize || prov.negative_kind == NegativeKind::kNoiseResize) {
    prov.resize_scale = DrawScale(cfg, rng);
    base = Resize(xi, prov.resize_scale);
  } else {
    std::vector<std::size_t> same;
    for (std::size_t k = 0; k < pool.items.size(); ++k)
      if (k != i && pool.machines[k] == machine) same.push_back(k);
    prov.other_index = same[UniformIndex(rng, same.size())];
    base = pool.items[prov.other_index];
  }
  if (prov.negative_kind == NegativeKind::kNoiseResize || prov.negative_kind == NegativeKind::kNoiseOther) {
    NoiseDraw d = ApplyNoise(pool, base, machine, cfg, rng);
    t.negative = std::move(d.mixed);
    prov.negative_snr_db = d.snr_db;
    prov.interferers.push_back(d.interferer);
  } else {
    t.negative = std::move(base);
  }
  return t;
}

Triplet SampleTriplet(const SpectrogramPool& pool, const TripletConfig& cfg, Rng& rng) {
  CheckTripletPool(pool);
  return SampleTriplet(pool, UniformIndex(rng, pool.items.size()), cfg, rng);
}

double TripletHinge(double d_ap, double d_an, double margin) { return std::max(0.0, d_ap - d_an + margin); }

Eigen::VectorXd TripletModel::Embed(const Spectrogram& s) const {
  Require(s.frames == spec.input_frames && s.bins == spec.input_bins, Errc::kShapeMismatch,
          "triplet model: spectrogram shape does not match the network");
  nn::Tensor x(1, 1, s.frames, s.bins);
  std::copy(s.values.begin(), s.values.end(), x.data.begin());
  const nn::Tensor y = net.Infer(x);
  Eigen::VectorXd v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t k = 0; k < y.size(); ++k) v[static_cast<Eigen::Index>(k)] = y.data[k];
  return v;
}

TripletTrainResult TrainTripletNetwork(const SpectrogramPool& pool, const TripletConfig& cfg,
                                       std::uint64_t seed) {
  cfg.Validate();
  CheckTripletPool(pool);
  const Spectrogram& first = pool.items.front();
  for (const auto& s : pool.items)
    Require(s.frames == first.frames && s.bins == first.bins, Errc::kShapeMismatch,
            "triplet pool: spectrograms differ in shape");

  TripletTrainResult result;
  auto& spec = result.model.spec;
  spec.input_kind = InputKind::kSpectrogram;
  spec.input_frames = first.frames;
  spec.input_bins = first.bins;
  spec.conv_stack = cfg.conv_stack;
  spec.embedding_dim = cfg.embedding_dim;
  Rng init_rng(MixSeed(seed, 1));
  result.model.net = BuildBranch(spec, init_rng);
  Rng rng(MixSeed(seed, 2));

  auto params = result.model.net.Params();
  AdamW opt(cfg.lr, 0.0);
  std::vector<AdamW::State> state(params.size());
  const std::size_t sample = first.values.size();
  const int d = cfg.embedding_dim;

  std::vector<std::size_t> order(pool.items.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t k = order.size() - 1; k > 0; --k) std::swap(order[k], order[UniformIndex(rng, k + 1)]);
    double loss_sum = 0.0;
    int steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const int b = static_cast<int>(std::min(order.size(), start + cfg.batch_size) - start);
      if (b < 2) continue;
      // Anchors, positives and negatives share one forward pass.
      nn::Tensor x(3 * b, 1, first.frames, first.bins);
      for (int k = 0; k < b; ++k) {
        Triplet t = SampleTriplet(pool, order[start + k], cfg, rng);
        std::copy(t.anchor.values.begin(), t.anchor.values.end(), x.data.begin() + k * sample);
        std::copy(t.positive.values.begin(), t.positive.values.end(), x.data.begin() + (b + k) * sample);
        std::copy(t.negative.values.begin(), t.negative.values.end(), x.data.begin() + (2 * b + k) * sample);
      }
      const nn::Tensor y = result.model.net.Forward(x);
      nn::Tensor grad(3 * b, d, 1, 1);
      double loss = 0.0;
      for (int k = 0; k < b; ++k) {
        Eigen::Map<const Eigen::VectorXf> a(y.Sample(k), d), p(y.Sample(b + k), d), n(y.Sample(2 * b + k), d);
        const Eigen::VectorXf ap = a - p, an = a - n;
        const double dap = ap.norm(), dan = an.norm();
        const double l = TripletHinge(dap, dan, cfg.margin);
        loss += l;
        if (l <= 0.0) continue;
        const Eigen::VectorXf gap = dap > 1e-12 ? Eigen::VectorXf(ap / static_cast<float>(dap)) : Eigen::VectorXf::Zero(d);
        const Eigen::VectorXf gan = dan > 1e-12 ? Eigen::VectorXf(an / static_cast<float>(dan)) : Eigen::VectorXf::Zero(d);
        const float s = 1.0f / static_cast<float>(b);
        Eigen::Map<Eigen::VectorXf>(grad.Sample(k), d) = s * (gap - gan);
        Eigen::Map<Eigen::VectorXf>(grad.Sample(b + k), d) = -s * gap;
        Eigen::Map<Eigen::VectorXf>(grad.Sample(2 * b + k), d) = s * gan;
      }
      loss /= b;
      if (!std::isfinite(loss))
        Fail(Errc::kNonFiniteLoss, "triplet: non-finite loss at epoch " + std::to_string(epoch + 1));
      for (auto* prm : params) prm->ZeroGrad();
      result.model.net.Backward(grad);
      opt.BeginStep();
      for (std::size_t q = 0; q < params.size(); ++q)
        opt.Update(std::span<float>(params[q]->value), std::span<const float>(params[q]->grad), state[q]);
      loss_sum += loss;
      ++steps;
    }
    result.epoch_loss.push_back(steps ? loss_sum / steps : 0.0);
  }
  return result;
}

FeatureSpaceSource BuildSpaceTriplet(const std::vector<ClipInfo>& train_clips,
                                     const std::map<std::string, std::vector<float>>& audio,
                                     const SpectralConfig& spectral, const TripletConfig& cfg,
                                     std::uint64_t seed) {
  cfg.Validate();
  SpectrogramPool pool;
  for (const auto& c : train_clips) {
    auto it = audio.find(c.clip_id);
    if (it == audio.end()) Fail(Errc::kMissingClip, "triplet space: no audio for clip '" + c.clip_id + "'");
    pool.Add(c.machine, ComputeSpectrogram(it->second, cfg.dft_size, spectral));
  }
  const TripletTrainResult trained = TrainTripletNetwork(pool, cfg, seed);
  FeatureSpaceSource space;
  space.kind = SpaceKind::kTriplet;
  space.dim = cfg.embedding_dim;
  for (std::size_t i = 0; i < train_clips.size(); ++i)
    space.vectors[train_clips[i].clip_id] = trained.model.Embed(pool.items[i]);
  return space;
}

// --- External space -------------------------------------------------------

FeatureSpaceSource ImportExternalSpace(const std::filesystem::path& path,
                                       const std::vector<std::string>& required_ids) {
  std::ifstream in(path);
  if (!in) Fail(Errc::kIoError, "cannot open embedding file " + path.string());
  FeatureSpaceSource space;
  space.kind = SpaceKind::kExternal;
  space.dim = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitString(line, ',');
    if (fields[0] == "clip_id") continue;
    Require(fields.size() >= 2, Errc::kCorruptFile,
            path.string() + ":" + std::to_string(lineno) + ": expected clip_id and vector components");
    const int dim = static_cast<int>(fields.size()) - 1;
    if (space.dim < 0) space.dim = dim;
    Require(dim == space.dim, Errc::kDimMismatch,
            "clip '" + fields[0] + "' has dim " + std::to_string(dim) + ", expected " + std::to_string(space.dim));
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) {
      const std::string& f = fields[k + 1];
      char* end = nullptr;
      v[k] = std::strtod(f.c_str(), &end);
      Require(end != f.c_str() && *end == '\0', Errc::kCorruptFile,
              path.string() + ":" + std::to_string(lineno) + ": bad number '" + f + "'");
    }
    Require(v.allFinite(), Errc::kCorruptFile, "non-finite vector for clip '" + fields[0] + "'");
    Require(space.vectors.emplace(fields[0], std::move(v)).second, Errc::kCorruptFile,
            "duplicate clip '" + fields[0] + "' in " + path.string());
  }
  if (space.dim < 0) space.dim = 0;
  space.Validate(required_ids);
  return space;
}

// --- Clustering -----------------------------------------------------------

void ClusteringConfig::Validate() const {
  Require(reduced_dim == 2, Errc::kInvalidArgument, "clustering: reduced_dim must be 2");
  Require(kmax_source >= 1 && kmax_target >= 1, Errc::kInvalidArgument, "clustering: kmax must be >= 1");
  Require(restarts >= 1, Errc::kInvalidArgument, "clustering: restarts must be >= 1");
  Require(perplexity > 0.0, Errc::kInvalidArgument, "clustering: perplexity must be > 0");
  Require(normalize == "none" || normalize == "l2" || normalize == "standardize", Errc::kInvalidArgument,
          "clustering: normalize must be none, l2 or standardize");
  MakeReducer(reducer);
}

std::string PseudoLabelTable::ClassLabel(const std::string& clip_id) const {
  auto it = entries.find(clip_id);
  if (it == entries.end()) Fail(Errc::kMissingClip, "no pseudo-label for clip '" + clip_id + "'");
  return it->second.machine + "/" + std::string(ToString(it->second.domain)) + "/" +
         std::to_string(it->second.cluster_id);
}

void PseudoLabelTable::WriteCsv(const std::filesystem::path& path, const std::string& config_hash) const {
  std::map<std::pair<std::string, Domain>, int> k;
  for (const auto& g : groups) k[{g.machine, g.domain}] = g.k_chosen;
  CsvTable t;
  t.comments = {"config_hash=" + config_hash, "method=" + method};
  t.header = {"clip_id", "machine", "domain", "cluster_id", "method", "k_chosen"};
  for (const auto& [id, e] : entries)
    t.rows.push_back({id, e.machine, std::string(ToString(e.domain)), std::to_string(e.cluster_id), method,
                      std::to_string(k[{e.machine, e.domain}])});
  asdkit::WriteCsv(path, t);
}

PseudoLabelTable PseudoLabelTable::ReadCsv(const std::filesystem::path& path) {
  const CsvTable t = asdkit::ReadCsv(path);
  const int ci = t.Column("clip_id"), cm = t.Column("machine"), cd = t.Column("domain"),
            cc = t.Column("cluster_id"), cme = t.Column("method"), ck = t.Column("k_chosen");
  Require(ci >= 0 && cm >= 0 && cd >= 0 && cc >= 0 && cme >= 0 && ck >= 0, Errc::kCorruptFile,
          path.string() + ": missing pseudo-label columns");
  PseudoLabelTable table;
  std::map<std::pair<std::string, Domain>, int> k;
  for (const auto& r : t.rows) {
    auto d = ParseDomain(r[cd]);
    Require(d.has_value(), Errc::kCorruptFile, path.string() + ": bad domain '" + r[cd] + "'");
    PseudoLabelEntry e{r[cm], *d, std::stoi(r[cc])};
    table.method = r[cme];
    k[{e.machine, e.domain}] = std::stoi(r[ck]);
    table.entries[r[ci]] = std::move(e);
  }
  for (const auto& [key, kc] : k) {
    PseudoLabelGroup g;
    g.machine = key.first;
    g.domain = key.second;
    g.k_chosen = kc;
    for (const auto& [id, e] : table.entries)
      if (e.machine == g.machine && e.domain == g.domain) g.clip_ids.push_back(id);
    table.groups.push_back(std::move(g));
  }
  return table;
}

PseudoLabelTable MakePseudoLabels(const std::vector<ClipInfo>& train_clips, const FeatureSpaceSource& space,
                                  const ClusteringConfig& cfg, std::uint64_t seed, std::string method,
                                  int workers) {
  cfg.Validate();
  std::map<std::pair<std::string, Domain>, std::vector<std::string>> grouped;
  std::vector<std::string> ids;
  for (const auto& c : train_clips) {
    if (c.split != Split::kTrain) continue;
    grouped[{c.machine, c.domain}].push_back(c.clip_id);
    ids.push_back(c.clip_id);
  }
  Require(!ids.empty(), Errc::kEmptyCorpus, "pseudo-labels: no train clips");
  space.Validate(ids);

  PseudoLabelTable table;
  table.method = std::move(method);
  for (auto& [key, clip_ids] : grouped) {
    PseudoLabelGroup g;
    g.machine = key.first;
    g.domain = key.second;
    g.clip_ids = clip_ids;
    table.groups.push_back(std::move(g));
  }
  TsneOptions topt;
  topt.perplexity = cfg.perplexity;
  const auto reducer = MakeReducer(cfg.reducer, topt);
  GmmOptions gopt;
  gopt.restarts = cfg.restarts;
  ParallelFor(table.groups.size(), workers, [&](std::size_t gi) {
    PseudoLabelGroup& g = table.groups[gi];
    const std::uint64_t gseed = MixSeed(seed, Fnv1a64(g.machine + "/" + std::string(ToString(g.domain))));
    Eigen::MatrixXd x = space.Rows(g.clip_ids);
    if (cfg.normalize == "l2") {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double n = x.row(i).norm();
        if (n > 0.0) x.row(i) /= n;
      }
    } else if (cfg.normalize == "standardize") {
      x = x.rowwise() - x.colwise().mean();
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(x.rows()));
        x.col(j) = sd > 1e-12 ? Eigen::VectorXd(x.col(j) / sd) : Eigen::VectorXd::Zero(x.rows());
      }
    }
    g.coords = reducer->Reduce(x, gseed);
    const int kmax = g.domain == Domain::kSource ? cfg.kmax_source : cfg.kmax_target;
    GmmBicResult r = ClusterGmmBic(g.coords, kmax, MixSeed(gseed, 1), gopt);
    g.k_chosen = r.k_chosen;
    g.bic = r.bic;
    g.warnings = r.warnings;
    // Dense relabelling in order of component index.
    std::map<int, int> dense;
    for (int a : r.assignments) dense.emplace(a, 0);
    int next = 0;
    for (auto& [a, v] : dense) v = next++;
    if (next != r.k_chosen)
      g.warnings.push_back(std::to_string(r.k_chosen - next) + " mixture components received no clips");
    g.cluster_ids.resize(r.assignments.size());
    for (std::size_t i = 0; i < r.assignments.size(); ++i) g.cluster_ids[i] = dense[r.assignments[i]];
  });
  for (const auto& g : table.groups)
    for (std::size_t i = 0; i < g.clip_ids.size(); ++i)
      table.entries[g.clip_ids[i]] = {g.machine, g.domain, g.cluster_ids[i]};
  return table;
}

// --- Cluster agreement ------------------------------------------------------

double AdjustedRandIndex(const std::vector<int>& a, const std::vector<int>& b) {
  Require(a.size() == b.size(), Errc::kInvalidArgument, "ari: label vectors differ in length");
  Require(!a.empty(), Errc::kInvalidArgument, "ari: empty labelings");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [_, c] : joint) sum_joint += pairs(c);
  for (const auto& [_, c] : ra) sum_a += pairs(c);
  for (const auto& [_, c] : rb) sum_b += pairs(c);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_joint - expected) / (max_index - expected);
}

double Silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  const Eigen::Index n = points.rows();
  Require(static_cast<std::size_t>(n) == labels.size(), Errc::kInvalidArgument,
          "silhouette: labels and points differ in length");
  std::map<int, int> size;
  for (int l : labels) ++size[l];
  Require(size.size() >= 2, Errc::kInvalidArgument, "silhouette: need at least two clusters");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (size[labels[i]] == 1) continue;
    std::map<int, double> sum;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sum[labels[j]] += (points.row(i) - points.row(j)).norm();
    const double a = sum[labels[i]] / (size[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [l, s] : sum)
      if (l != labels[i]) b = std::min(b, s / size[l]);
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace asdkit
