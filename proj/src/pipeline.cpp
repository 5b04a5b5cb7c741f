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

#include "asdkit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "asdkit/error.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

using nlohmann::json;

std::string_view ToString(LabelMethod m) {
  switch (m) {
    case LabelMethod::kNone: return "none";
    case LabelMethod::kClass: return "class";
    case LabelMethod::kTriplet: return "triplet";
    case LabelMethod::kExternal: return "external";
    case LabelMethod::kGroundTruth: return "ground_truth";
  }
  return "none";
}

LabelMethod ParseLabelMethod(std::string_view s) {
  for (auto m : {LabelMethod::kNone, LabelMethod::kClass, LabelMethod::kTriplet, LabelMethod::kExternal,
                 LabelMethod::kGroundTruth})
    if (ToString(m) == s) return m;
  Fail(Errc::kInvalidArgument, "unknown pseudo-label method '" + std::string(s) + "'");
}

namespace {

json StackToJson(const std::vector<ConvSpec>& stack) {
  json a = json::array();
  for (const auto& c : stack) a.push_back({c.channels, c.kernel, c.stride});
  return a;
}

std::vector<ConvSpec> StackFromJson(const json& a) {
  std::vector<ConvSpec> out;
  for (const auto& e : a) {
    Require(e.is_array() && e.size() == 3, Errc::kInvalidArgument,
            "config: conv layers are [channels, kernel, stride] triples");
    out.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
  }
  return out;
}

json TrainToJson(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr", t.lr},
          {"weight_decay", t.weight_decay},
          {"loss_mode", std::string(ToString(t.loss_mode))},
          {"aug_prob", t.aug_prob},
          {"subclusters", t.subclusters},
          {"score_checkpoint_epochs", t.score_checkpoint_epochs}};
}

TrainConfig TrainFromJson(const json& j) {
  TrainConfig t;
  t.epochs = j.at("epochs").get<int>();
  t.batch_size = j.at("batch_size").get<int>();
  t.lr = j.at("lr").get<double>();
  t.weight_decay = j.at("weight_decay").get<double>();
  t.loss_mode = ParseLossMode(j.at("loss_mode").get<std::string>());
  t.aug_prob = j.at("aug_prob").get<double>();
  t.subclusters = j.at("subclusters").get<int>();
  t.score_checkpoint_epochs = j.at("score_checkpoint_epochs").get<std::vector<int>>();
  return t;
}

// Every key in `j` must exist in `ref`; objects are checked recursively.
void CheckKnownKeys(const json& j, const json& ref, const std::string& prefix) {
  if (!j.is_object()) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    Require(ref.contains(it.key()), Errc::kInvalidArgument, "config: unknown key '" + key + "'");
    if (it.value().is_object()) CheckKnownKeys(it.value(), ref.at(it.key()), key);
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (corpus_root.empty()) {
    synthetic.Validate();
  } else {
    Require(std::filesystem::is_directory(corpus_root), Errc::kIoError,
            "config: corpus_root '" + corpus_root + "' is not a directory");
  }
  spectral.Validate();
  train.Validate();
  space_train.Validate();
  triplet.Validate();
  clustering.Validate();
  Require(backend.source_clusters >= 1 && backend.restarts >= 1, Errc::kInvalidArgument,
          "config: backend clusters and restarts must be >= 1");
  Require(pauc_p > 0.0 && pauc_p <= 1.0, Errc::kInvalidArgument, "config: pauc_p must lie in (0, 1]");
  Require(!trial_seeds.empty(), Errc::kInvalidArgument, "config: no trial seeds");
  Require(workers >= 1, Errc::kInvalidArgument, "config: workers must be >= 1");
  Require(!train.score_checkpoint_epochs.empty(), Errc::kInvalidArgument, "config: no scoring checkpoints");
  if (method == LabelMethod::kExternal)
    Require(std::filesystem::is_regular_file(external_embeddings), Errc::kIoError,
            "config: external_embeddings '" + external_embeddings + "' does not exist");
}

json ExperimentConfig::ToJson() const {
  json j;
  j["corpus_root"] = corpus_root;
  j["synthetic"] = {{"machines", synthetic.machines},
                    {"attributes_per_machine", synthetic.attributes_per_machine},
                    {"clips_per_attribute", synthetic.clips_per_attribute},
                    {"noise_level_db", synthetic.noise_level_db},
                    {"anomaly_kind", synthetic.anomaly_kind == AnomalyKind::kPitchShift ? "pitch_shift"
                                                                                        : "transient_burst"},
                    {"seed", synthetic.seed},
                    {"duration_s", synthetic.duration_s},
                    {"target_train_clips", synthetic.target_train_clips},
                    {"test_normals_per_domain", synthetic.test_normals_per_domain},
                    {"test_anomalies_per_domain", synthetic.test_anomalies_per_domain},
                    {"pitch_shift_factor", synthetic.pitch_shift_factor},
                    {"attribute_ratio", synthetic.attribute_ratio}};
  j["spectral"] = {{"dft_sizes", spectral.dft_sizes},
                   {"spectrum_seconds", spectral.spectrum_seconds},
                   {"low_hz", spectral.low_hz},
                   {"high_hz", spectral.high_hz},
                   {"sample_rate", spectral.sample_rate}};
  j["arch"] = {{"embedding_dim", arch.embedding_dim},
               {"spectrum_stack", StackToJson(arch.spectrum_stack)},
               {"spectrogram_stack", StackToJson(arch.spectrogram_stack)},
               {"crop_frames", arch.crop_frames},
               {"log_compress", arch.log_compress}};
  j["train"] = TrainToJson(train);
  j["space_train"] = TrainToJson(space_train);
  j["triplet"] = {{"margin", triplet.margin},
                  {"snr_low_db", triplet.snr_low_db},
                  {"snr_high_db", triplet.snr_high_db},
                  {"shrink_low", triplet.shrink_low},
                  {"shrink_high", triplet.shrink_high},
                  {"grow_low", triplet.grow_low},
                  {"grow_high", triplet.grow_high},
                  {"dft_size", triplet.dft_size},
                  {"epochs", triplet.epochs},
                  {"batch_size", triplet.batch_size},
                  {"lr", triplet.lr},
                  {"embedding_dim", triplet.embedding_dim},
                  {"conv_stack", StackToJson(triplet.conv_stack)}};
  j["method"] = std::string(ToString(method));
  j["external_embeddings"] = external_embeddings;
  j["clustering"] = {{"reduced_dim", clustering.reduced_dim},
                     {"kmax_source", clustering.kmax_source},
                     {"kmax_target", clustering.kmax_target},
                     {"restarts", clustering.restarts},
                     {"reducer", clustering.reducer},
                     {"perplexity", clustering.perplexity},
                     {"normalize", clustering.normalize}};
  j["backend"] = {{"metric", std::string(ToString(backend.metric))},
                  {"source_clusters", backend.source_clusters},
                  {"restarts", backend.restarts}};
  j["eval"] = {{"grouping", std::string(ToString(grouping))}, {"pauc_p", pauc_p}};
  j["trial_seeds"] = trial_seeds;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const json& in) {
  Require(in.is_object(), Errc::kInvalidArgument, "config: top level must be an object");
  json j = ExperimentConfig().ToJson();
  CheckKnownKeys(in, j, "");
  j.merge_patch(in);
  ExperimentConfig c;
  try {
    c.corpus_root = j.at("corpus_root").get<std::string>();
    const json& s = j.at("synthetic");
    c.synthetic.machines = s.at("machines").get<int>();
    c.synthetic.attributes_per_machine = s.at("attributes_per_machine").get<int>();
    c.synthetic.clips_per_attribute = s.at("clips_per_attribute").get<int>();
    c.synthetic.noise_level_db = s.at("noise_level_db").get<double>();
    const std::string kind = s.at("anomaly_kind").get<std::string>();
    Require(kind == "pitch_shift" || kind == "transient_burst", Errc::kInvalidArgument,
            "config: unknown anomaly_kind '" + kind + "'");
    c.synthetic.anomaly_kind = kind == "pitch_shift" ? AnomalyKind::kPitchShift : AnomalyKind::kTransientBurst;
    c.synthetic.seed = s.at("seed").get<std::uint64_t>();
    c.synthetic.duration_s = s.at("duration_s").get<double>();
    c.synthetic.target_train_clips = s.at("target_train_clips").get<int>();
    c.synthetic.test_normals_per_domain = s.at("test_normals_per_domain").get<int>();
    c.synthetic.test_anomalies_per_domain = s.at("test_anomalies_per_domain").get<int>();
    c.synthetic.pitch_shift_factor = s.at("pitch_shift_factor").get<double>();
    c.synthetic.attribute_ratio = s.at("attribute_ratio").get<double>();
    const json& sp = j.at("spectral");
    c.spectral.dft_sizes = sp.at("dft_sizes").get<std::vector<int>>();
    c.spectral.spectrum_seconds = sp.at("spectrum_seconds").get<double>();
    c.spectral.low_hz = sp.at("low_hz").get<double>();
    c.spectral.high_hz = sp.at("high_hz").get<double>();
    c.spectral.sample_rate = sp.at("sample_rate").get<int>();
    const json& a = j.at("arch");
    c.arch.embedding_dim = a.at("embedding_dim").get<int>();
    c.arch.spectrum_stack = StackFromJson(a.at("spectrum_stack"));
    c.arch.spectrogram_stack = StackFromJson(a.at("spectrogram_stack"));
    c.arch.crop_frames = a.at("crop_frames").get<int>();
    c.arch.log_compress = a.at("log_compress").get<bool>();
    c.train = TrainFromJson(j.at("train"));
    c.space_train = TrainFromJson(j.at("space_train"));
    const json& t = j.at("triplet");
    c.triplet.margin = t.at("margin").get<double>();
    c.triplet.snr_low_db = t.at("snr_low_db").get<double>();
    c.triplet.snr_high_db = t.at("snr_high_db").get<double>();
    c.triplet.shrink_low = t.at("shrink_low").get<double>();
    c.triplet.shrink_high = t.at("shrink_high").get<double>();
    c.triplet.grow_low = t.at("grow_low").get<double>();
    c.triplet.grow_high = t.at("grow_high").get<double>();
    c.triplet.dft_size = t.at("dft_size").get<int>();
    c.triplet.epochs = t.at("epochs").get<int>();
    c.triplet.batch_size = t.at("batch_size").get<int>();
    c.triplet.lr = t.at("lr").get<double>();
    c.triplet.embedding_dim = t.at("embedding_dim").get<int>();
    c.triplet.conv_stack = StackFromJson(t.at("conv_stack"));
    c.method = ParseLabelMethod(j.at("method").get<std::string>());
    c.external_embeddings = j.at("external_embeddings").get<std::string>();
    const json& cl = j.at("clustering");
    c.clustering.reduced_dim = cl.at("reduced_dim").get<int>();
    c.clustering.kmax_source = cl.at("kmax_source").get<int>();
    c.clustering.kmax_target = cl.at("kmax_target").get<int>();
    c.clustering.restarts = cl.at("restarts").get<int>();
    c.clustering.reducer = cl.at("reducer").get<std::string>();
    c.clustering.perplexity = cl.at("perplexity").get<double>();
    c.clustering.normalize = cl.at("normalize").get<std::string>();
    const json& b = j.at("backend");
    c.backend.metric = ParseMetric(b.at("metric").get<std::string>());
    c.backend.source_clusters = b.at("source_clusters").get<int>();
    c.backend.restarts = b.at("restarts").get<int>();
    c.grouping = ParseAucGrouping(j.at("eval").at("grouping").get<std::string>());
    c.pauc_p = j.at("eval").at("pauc_p").get<double>();
    c.trial_seeds = j.at("trial_seeds").get<std::vector<std::uint64_t>>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.workers = j.at("workers").get<int>();
  } catch (const json::exception& e) {
    Fail(Errc::kInvalidArgument, std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(Errc::kIoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    Fail(Errc::kInvalidArgument, "config " + path.string() + ": " + e.what());
  }
  j.erase("config_hash");
  return FromJson(j);
}

void ExperimentConfig::Save(const std::filesystem::path& path) const {
  json j = ToJson();
  j["config_hash"] = Hash();
  std::ofstream out(path);
  if (!out) Fail(Errc::kIoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void ExperimentConfig::Override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  Require(eq != std::string::npos && eq > 0, Errc::kInvalidArgument,
          "override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json j = ToJson();
  json* node = &j;
  for (const auto& part : SplitString(key, '.')) {
    Require(node->is_object() && node->contains(part), Errc::kInvalidArgument,
            "override: unknown key '" + key + "'");
    node = &(*node)[part];
  }
  *node = value;
  *this = FromJson(j);
}

std::string ExperimentConfig::Hash() const {
  json j = ToJson();
  j.erase("output_dir");
  j.erase("workers");
  j.erase("trial_seeds");
  return HexDigest(Fnv1a64(j.dump()));
}

// --- Corpus and features ------------------------------------------------------

std::vector<ClipInfo> LoadedCorpus::TrainClips() const {
  std::vector<ClipInfo> out;
  for (const auto& c : manifest.clips)
    if (c.split == Split::kTrain) out.push_back(c);
  return out;
}

std::vector<ClipInfo> LoadedCorpus::TestClips() const {
  std::vector<ClipInfo> out;
  for (const auto& c : manifest.clips)
    if (c.split == Split::kTest) out.push_back(c);
  return out;
}

LoadedCorpus LoadExperimentCorpus(const ExperimentConfig& cfg) {
  LoadedCorpus corpus;
  if (cfg.corpus_root.empty()) {
    SyntheticCorpus syn = GenerateSynthetic(cfg.synthetic);
    corpus.manifest = std::move(syn.manifest);
    for (auto& clip : syn.clips) corpus.audio[clip.info.clip_id] = std::move(clip.samples);
  } else {
    corpus.manifest = LoadCorpus(cfg.corpus_root);
    for (const auto& c : corpus.manifest.clips) corpus.audio[c.clip_id] = ReadWav(c.path);
  }
  return corpus;
}

ClipFeatures ExtractAllFeatures(const LoadedCorpus& corpus, const SpectralConfig& spectral, int workers) {
  const auto& clips = corpus.manifest.clips;
  std::vector<FeatureSet> out(clips.size());
  ParallelFor(clips.size(), workers,
              [&](std::size_t i) { out[i] = ExtractFeatures(corpus.audio.at(clips[i].clip_id), spectral); });
  ClipFeatures features;
  for (std::size_t i = 0; i < clips.size(); ++i) features.emplace(clips[i].clip_id, std::move(out[i]));
  return features;
}

ModelSpec ExperimentModelSpec(const ExperimentConfig& cfg, const LoadedCorpus& corpus) {
  const auto train = corpus.TrainClips();
  Require(!train.empty(), Errc::kEmptyCorpus, "corpus has no train clips");
  const int samples = static_cast<int>(corpus.audio.at(train.front().clip_id).size());
  return MakeModelSpec(cfg.spectral, samples, cfg.arch);
}

// --- Stages -------------------------------------------------------------------

std::optional<PseudoLabelTable> RunPseudoLabel(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                                               const ClipFeatures& features, std::uint64_t seed) {
  const auto train = corpus.TrainClips();
  FeatureSpaceSource space;
  switch (cfg.method) {
    case LabelMethod::kNone:
    case LabelMethod::kGroundTruth:
      return std::nullopt;
    case LabelMethod::kClass: {
      TrainConfig t = cfg.space_train;
      t.seed = MixSeed(seed, 11);
      space = BuildSpaceClass(train, features, ExperimentModelSpec(cfg, corpus), t);
      break;
    }
    case LabelMethod::kTriplet:
      space = BuildSpaceTriplet(train, corpus.audio, cfg.spectral, cfg.triplet, MixSeed(seed, 12));
      break;
    case LabelMethod::kExternal: {
      std::vector<std::string> ids;
      for (const auto& c : train) ids.push_back(c.clip_id);
      space = ImportExternalSpace(cfg.external_embeddings, ids);
      break;
    }
  }
  return MakePseudoLabels(train, space, cfg.clustering, MixSeed(seed, 13), std::string(ToString(cfg.method)),
                          cfg.workers);
}

std::map<std::string, std::string> TrainingLabels(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                                                  const std::optional<PseudoLabelTable>& table) {
  std::map<std::string, std::string> labels;
  for (const auto& c : corpus.TrainClips()) {
    switch (cfg.method) {
      case LabelMethod::kNone:
        labels[c.clip_id] = c.machine + "/" + std::string(ToString(c.domain));
        break;
      case LabelMethod::kGroundTruth:
        Require(c.attribute.has_value(), Errc::kInvalidArgument,
                "method ground_truth needs attribute labels; clip '" + c.clip_id + "' has none");
        labels[c.clip_id] = c.machine + "/" + *c.attribute;
        break;
      default:
        Require(table.has_value(), Errc::kInvalidArgument, "pseudo-label table missing");
        labels[c.clip_id] = table->ClassLabel(c.clip_id);
    }
  }
  return labels;
}

std::vector<ScoredRecord> ScoreTestSet(const ExperimentConfig& cfg, const LoadedCorpus& corpus,
                                       const ClipFeatures& features,
                                       const std::vector<std::pair<int, EmbeddingModel>>& checkpoints,
                                       std::uint64_t seed) {
  Require(!checkpoints.empty(), Errc::kInvalidArgument, "score: no checkpoints");
  const auto& clips = corpus.manifest.clips;
  const auto test = corpus.TestClips();
  std::vector<ScoreTable> tables;
  for (const auto& checkpoint : checkpoints) {
    const EmbeddingModel& model = checkpoint.second;
    std::vector<Eigen::VectorXd> emb(clips.size());
    ParallelFor(clips.size(), cfg.workers, [&](std::size_t i) {
      const JointEmbedding e = model.Forward(features.at(clips[i].clip_id));
      emb[i] = Eigen::Map<const Eigen::VectorXf>(e.cat.data(), static_cast<Eigen::Index>(e.cat.size()))
                   .cast<double>();
    });
    std::map<std::string, std::vector<Eigen::VectorXd>> src, tgt;
    for (std::size_t i = 0; i < clips.size(); ++i) {
      if (clips[i].split != Split::kTrain) continue;
      (clips[i].domain == Domain::kSource ? src : tgt)[clips[i].machine].push_back(emb[i]);
    }
    auto stack = [](const std::vector<Eigen::VectorXd>& rows) {
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
      for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      return m;
    };
    std::map<std::string, MachineTrainEmbeddings> train;
    for (const auto& machine : corpus.manifest.machines) {
      MachineTrainEmbeddings& m = train[machine];
      m.source = stack(src[machine]);
      m.target = stack(tgt[machine]);
    }
    const BackendModel backend = FitBackend(train, cfg.backend, MixSeed(seed, 21));
    ScoreTable table;
    for (std::size_t i = 0; i < clips.size(); ++i)
      if (clips[i].split == Split::kTest) table[clips[i].clip_id] = backend.Score(clips[i].machine, emb[i]);
    tables.push_back(std::move(table));
  }
  const ScoreTable avg = AverageScores(tables);
  std::vector<ScoredRecord> records;
  for (const auto& c : test) records.push_back({c.clip_id, c.machine, c.domain, c.condition, avg.at(c.clip_id)});
  return records;
}

// --- Artifacts ------------------------------------------------------------------

void PrepareOutputDir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    Require(fs::is_directory(dir), Errc::kIoError, dir.string() + " exists and is not a directory");
    Require(force || fs::is_empty(dir), Errc::kInvalidArgument,
            "output directory " + dir.string() + " is not empty; pass --force to overwrite");
    if (force) {
      for (const auto& e : fs::directory_iterator(dir)) fs::remove_all(e.path());
    }
  }
  fs::create_directories(dir);
}

std::vector<std::filesystem::path> WriteScoreFiles(const std::filesystem::path& dir,
                                                   const std::vector<ScoredRecord>& records,
                                                   const std::string& config_hash) {
  std::map<std::string, CsvTable> tables;
  for (const auto& r : records) {
    CsvTable& t = tables[r.machine];
    if (t.header.empty()) {
      t.comments = {"config_hash=" + config_hash, "machine=" + r.machine};
      t.header = {"clip_id", "domain", "condition", "score"};
    }
    t.rows.push_back({r.clip_id, std::string(ToString(r.domain)),
                      r.condition == Condition::kUnknown ? "" : std::string(ToString(r.condition)),
                      FormatDouble(r.score)});
  }
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& [machine, t] : tables) {
    paths.push_back(dir / ("scores_" + machine + ".csv"));
    WriteCsv(paths.back(), t);
  }
  return paths;
}

std::map<std::string, std::string> ArtifactMetadata(const std::filesystem::path& path) {
  std::map<std::string, std::string> meta;
  for (const auto& c : ReadCsv(path).comments) {
    const auto eq = c.find('=');
    if (eq != std::string::npos) meta[c.substr(0, eq)] = c.substr(eq + 1);
  }
  return meta;
}

ScoreFile ReadScoreFile(const std::filesystem::path& path) {
  const CsvTable t = ReadCsv(path);
  ScoreFile f;
  for (const auto& c : t.comments)
    if (c.rfind("config_hash=", 0) == 0) f.config_hash = c.substr(12);
  const int ci = t.Column("clip_id"), cd = t.Column("domain"), cc = t.Column("condition"), cs = t.Column("score");
  Require(ci >= 0 && cd >= 0 && cc >= 0 && cs >= 0, Errc::kCorruptFile, path.string() + ": missing score columns");
  for (const auto& row : t.rows) {
    ScoredRecord r;
    r.clip_id = row[ci];
    const auto slash = r.clip_id.find('/');
    Require(slash != std::string::npos, Errc::kCorruptFile, path.string() + ": bad clip_id '" + r.clip_id + "'");
    r.machine = r.clip_id.substr(0, slash);
    const auto d = ParseDomain(row[cd]);
    Require(d.has_value(), Errc::kCorruptFile, path.string() + ": bad domain '" + row[cd] + "'");
    r.domain = *d;
    if (row[cc].empty()) {
      r.condition = Condition::kUnknown;
    } else {
      const auto c = ParseCondition(row[cc]);
      Require(c.has_value(), Errc::kCorruptFile, path.string() + ": bad condition '" + row[cc] + "'");
      r.condition = *c;
    }
    char* end = nullptr;
    r.score = std::strtod(row[cs].c_str(), &end);
    Require(end != row[cs].c_str() && *end == '\0', Errc::kCorruptFile,
            path.string() + ": bad score '" + row[cs] + "'");
    f.records.push_back(std::move(r));
  }
  return f;
}

EvalReport EvaluateScoreFiles(const std::vector<std::filesystem::path>& paths, AucGrouping grouping, double p,
                              std::string* config_hash) {
  Require(!paths.empty(), Errc::kInvalidArgument, "eval: no score files");
  std::vector<ScoredRecord> all;
  std::string hash;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    ScoreFile f = ReadScoreFile(paths[i]);
    if (i == 0) hash = f.config_hash;
    Require(f.config_hash == hash, Errc::kKeyMismatch,
            "eval: " + paths[i].string() + " has config hash '" + f.config_hash + "', expected '" + hash + "'");
    all.insert(all.end(), f.records.begin(), f.records.end());
  }
  if (config_hash) *config_hash = hash;
  return OfficialScore(all, grouping, p);
}

void WritePseudoCoordsCsv(const std::filesystem::path& path, const PseudoLabelTable& table,
                       const LoadedCorpus& corpus, const std::string& hash) {
  CsvTable t;
  t.comments = {"config_hash=" + hash, "method=" + table.method};
  t.header = {"clip_id", "machine", "domain", "x", "y", "cluster_id", "attribute"};
  for (const auto& g : table.groups) {
    for (std::size_t i = 0; i < g.clip_ids.size(); ++i) {
      const ClipInfo& info = corpus.manifest.Find(g.clip_ids[i]);
      t.rows.push_back({g.clip_ids[i], g.machine, std::string(ToString(g.domain)), FormatDouble(g.coords(i, 0)),
                        FormatDouble(g.coords(i, 1)), std::to_string(g.cluster_ids[i]),
                        info.attribute.value_or("")});
    }
  }
  WriteCsv(path, t);
}

TrialOutcome RunTrial(const ExperimentConfig& cfg, const LoadedCorpus& corpus, const ClipFeatures& features,
                      std::uint64_t seed, const std::filesystem::path& trial_dir) {
  const std::string hash = cfg.Hash();
  TrialOutcome out;
  out.seed = seed;
  out.labels = RunPseudoLabel(cfg, corpus, features, seed);
  const auto labels = TrainingLabels(cfg, corpus, out.labels);

  TrainingSet data;
  for (const auto& c : corpus.TrainClips()) {
    data.features.push_back(&features.at(c.clip_id));
    data.labels.push_back(labels.at(c.clip_id));
  }
  TrainConfig tcfg = cfg.train;
  tcfg.seed = seed;
  TrainOptions opt;
  opt.config_hash = hash;
  if (!trial_dir.empty()) {
    std::filesystem::create_directories(trial_dir);
    opt.checkpoint_dir = trial_dir / "checkpoints";
  }
  const TrainResult trained = Train(ExperimentModelSpec(cfg, corpus), data, tcfg, opt);
  out.log = trained.log;
  out.scores = ScoreTestSet(cfg, corpus, features, trained.checkpoints, seed);
  out.report = OfficialScore(out.scores, cfg.grouping, cfg.pauc_p);

  if (!trial_dir.empty()) {
    if (out.labels) {
      out.labels->WriteCsv(trial_dir / "pseudo_labels.csv", hash);
      WritePseudoCoordsCsv(trial_dir / "pseudo_coords.csv", *out.labels, corpus, hash);
    }
    out.log.WriteCsv(trial_dir / "train_log.csv");
    WriteScoreFiles(trial_dir / "scores", out.scores, hash);
    std::ofstream(trial_dir / "eval.json") << EvalReportJson(out.report, hash) << '\n';
  }
  return out;
}

ExperimentOutcome RunExperiment(const ExperimentConfig& cfg, bool force) {
  cfg.Validate();
  const std::filesystem::path dir = cfg.output_dir;
  PrepareOutputDir(dir, force);
  cfg.Save(dir / "config.json");
  const std::string hash = cfg.Hash();

  const LoadedCorpus corpus = LoadExperimentCorpus(cfg);
  const ClipFeatures features = ExtractAllFeatures(corpus, cfg.spectral, cfg.workers);
  ExperimentOutcome out;
  std::vector<EvalReport> reports;
  for (std::uint64_t seed : cfg.trial_seeds) {
    out.trials.push_back(RunTrial(cfg, corpus, features, seed, dir / ("trial_" + std::to_string(seed))));
    reports.push_back(out.trials.back().report);
  }
  out.summary = AggregateTrials(reports);

  json report;
  report["config_hash"] = hash;
  report["method"] = std::string(ToString(cfg.method));
  report["trials"] = json::array();
  for (const auto& t : out.trials) {
    json tj = json::parse(EvalReportJson(t.report, hash));
    tj["seed"] = t.seed;
    report["trials"].push_back(tj);
  }
  for (const auto& [k, v] : out.summary) report["summary"][k] = {{"mean", v.mean}, {"std", v.std}};
  std::ofstream(dir / "report.json") << report.dump(2) << '\n';
  std::ofstream txt(dir / "report.txt");
  txt << "# config_hash=" << hash << "\n# method=" << ToString(cfg.method) << "\n" << RenderTrialTable(out.summary);
  return out;
}

}  // namespace asdkit
