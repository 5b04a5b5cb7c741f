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

// asdkit command-line tool.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "asdkit/error.hpp"
#include "asdkit/pipeline.hpp"
#include "asdkit/viz.hpp"

namespace fs = std::filesystem;
using namespace asdkit;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  int workers = 0;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "experiment config (JSON)");
  cmd->add_option("--set", c.overrides, "override a config key, e.g. --set train.epochs=4");
  cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig MakeConfig(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig() : ExperimentConfig::Load(c.config);
  for (const auto& o : c.overrides) cfg.Override(o);
  if (c.workers > 0) cfg.workers = c.workers;
  return cfg;
}

int ExitCode(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kUsage: return 1;
    case ErrorCategory::kData: return 2;
    case ErrorCategory::kNumerical: return 3;
  }
  return 2;
}

std::vector<fs::path> ScorePaths(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("scores_", 0) == 0 && e.path().extension() == ".csv")
          out.push_back(e.path());
      }
    } else {
      out.emplace_back(in);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asdkit: anomalous sound detection with pseudo-attribute labels"};
  app.require_subcommand(1);

  Common common;
  bool force = false;
  std::string out;
  std::uint64_t seed = 0;

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  AddCommon(synth, common);
  synth->add_option("-o,--out", out, "corpus directory")->required();
  synth->add_flag("--force", force, "overwrite a non-empty directory");

  auto* pseudo = app.add_subcommand("pseudolabel", "build a feature space and cluster pseudo-labels");
  AddCommon(pseudo, common);
  pseudo->add_option("-o,--out", out, "output directory")->required();
  pseudo->add_option("--seed", seed, "trial seed");
  pseudo->add_flag("--force", force, "overwrite a non-empty directory");

  std::string labels_csv;
  auto* train = app.add_subcommand("train", "train the embedder and write checkpoints");
  AddCommon(train, common);
  train->add_option("-o,--out", out, "output directory")->required();
  train->add_option("--seed", seed, "trial seed");
  train->add_option("--labels", labels_csv, "pseudo_labels.csv from the pseudolabel stage");
  train->add_flag("--force", force, "overwrite a non-empty directory");

  std::string ckpt_dir;
  auto* score = app.add_subcommand("score", "score test clips with averaged checkpoint backends");
  AddCommon(score, common);
  score->add_option("--checkpoints", ckpt_dir, "directory with epoch=N.ckpt files")->required();
  score->add_option("-o,--out", out, "output directory")->required();
  score->add_option("--seed", seed, "trial seed");
  score->add_flag("--force", force, "overwrite a non-empty directory");

  std::vector<std::string> score_inputs;
  std::string grouping = "challenge", report_path;
  double p = 0.1;
  auto* eval = app.add_subcommand("eval", "compute AUC, pAUC and the official score");
  eval->add_option("scores", score_inputs, "score CSV files or directories")->required();
  eval->add_option("--grouping", grouping, "challenge | same_domain");
  eval->add_option("--p", p, "pAUC range");
  eval->add_option("-o,--out", report_path, "write the JSON report here");

  std::string coords, color_by = "attribute";
  double plot_score = -1.0;
  auto* viz = app.add_subcommand("viz", "scatter plots of reduced feature spaces");
  viz->add_option("coords", coords, "pseudo_coords.csv")->required();
  viz->add_option("-o,--out", out, "output directory")->required();
  viz->add_option("--color-by", color_by, "attribute | cluster_id");
  viz->add_option("--score", plot_score, "official score shown in the title");

  auto* run = app.add_subcommand("run", "pseudo-label, train, score and evaluate every trial");
  AddCommon(run, common);
  run->add_option("-o,--out", out, "output directory (overrides output_dir)");
  run->add_flag("--force", force, "overwrite a non-empty directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      const ExperimentConfig cfg = MakeConfig(common);
      cfg.synthetic.Validate();
      PrepareOutputDir(out, force);
      WriteSyntheticCorpus(GenerateSynthetic(cfg.synthetic), out);
      std::cout << "wrote synthetic corpus to " << out << "\n";
    } else if (pseudo->parsed()) {
      ExperimentConfig cfg = MakeConfig(common);
      cfg.Validate();
      PrepareOutputDir(out, force);
      const LoadedCorpus corpus = LoadExperimentCorpus(cfg);
      const ClipFeatures features = ExtractAllFeatures(corpus, cfg.spectral, cfg.workers);
      auto table = RunPseudoLabel(cfg, corpus, features, seed);
      Require(table.has_value(), Errc::kInvalidArgument,
              "method '" + std::string(ToString(cfg.method)) + "' does not produce pseudo-labels");
      table->WriteCsv(fs::path(out) / "pseudo_labels.csv", cfg.Hash());
      WritePseudoCoordsCsv(fs::path(out) / "pseudo_coords.csv", *table, corpus, cfg.Hash());
      for (const auto& g : table->groups) {
        std::cout << g.machine << " " << ToString(g.domain) << ": k=" << g.k_chosen << "\n";
        for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
      }
    } else if (train->parsed()) {
      ExperimentConfig cfg = MakeConfig(common);
      cfg.Validate();
      PrepareOutputDir(out, force);
      const std::string hash = cfg.Hash();
      const LoadedCorpus corpus = LoadExperimentCorpus(cfg);
      const ClipFeatures features = ExtractAllFeatures(corpus, cfg.spectral, cfg.workers);
      std::optional<PseudoLabelTable> table;
      if (!labels_csv.empty()) {
        const auto meta = ArtifactMetadata(labels_csv);
        Require(meta.count("config_hash") && meta.at("config_hash") == hash, Errc::kKeyMismatch,
                labels_csv + " was produced under a different config");
        table = PseudoLabelTable::ReadCsv(labels_csv);
      } else {
        table = RunPseudoLabel(cfg, corpus, features, seed);
      }
      const auto labels = TrainingLabels(cfg, corpus, table);
      TrainingSet data;
      for (const auto& c : corpus.TrainClips()) {
        data.features.push_back(&features.at(c.clip_id));
        data.labels.push_back(labels.at(c.clip_id));
      }
      TrainConfig tcfg = cfg.train;
      tcfg.seed = seed;
      TrainOptions opt;
      opt.config_hash = hash;
      opt.checkpoint_dir = fs::path(out) / "checkpoints";
      const TrainResult result = Train(ExperimentModelSpec(cfg, corpus), data, tcfg, opt);
      result.log.WriteCsv(fs::path(out) / "train_log.csv");
      std::cout << "trained " << result.log.epoch_loss.size() << " epochs, final loss "
                << result.log.epoch_loss.back() << "\n";
    } else if (score->parsed()) {
      ExperimentConfig cfg = MakeConfig(common);
      cfg.Validate();
      PrepareOutputDir(out, force);
      const std::string hash = cfg.Hash();
      const LoadedCorpus corpus = LoadExperimentCorpus(cfg);
      const ClipFeatures features = ExtractAllFeatures(corpus, cfg.spectral, cfg.workers);
      const ModelSpec spec = ExperimentModelSpec(cfg, corpus);
      std::vector<std::pair<int, EmbeddingModel>> checkpoints;
      for (int epoch : cfg.train.score_checkpoint_epochs) {
        Checkpoint ck = LoadCheckpoint(fs::path(ckpt_dir) / CheckpointFileName(epoch), spec);
        Require(ck.config_hash == hash, Errc::kKeyMismatch,
                CheckpointFileName(epoch) + " was produced under a different config");
        checkpoints.emplace_back(epoch, std::move(ck.model));
      }
      const auto records = ScoreTestSet(cfg, corpus, features, checkpoints, seed);
      for (const auto& path : WriteScoreFiles(out, records, hash)) std::cout << "wrote " << path.string() << "\n";
    } else if (eval->parsed()) {
      std::string hash;
      const EvalReport report = EvaluateScoreFiles(ScorePaths(score_inputs), ParseAucGrouping(grouping), p, &hash);
      for (const auto& [k, v] : report.Metrics()) std::printf("%-40s %6.2f\n", k.c_str(), 100.0 * v);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      if (!report_path.empty()) std::ofstream(report_path) << EvalReportJson(report, hash) << '\n';
    } else if (viz->parsed()) {
      std::optional<double> s;
      if (plot_score >= 0.0) s = plot_score;
      for (const auto& path : RenderCoordinateFile(coords, out, color_by, s))
        std::cout << "wrote " << path.string() << "\n";
    } else if (run->parsed()) {
      ExperimentConfig cfg = MakeConfig(common);
      if (!out.empty()) cfg.output_dir = out;
      const ExperimentOutcome outcome = RunExperiment(cfg, force);
      std::cout << RenderTrialTable(outcome.summary);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
