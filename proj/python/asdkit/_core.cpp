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

#include <pybind11/eigen.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "asdkit/backend.hpp"
#include "asdkit/corpus.hpp"
#include "asdkit/error.hpp"
#include "asdkit/evalkit.hpp"
#include "asdkit/frontend.hpp"
#include "asdkit/gmm.hpp"
#include "asdkit/objectives.hpp"
#include "asdkit/pipeline.hpp"
#include "asdkit/pseudolabel.hpp"

namespace py = pybind11;
using namespace asdkit;

namespace {

py::array_t<float> ToArray(const Spectrogram& s) {
  py::array_t<float> a({s.frames, s.bins});
  std::copy(s.values.begin(), s.values.end(), a.mutable_data());
  return a;
}

std::vector<ScoredRecord> ToRecords(const std::vector<std::string>& machines,
                                    const std::vector<std::string>& domains,
                                    const std::vector<bool>& anomalous, const std::vector<double>& scores) {
  const std::size_t n = scores.size();
  Require(machines.size() == n && domains.size() == n && anomalous.size() == n, Errc::kInvalidArgument,
          "official_score: argument lengths differ");
  std::vector<ScoredRecord> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = ParseDomain(domains[i]);
    Require(d.has_value(), Errc::kInvalidArgument, "official_score: bad domain '" + domains[i] + "'");
    recs[i] = {std::to_string(i), machines[i], *d, anomalous[i] ? Condition::kAnomaly : Condition::kNormal,
               scores[i]};
  }
  return recs;
}

py::dict ReportDict(const EvalReport& r) {
  py::dict out;
  out["official"] = r.official;
  py::dict auc;
  for (const auto& [key, v] : r.auc) auc[py::str(key.first + "/" + std::string(ToString(key.second)))] = v;
  out["auc"] = auc;
  out["pauc"] = r.pauc;
  out["warnings"] = r.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "asdkit native core";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() { return py::object(py::exception<Error>(m, "AsdkitError")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("code") = std::string(ErrcName(e.code()));
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  // Metrics.
  m.def("auc", [](const std::vector<double>& normal, const std::vector<double>& anomaly) {
    return Auc(normal, anomaly);
  }, py::arg("normal"), py::arg("anomaly"));
  m.def("pauc", [](const std::vector<double>& normal, const std::vector<double>& anomaly, double p) {
    return PartialAuc(normal, anomaly, p);
  }, py::arg("normal"), py::arg("anomaly"), py::arg("p") = 0.1);
  m.def("hmean", [](const std::vector<double>& v) { return HarmonicMean(v); }, py::arg("values"));
  m.def("official_score",
        [](const std::vector<std::string>& machines, const std::vector<std::string>& domains,
           const std::vector<bool>& anomalous, const std::vector<double>& scores, const std::string& grouping,
           double p) {
          return ReportDict(OfficialScore(ToRecords(machines, domains, anomalous, scores),
                                          ParseAucGrouping(grouping), p));
        },
        py::arg("machines"), py::arg("domains"), py::arg("anomalous"), py::arg("scores"),
        py::arg("grouping") = "challenge", py::arg("p") = 0.1);
  m.def("format_mean_std", [](double mean, double std) { return FormatMeanStd({mean, std}); },
        py::arg("mean"), py::arg("std"));
  m.def("aggregate", [](const std::vector<double>& values) {
    std::vector<EvalReport> reports(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) reports[i].official = values[i];
    const MeanStd s = AggregateTrials(reports).at("official");
    return py::make_tuple(s.mean, s.std);
  }, py::arg("values"), "Mean and sample standard deviation.");

  // Objectives.
  m.def("scac_loss",
        [](const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets, const Eigen::MatrixXd& centers,
           int subclusters, double scale) {
          Require(subclusters >= 1 && centers.rows() % subclusters == 0, Errc::kInvalidArgument,
                  "scac_loss: centers rows must be a multiple of subclusters");
          AngularHead h;
          h.num_classes = static_cast<int>(centers.rows()) / subclusters;
          h.subclusters = subclusters;
          h.dim = static_cast<int>(centers.cols());
          h.scale = scale;
          h.centers = centers;
          const ScacResult r = ScacLoss(z, targets, h, true);
          return py::make_tuple(r.loss, r.d_embeddings, r.d_centers);
        },
        py::arg("embeddings"), py::arg("targets"), py::arg("centers"), py::arg("subclusters"),
        py::arg("scale"), "Batch-mean loss and gradients for embeddings and centers.");
  m.def("featex_label", &FeatExLabel, py::arg("sources"), py::arg("labels"));
  m.def("aux_parameter_count", [](const std::string& mode, int branches, int dim, int classes, int subclusters) {
    Rng rng(0);
    return ObjectiveHeads::Create(ParseLossMode(mode), branches, dim, classes, subclusters, rng).AuxParameterCount();
  }, py::arg("mode"), py::arg("branches"), py::arg("dim"), py::arg("classes"), py::arg("subclusters") = 1);

  // Front end.
  m.def("extract_features",
        [](const std::vector<float>& samples, const std::vector<int>& dft_sizes, double spectrum_seconds) {
          SpectralConfig cfg;
          cfg.dft_sizes = dft_sizes;
          cfg.spectrum_seconds = spectrum_seconds;
          const FeatureSet f = ExtractFeatures(samples, cfg);
          py::list grams;
          for (const auto& s : f.spectrograms) grams.append(ToArray(s));
          return py::make_tuple(py::array_t<float>(f.spectrum.size(), f.spectrum.data()), grams);
        },
        py::arg("samples"), py::arg("dft_sizes") = std::vector<int>{256, 4096},
        py::arg("spectrum_seconds") = 10.0);
  m.def("band_bins", [](int dft_size) {
    const auto b = BandBins(dft_size, SpectralConfig{});
    return py::make_tuple(b.first, b.last);
  }, py::arg("dft_size"));

  // Clustering.
  m.def("cluster_gmm_bic",
        [](const Eigen::MatrixXd& points, int kmax, std::uint64_t seed, int restarts) {
          GmmOptions opt;
          opt.restarts = restarts;
          const GmmBicResult r = ClusterGmmBic(points, kmax, seed, opt);
          return py::make_tuple(r.assignments, r.k_chosen, r.bic);
        },
        py::arg("points"), py::arg("kmax"), py::arg("seed") = 0, py::arg("restarts") = 5);
  m.def("adjusted_rand_index", &AdjustedRandIndex, py::arg("a"), py::arg("b"));

  // Corpus and experiments.
  m.def("write_synthetic",
        [](const std::filesystem::path& root, int machines, int attributes, int clips, std::uint64_t seed) {
          SyntheticSpec spec;
          spec.machines = machines;
          spec.attributes_per_machine = attributes;
          spec.clips_per_attribute = clips;
          spec.seed = seed;
          const SyntheticCorpus c = GenerateSynthetic(spec);
          WriteSyntheticCorpus(c, root);
          return c.clips.size();
        },
        py::arg("root"), py::arg("machines") = 2, py::arg("attributes") = 3, py::arg("clips") = 40,
        py::arg("seed") = 0, "Writes a synthetic corpus; returns the number of clips.");
  m.def("config_hash", [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    ExperimentConfig c = ExperimentConfig::Load(path);
    for (const auto& o : overrides) c.Override(o);
    return c.Hash();
  }, py::arg("config"), py::arg("overrides") = std::vector<std::string>{});
  m.def("run_experiment",
        [](const std::filesystem::path& path, const std::vector<std::string>& overrides, bool force) {
          ExperimentConfig c = ExperimentConfig::Load(path);
          for (const auto& o : overrides) c.Override(o);
          ExperimentOutcome out;
          {
            py::gil_scoped_release release;
            out = RunExperiment(c, force);
          }
          py::dict summary;
          for (const auto& [k, v] : out.summary) summary[py::str(k)] = py::make_tuple(v.mean, v.std);
          return summary;
        },
        py::arg("config"), py::arg("overrides") = std::vector<std::string>{}, py::arg("force") = false,
        "Runs every trial and returns {metric: (mean, std)}.");
}
