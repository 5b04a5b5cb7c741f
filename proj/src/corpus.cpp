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

#include "asdkit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "asdkit/error.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

namespace fs = std::filesystem;

std::string_view ToString(Domain d) {
  return d == Domain::kSource ? "source" : "target";
}

std::string_view ToString(Split s) {
  return s == Split::kTrain ? "train" : "test";
}

std::string_view ToString(Condition c) {
  switch (c) {
    case Condition::kNormal: return "normal";
    case Condition::kAnomaly: return "anomaly";
    case Condition::kUnknown: return "unknown";
  }
  return "unknown";
}

std::optional<Domain> ParseDomain(std::string_view t) {
  if (t == "source") return Domain::kSource;
  if (t == "target") return Domain::kTarget;
  return std::nullopt;
}

std::optional<Split> ParseSplit(std::string_view t) {
  if (t == "train") return Split::kTrain;
  if (t == "test") return Split::kTest;
  return std::nullopt;
}

std::optional<Condition> ParseCondition(std::string_view t) {
  if (t == "normal") return Condition::kNormal;
  if (t == "anomaly") return Condition::kAnomaly;
  if (t == "unknown") return Condition::kUnknown;
  return std::nullopt;
}

namespace {

bool AllDigits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool IsSplitDirectory(const std::string& name) {
  return name == "train" || name == "test" || name == "supplemental";
}

}  // namespace

ClipInfo ParseFilename(const fs::path& path) {
  const std::string where = path.string();
  if (path.extension() != ".wav")
    Fail(Errc::kMalformedName, where + ": not a .wav file");

  std::string machine;
  for (fs::path dir = path.parent_path(); !dir.empty() && dir != dir.root_path();
       dir = dir.parent_path()) {
    std::string name = dir.filename().string();
    if (name.empty() || name == ".") break;
    if (!IsSplitDirectory(name)) {
      machine = name;
      break;
    }
  }
  if (machine.empty()) Fail(Errc::kMalformedName, where + ": no machine directory");

  const std::string stem = path.stem().string();
  auto tokens = SplitString(stem, '_');
  if (tokens.size() < 6 || tokens[0] != "section")
    Fail(Errc::kMalformedName, where + ": expected section_<NN>_<domain>_<split>_<condition>_<idx>");

  ClipInfo info;
  info.machine = machine;
  info.path = path;
  info.clip_id = machine + "/" + stem;
  if (!AllDigits(tokens[1])) Fail(Errc::kMalformedName, where + ": bad section '" + tokens[1] + "'");
  info.section = tokens[1];
  auto domain = ParseDomain(tokens[2]);
  if (!domain) Fail(Errc::kMalformedName, where + ": unknown domain '" + tokens[2] + "'");
  auto split = ParseSplit(tokens[3]);
  if (!split) Fail(Errc::kMalformedName, where + ": unknown split '" + tokens[3] + "'");
  auto condition = ParseCondition(tokens[4]);
  if (!condition) Fail(Errc::kMalformedName, where + ": unknown condition '" + tokens[4] + "'");
  if (!AllDigits(tokens[5])) Fail(Errc::kMalformedName, where + ": bad index '" + tokens[5] + "'");
  info.domain = *domain;
  info.split = *split;
  info.condition = *condition;
  info.index = tokens[5];
  if (tokens.size() > 6) {
    std::string attr = tokens[6];
    for (std::size_t i = 7; i < tokens.size(); ++i) attr += "_" + tokens[i];
    info.attribute = attr;
  }
  return info;
}

std::string FormatFilename(const ClipInfo& info) {
  std::string name = "section_" + info.section + "_" + std::string(ToString(info.domain)) +
                     "_" + std::string(ToString(info.split)) + "_" +
                     std::string(ToString(info.condition)) + "_" + info.index;
  if (info.attribute) name += "_" + *info.attribute;
  return name + ".wav";
}

std::map<CorpusManifest::CountKey, int> CorpusManifest::Counts() const {
  std::map<CountKey, int> counts;
  for (const auto& c : clips) ++counts[{c.machine, c.domain, c.split}];
  return counts;
}

const ClipInfo& CorpusManifest::Find(std::string_view clip_id) const {
  auto it = std::lower_bound(clips.begin(), clips.end(), clip_id,
                             [](const ClipInfo& c, std::string_view id) { return c.clip_id < id; });
  if (it == clips.end() || it->clip_id != clip_id)
    Fail(Errc::kMissingClip, "clip not in manifest: " + std::string(clip_id));
  return *it;
}

void CorpusManifest::Finalize() {
  std::sort(clips.begin(), clips.end(),
            [](const ClipInfo& a, const ClipInfo& b) { return a.clip_id < b.clip_id; });
  std::set<std::string> names;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (i > 0 && clips[i].clip_id == clips[i - 1].clip_id)
      Fail(Errc::kInvalidArgument, "duplicate clip_id " + clips[i].clip_id);
    if (clips[i].split == Split::kTrain && clips[i].condition != Condition::kNormal)
      Fail(Errc::kInvalidArgument, "training clip must be normal: " + clips[i].clip_id);
    names.insert(clips[i].machine);
  }
  machines.assign(names.begin(), names.end());
}

void WriteManifestCsv(const CorpusManifest& manifest, const fs::path& path) {
  CsvTable t;
  t.header = {"clip_id", "machine", "section", "domain", "split", "condition", "attribute"};
  for (const auto& c : manifest.clips)
    t.rows.push_back({c.clip_id, c.machine, c.section, std::string(ToString(c.domain)),
                      std::string(ToString(c.split)), std::string(ToString(c.condition)),
                      c.attribute.value_or("")});
  WriteCsv(path, t);
}

// --- WAV ---------------------------------------------------------------

namespace {

struct WavHeader {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  std::uint32_t data_bytes = 0;
  std::streamoff data_offset = 0;
};

template <typename T>
bool ReadLe(std::istream& in, T& v) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) return false;
  v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return true;
}

template <typename T>
void WriteLe(std::ostream& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

WavHeader ReadWavHeader(std::istream& in, const std::string& where) {
  char tag[4];
  std::uint32_t size = 0;
  if (!in.read(tag, 4) || std::memcmp(tag, "RIFF", 4) != 0 || !ReadLe(in, size) ||
      !in.read(tag, 4) || std::memcmp(tag, "WAVE", 4) != 0)
    Fail(Errc::kIoError, where + ": not a RIFF/WAVE file");
  WavHeader h;
  bool have_fmt = false;
  while (in.read(tag, 4)) {
    std::uint32_t chunk = 0;
    if (!ReadLe(in, chunk)) break;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk < 16) Fail(Errc::kIoError, where + ": short fmt chunk");
      std::uint32_t byte_rate;
      std::uint16_t align;
      ReadLe(in, h.format);
      ReadLe(in, h.channels);
      ReadLe(in, h.rate);
      ReadLe(in, byte_rate);
      ReadLe(in, align);
      ReadLe(in, h.bits);
      std::uint32_t rest = chunk - 16;
      if (h.format == 0xFFFE && rest >= 10) {
        // WAVE_FORMAT_EXTENSIBLE: sub-format GUID starts with the real tag
        std::uint16_t cb, valid;
        std::uint32_t mask;
        std::uint16_t sub;
        ReadLe(in, cb);
        ReadLe(in, valid);
        ReadLe(in, mask);
        ReadLe(in, sub);
        h.format = sub;
        rest -= 10;
      }
      in.seekg(rest + (chunk & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) Fail(Errc::kIoError, where + ": data chunk before fmt");
      h.data_bytes = chunk;
      h.data_offset = in.tellg();
      break;
    } else {
      in.seekg(chunk + (chunk & 1), std::ios::cur);
    }
  }
  if (!have_fmt || h.data_offset == 0) Fail(Errc::kIoError, where + ": missing fmt or data chunk");
  if (h.channels != 1)
    Fail(Errc::kIoError, where + ": expected mono, got " + std::to_string(h.channels) + " channels");
  if (h.rate != static_cast<std::uint32_t>(kSampleRate))
    Fail(Errc::kIoError, where + ": expected " + std::to_string(kSampleRate) + " Hz, got " +
                             std::to_string(h.rate));
  if (!((h.format == 1 && h.bits == 16) || (h.format == 3 && h.bits == 32)))
    Fail(Errc::kIoError, where + ": unsupported sample format (need 16-bit PCM or 32-bit float)");
  return h;
}

}  // namespace

std::vector<float> ReadWav(const fs::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(Errc::kIoError, where + ": cannot open");
  WavHeader h = ReadWavHeader(in, where);
  const std::size_t bytes_per = h.bits / 8;
  const std::size_t n = h.data_bytes / bytes_per;
  std::vector<char> raw(n * bytes_per);
  in.seekg(h.data_offset);
  if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
    Fail(Errc::kIoError, where + ": truncated data chunk");
  std::vector<float> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data() + i * bytes_per);
    if (h.format == 1) {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      samples[i] = static_cast<float>(v) / 32768.0f;
    } else {
      std::uint32_t bits = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
      float f;
      std::memcpy(&f, &bits, sizeof(f));
      samples[i] = f;
    }
  }
  return samples;
}

void WriteWav(const fs::path& path, const std::vector<float>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(Errc::kIoError, path.string() + ": cannot open for writing");
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
  out.write("RIFF", 4);
  WriteLe<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  WriteLe<std::uint32_t>(out, 16);
  WriteLe<std::uint16_t>(out, 3);
  WriteLe<std::uint16_t>(out, 1);
  WriteLe<std::uint32_t>(out, kSampleRate);
  WriteLe<std::uint32_t>(out, kSampleRate * 4);
  WriteLe<std::uint16_t>(out, 4);
  WriteLe<std::uint16_t>(out, 32);
  out.write("data", 4);
  WriteLe<std::uint32_t>(out, data_bytes);
  for (float f : samples) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    WriteLe<std::uint32_t>(out, bits);
  }
  if (!out) Fail(Errc::kIoError, path.string() + ": write failed");
}

CorpusManifest LoadCorpus(const fs::path& root) {
  if (!fs::is_directory(root)) Fail(Errc::kIoError, root.string() + ": not a directory");
  CorpusManifest manifest;
  std::vector<std::string> problems;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    try {
      ClipInfo info = ParseFilename(fs::relative(file, root));
      info.path = file;
      std::ifstream in(file, std::ios::binary);
      if (!in) Fail(Errc::kIoError, file.string() + ": cannot open");
      WavHeader h = ReadWavHeader(in, file.string());
      in.seekg(0, std::ios::end);
      if (static_cast<std::streamoff>(in.tellg()) < h.data_offset + static_cast<std::streamoff>(h.data_bytes))
        Fail(Errc::kIoError, file.string() + ": truncated data chunk");
      manifest.clips.push_back(std::move(info));
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " unreadable file(s) under " + root.string();
    for (const auto& p : problems) msg += "\n  " + p;
    Fail(Errc::kIoError, msg);
  }
  if (manifest.clips.empty()) Fail(Errc::kEmptyCorpus, root.string() + " contains no WAV clips");
  manifest.Finalize();
  return manifest;
}

// --- Synthetic corpus ---------------------------------------------------

void SyntheticSpec::Validate() const {
  Require(machines >= 1, Errc::kInvalidArgument, "synthetic: machines must be >= 1");
  Require(attributes_per_machine >= 1, Errc::kInvalidArgument,
          "synthetic: attributes_per_machine must be >= 1");
  Require(clips_per_attribute >= 1, Errc::kInvalidArgument,
          "synthetic: clips_per_attribute must be >= 1");
  Require(duration_s >= 1.0, Errc::kInvalidArgument, "synthetic: duration must be >= 1 s");
  Require(target_train_clips >= 0 && test_normals_per_domain >= 0 && test_anomalies_per_domain >= 0,
          Errc::kInvalidArgument, "synthetic: clip counts must be non-negative");
  Require(pitch_shift_factor > 0.0 && attribute_ratio > 1.0, Errc::kInvalidArgument,
          "synthetic: pitch_shift_factor > 0 and attribute_ratio > 1 required");
}

double SyntheticFundamental(const SyntheticSpec& spec, int machine, int attribute) {
  const double base = 160.0 + 55.0 * machine;
  return base * std::pow(spec.attribute_ratio, attribute);
}

const AudioClip& SyntheticCorpus::Clip(std::string_view clip_id) const {
  for (const auto& c : clips)
    if (c.info.clip_id == clip_id) return c;
  Fail(Errc::kMissingClip, "synthetic clip not found: " + std::string(clip_id));
}

namespace {

struct ClipRecipe {
  int machine;
  int attribute;
  Domain domain;
  Split split;
  Condition condition;
};

// Harmonic complex with a 1/h envelope; machines and attributes differ only
// in their fundamentals.
std::vector<float> Synthesize(const SyntheticSpec& spec, const ClipRecipe& r, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(std::lround(spec.duration_s * kSampleRate));
  double f0 = SyntheticFundamental(spec, r.machine, r.attribute);
  const bool anomalous = r.condition == Condition::kAnomaly;
  if (anomalous && spec.anomaly_kind == AnomalyKind::kPitchShift) f0 *= spec.pitch_shift_factor;
  f0 *= 1.0 + 0.004 * Gaussian(rng);

  const double am_rate = Uniform(rng, 2.0, 8.0);
  const double am_phase = Uniform(rng, 0.0, 2.0 * M_PI);

  std::vector<double> tone(n, 0.0);
  for (int h = 1; h * f0 < 7800.0 && h <= 24; ++h) {
    const double amp = 1.0 / h;
    const double phase = Uniform(rng, 0.0, 2.0 * M_PI);
    const double w = 2.0 * M_PI * h * f0 / kSampleRate;
    for (std::size_t t = 0; t < n; ++t) tone[t] += amp * std::sin(w * t + phase);
  }
  double power = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    tone[t] *= 1.0 + 0.2 * std::sin(2.0 * M_PI * am_rate * t / kSampleRate + am_phase);
    power += tone[t] * tone[t];
  }
  power /= static_cast<double>(n);
  const double norm = power > 0.0 ? 1.0 / std::sqrt(power) : 1.0;
  for (auto& v : tone) v *= norm;

  if (anomalous && spec.anomaly_kind == AnomalyKind::kTransientBurst) {
    const int bursts = 3 + static_cast<int>(UniformIndex(rng, 4));
    const std::size_t len = kSampleRate / 50;
    for (int b = 0; b < bursts; ++b) {
      const std::size_t start = UniformIndex(rng, n > len ? n - len : 1);
      for (std::size_t t = 0; t < len && start + t < n; ++t)
        tone[start + t] += 3.0 * std::exp(-5.0 * t / static_cast<double>(len)) * Gaussian(rng);
    }
  }

  const double noise_std = std::sqrt(std::pow(10.0, spec.noise_level_db / 10.0));
  const double gain = 0.1 * std::pow(10.0, Uniform(rng, -3.0, 3.0) / 20.0);
  std::vector<float> out(n);
  for (std::size_t t = 0; t < n; ++t)
    out[t] = static_cast<float>(gain * (tone[t] + noise_std * Gaussian(rng)));
  return out;
}

std::string Pad4(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", i);
  return buf;
}

std::string MachineName(int m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "machine%02d", m);
  return buf;
}

}  // namespace

SyntheticCorpus GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  std::vector<ClipRecipe> recipes;
  const int a_target = spec.attributes_per_machine;
  for (int m = 0; m < spec.machines; ++m) {
    for (int a = 0; a < spec.attributes_per_machine; ++a)
      for (int k = 0; k < spec.clips_per_attribute; ++k)
        recipes.push_back({m, a, Domain::kSource, Split::kTrain, Condition::kNormal});
    for (int k = 0; k < spec.target_train_clips; ++k)
      recipes.push_back({m, a_target, Domain::kTarget, Split::kTrain, Condition::kNormal});
    for (Domain d : {Domain::kSource, Domain::kTarget}) {
      for (Condition c : {Condition::kNormal, Condition::kAnomaly}) {
        const int count = c == Condition::kNormal ? spec.test_normals_per_domain
                                                  : spec.test_anomalies_per_domain;
        for (int k = 0; k < count; ++k) {
          const int a = d == Domain::kTarget ? a_target : k % spec.attributes_per_machine;
          recipes.push_back({m, a, d, Split::kTest, c});
        }
      }
    }
  }

  SyntheticCorpus corpus;
  std::map<std::tuple<int, Domain, Split>, int> counters;
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    const ClipRecipe& r = recipes[i];
    Rng rng(MixSeed(spec.seed, i));
    AudioClip clip;
    clip.info.machine = MachineName(r.machine);
    clip.info.section = "00";
    clip.info.domain = r.domain;
    clip.info.split = r.split;
    clip.info.condition = r.condition;
    clip.info.index = Pad4(counters[{r.machine, r.domain, r.split}]++);
    clip.info.attribute = "att_" + std::to_string(r.attribute);
    std::string file = FormatFilename(clip.info);
    clip.info.clip_id = clip.info.machine + "/" + file.substr(0, file.size() - 4);
    clip.samples = Synthesize(spec, r, rng);
    corpus.clips.push_back(std::move(clip));
  }
  std::sort(corpus.clips.begin(), corpus.clips.end(),
            [](const AudioClip& a, const AudioClip& b) { return a.info.clip_id < b.info.clip_id; });
  for (const auto& c : corpus.clips) corpus.manifest.clips.push_back(c.info);
  corpus.manifest.Finalize();
  return corpus;
}

void WriteSyntheticCorpus(const SyntheticCorpus& corpus, const fs::path& root) {
  fs::create_directories(root);
  for (const auto& clip : corpus.clips) {
    fs::path dir = root / clip.info.machine;
    fs::create_directories(dir);
    WriteWav(dir / FormatFilename(clip.info), clip.samples);
  }
  WriteManifestCsv(corpus.manifest, root / "manifest.csv");
}

}  // namespace asdkit
