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

#include "asdkit/frontend.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "asdkit/error.hpp"

namespace asdkit {

void SpectralConfig::Validate() const {
  Require(!dft_sizes.empty(), Errc::kInvalidArgument, "frontend: dft_sizes must not be empty");
  for (int n : dft_sizes)
    Require(n >= 4 && n % 2 == 0, Errc::kInvalidArgument,
            "frontend: dft sizes must be even and >= 4, got " + std::to_string(n));
  Require(sample_rate > 0, Errc::kInvalidArgument, "frontend: sample_rate must be positive");
  Require(low_hz > 0.0 && low_hz < high_hz && high_hz <= sample_rate / 2.0, Errc::kInvalidArgument,
          "frontend: need 0 < low_hz < high_hz <= sample_rate/2");
  Require(spectrum_seconds > 0.0, Errc::kInvalidArgument, "frontend: spectrum_seconds must be > 0");
}

int SpectralConfig::SpectrumLength() const {
  return static_cast<int>(std::lround(spectrum_seconds * sample_rate));
}

BinRange BandBins(int dft_size, const SpectralConfig& cfg) {
  const double spacing = static_cast<double>(cfg.sample_rate) / dft_size;
  BinRange r;
  r.first = static_cast<int>(std::ceil(cfg.low_hz / spacing - 1e-9));
  r.last = static_cast<int>(std::floor(cfg.high_hz / spacing + 1e-9));
  if (r.last > dft_size / 2) r.last = dft_size / 2;
  return r;
}

int FrameCount(int num_samples, int dft_size) {
  if (num_samples < dft_size) return 0;
  return (num_samples - dft_size) / (dft_size / 2) + 1;
}

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
class RealDft {
 public:
  explicit RealDft(int n) : n_(n) {
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  ~RealDft() { fftw_destroy_plan(plan_); }
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  void Execute(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(plan_, in, out); }
  int size() const { return n_; }

 private:
  int n_;
  fftw_plan plan_;
};

const RealDft& PlanFor(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<RealDft>> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = plans[n];
  if (!slot) slot = std::make_unique<RealDft>(n);
  return *slot;
}

struct FftwBuffers {
  explicit FftwBuffers(int n) : in(fftw_alloc_real(n)), out(fftw_alloc_complex(n / 2 + 1)) {}
  ~FftwBuffers() {
    fftw_free(in);
    fftw_free(out);
  }
  FftwBuffers(const FftwBuffers&) = delete;
  FftwBuffers& operator=(const FftwBuffers&) = delete;
  double* in;
  fftw_complex* out;
};

std::vector<double> Hann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);  // periodic
  return w;
}

}  // namespace

std::vector<float> ComputeSpectrum(std::span<const float> samples, const SpectralConfig& cfg) {
  cfg.Validate();
  Require(!samples.empty(), Errc::kClipTooShort, "spectrum: empty clip");
  const int n = cfg.SpectrumLength();
  const RealDft& dft = PlanFor(n);
  FftwBuffers buf(n);
  const auto window = Hann(n);
  const std::size_t copy = std::min<std::size_t>(samples.size(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    buf.in[i] = static_cast<std::size_t>(i) < copy ? window[i] * samples[i] : 0.0;
  dft.Execute(buf.in, buf.out);
  const BinRange bins = BandBins(n, cfg);
  std::vector<float> out(bins.count());
  for (int k = bins.first; k <= bins.last; ++k)
    out[k - bins.first] = static_cast<float>(std::hypot(buf.out[k][0], buf.out[k][1]));
  return out;
}

Spectrogram ComputeSpectrogram(std::span<const float> samples, int dft_size,
                               const SpectralConfig& cfg) {
  cfg.Validate();
  Require(dft_size >= 4 && dft_size % 2 == 0, Errc::kInvalidArgument,
          "spectrogram: dft_size must be even and >= 4");
  const int total = static_cast<int>(samples.size());
  Require(total >= dft_size, Errc::kClipTooShort,
          "spectrogram: clip has " + std::to_string(total) + " samples, need >= " +
              std::to_string(dft_size));
  const RealDft& dft = PlanFor(dft_size);
  FftwBuffers buf(dft_size);
  const auto window = Hann(dft_size);
  const BinRange bins = BandBins(dft_size, cfg);
  const int hop = dft_size / 2;

  Spectrogram s;
  s.frames = FrameCount(total, dft_size);
  s.bins = bins.count();
  s.values.resize(static_cast<std::size_t>(s.frames) * s.bins);
  for (int f = 0; f < s.frames; ++f) {
    const float* frame = samples.data() + static_cast<std::size_t>(f) * hop;
    for (int i = 0; i < dft_size; ++i) buf.in[i] = window[i] * frame[i];
    dft.Execute(buf.in, buf.out);
    float* row = s.values.data() + static_cast<std::size_t>(f) * s.bins;
    for (int k = bins.first; k <= bins.last; ++k)
      row[k - bins.first] = static_cast<float>(std::hypot(buf.out[k][0], buf.out[k][1]));
  }
  return s;
}

FeatureSet ExtractFeatures(std::span<const float> samples, const SpectralConfig& cfg) {
  FeatureSet fs;
  fs.spectrum = ComputeSpectrum(samples, cfg);
  for (int n : cfg.dft_sizes) fs.spectrograms.push_back(ComputeSpectrogram(samples, n, cfg));
  return fs;
}

}  // namespace asdkit
