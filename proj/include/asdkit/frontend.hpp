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

#ifndef ASDKIT_FRONTEND_HPP_
#define ASDKIT_FRONTEND_HPP_

#include <span>
#include <vector>

#include "asdkit/corpus.hpp"

namespace asdkit {

struct SpectralConfig {
  std::vector<int> dft_sizes{256, 4096};  // one spectrogram per entry
  double spectrum_seconds = 10.0;         // full-signal DFT length policy
  double low_hz = 200.0;
  double high_hz = 8000.0;
  int sample_rate = kSampleRate;

  void Validate() const;
  int SpectrumLength() const;  // samples fed to the full-signal DFT
  int NumInputs() const { return 1 + static_cast<int>(dft_sizes.size()); }
};

/// Inclusive range of DFT bins whose centre frequency lies in the band.
struct BinRange {
  int first = 0;
  int last = -1;
  int count() const { return last - first + 1; }
};

BinRange BandBins(int dft_size, const SpectralConfig& cfg);

/// Row-major frames x bins amplitude matrix.
struct Spectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<float> values;

  float at(int frame, int bin) const { return values[static_cast<std::size_t>(frame) * bins + bin]; }
  bool operator==(const Spectrogram&) const = default;
};

struct FeatureSet {
  std::vector<float> spectrum;
  std::vector<Spectrogram> spectrograms;  // one per cfg.dft_sizes entry

  int NumInputs() const { return 1 + static_cast<int>(spectrograms.size()); }
  bool operator==(const FeatureSet&) const = default;
};

int FrameCount(int num_samples, int dft_size);

/// Hann-windowed DFT magnitude of the signal cropped or zero-padded to
/// cfg.SpectrumLength(), restricted to the band.
std::vector<float> ComputeSpectrum(std::span<const float> samples, const SpectralConfig& cfg);

/// Hann-windowed STFT magnitudes, hop = dft_size / 2, restricted to the band.
Spectrogram ComputeSpectrogram(std::span<const float> samples, int dft_size,
                               const SpectralConfig& cfg);

FeatureSet ExtractFeatures(std::span<const float> samples, const SpectralConfig& cfg);

}  // namespace asdkit

#endif  // ASDKIT_FRONTEND_HPP_
