// Copyright 2026 The ctcasr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTCASR_FEATURES_H_
#define CTCASR_FEATURES_H_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "ctcasr/wav.h"

namespace ctcasr {

// T frames by D values, one row per frame.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  double frame_hop_s = 0.010;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

struct FeatureConfig {
  int num_bins = 23;
  double window_s = 0.025;
  double hop_s = 0.010;
  double low_freq_hz = 20.0;
  double high_freq_hz = 0.0;  // <= 0 means the Nyquist frequency
  double log_floor = 1e-10;
  int context_radius = 10;
  bool normalize = false;
};

// Triangular filters on the HTK mel scale, evaluated on the one-sided FFT
// grid. weights is num_bins x (fft_size / 2 + 1).
struct MelFilterbank {
  Eigen::MatrixXd weights;
  std::vector<double> center_hz;
  int fft_size = 0;
};

double HzToMel(double hz);
double MelToHz(double mel);

MelFilterbank MakeMelFilterbank(const FeatureConfig& config, int sample_rate);

// Number of frames the framing produces for n samples: floor((n - win) / hop)
// + 1, or 0 when n < win.
int NumFrames(std::size_t num_samples, int window_samples, int hop_samples);

// Hamming-windowed power spectrum through a mel filterbank, then
// log(energy + floor). Throws Error when the audio is shorter than one
// window or when the top filter edge exceeds the Nyquist frequency.
FeatureMatrix LogMel(const AudioBuffer& audio, const FeatureConfig& config);

// Stacks frames t-radius..t+radius for every t, replicating the first and
// last frames at the edges. Output keeps T and has (2*radius+1)*D columns.
FeatureMatrix ContextWindow(const FeatureMatrix& features, int radius);

// Per-dimension zero mean / unit variance over the utterance.
FeatureMatrix NormalizeMeanVariance(const FeatureMatrix& features);

// LogMel, optional normalization, then ContextWindow.
FeatureMatrix ComputeFeatures(const AudioBuffer& audio, const FeatureConfig& config);

// FEAT binary: "FEAT", u32 T, u32 D, T*D f32 row-major, all little-endian.
void WriteFeatures(std::ostream& out, const FeatureMatrix& features);
FeatureMatrix ReadFeatures(std::istream& in);
void SaveFeatures(const std::filesystem::path& path, const FeatureMatrix& features);
FeatureMatrix LoadFeatures(const std::filesystem::path& path);

}  // namespace ctcasr

#endif  // CTCASR_FEATURES_H_
