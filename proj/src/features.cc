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

#include "ctcasr/features.h"

#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "ctcasr/binary_io.h"
#include "ctcasr/error.h"

namespace ctcasr {
namespace {

// Plan creation in FFTW is not thread-safe; execution is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }

  // |X_k|^2 for k = 0..n/2.
  void PowerSpectrum(Eigen::VectorXd& power) {
    fftw_execute(plan_);
    power.resize(n_ / 2 + 1);
    for (int k = 0; k <= n_ / 2; ++k) {
      power[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
  }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

MelFilterbank MakeMelFilterbank(const FeatureConfig& config, int sample_rate) {
  if (sample_rate <= 0) throw Error("features: sample rate must be positive");
  if (config.num_bins < 1) throw Error("features: need at least one mel bin");
  const double nyquist = sample_rate / 2.0;
  const double high = config.high_freq_hz > 0 ? config.high_freq_hz : nyquist;
  if (high > nyquist) {
    throw Error("features: top filter edge " + std::to_string(high) +
                " Hz exceeds the Nyquist frequency " + std::to_string(nyquist) +
                " Hz of a " + std::to_string(sample_rate) + " Hz signal");
  }
  if (config.low_freq_hz < 0 || config.low_freq_hz >= high) {
    throw Error("features: invalid filterbank frequency range");
  }
  const int window = static_cast<int>(std::lround(config.window_s * sample_rate));

  MelFilterbank fb;
  fb.fft_size = NextPow2(window);
  const int num_fft_bins = fb.fft_size / 2 + 1;
  const double mel_low = HzToMel(config.low_freq_hz);
  const double mel_high = HzToMel(high);
  const double mel_step = (mel_high - mel_low) / (config.num_bins + 1);

  fb.weights = Eigen::MatrixXd::Zero(config.num_bins, num_fft_bins);
  fb.center_hz.resize(config.num_bins);
  for (int m = 0; m < config.num_bins; ++m) {
    const double left = mel_low + m * mel_step;
    const double center = left + mel_step;
    const double right = center + mel_step;
    fb.center_hz[m] = MelToHz(center);
    for (int k = 0; k < num_fft_bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / fb.fft_size);
      if (mel > left && mel < right) {
        fb.weights(m, k) = mel <= center ? (mel - left) / mel_step : (right - mel) / mel_step;
      }
    }
  }
  return fb;
}

int NumFrames(std::size_t num_samples, int window_samples, int hop_samples) {
  if (num_samples < static_cast<std::size_t>(window_samples)) return 0;
  return static_cast<int>((num_samples - window_samples) / hop_samples) + 1;
}

FeatureMatrix LogMel(const AudioBuffer& audio, const FeatureConfig& config) {
  const int rate = audio.sample_rate;
  if (rate <= 0) throw Error("features: sample rate must be positive");
  const int window = static_cast<int>(std::lround(config.window_s * rate));
  const int hop = static_cast<int>(std::lround(config.hop_s * rate));
  if (window < 2 || hop < 1) throw Error("features: window/hop too small for sample rate");
  const int num_frames = NumFrames(audio.samples.size(), window, hop);
  if (num_frames == 0) {
    throw Error("features: audio of " + std::to_string(audio.samples.size()) +
                " samples is shorter than one " + std::to_string(window) + "-sample window");
  }
  const MelFilterbank fb = MakeMelFilterbank(config, rate);

  Eigen::VectorXd hamming(window);
  for (int n = 0; n < window; ++n) {
    hamming[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (window - 1));
  }

  RealFft fft(fb.fft_size);
  Eigen::VectorXd power;
  FeatureMatrix out;
  out.frame_hop_s = static_cast<double>(hop) / rate;
  out.values.resize(num_frames, config.num_bins);
  for (int t = 0; t < num_frames; ++t) {
    double* buf = fft.input();
    const double* frame = audio.samples.data() + static_cast<std::size_t>(t) * hop;
    for (int n = 0; n < window; ++n) buf[n] = frame[n] * hamming[n];
    for (int n = window; n < fb.fft_size; ++n) buf[n] = 0.0;
    fft.PowerSpectrum(power);
    const Eigen::VectorXd energies = fb.weights * power;
    for (int m = 0; m < config.num_bins; ++m) {
      out.values(t, m) = std::log(energies[m] + config.log_floor);
    }
  }
  return out;
}

FeatureMatrix ContextWindow(const FeatureMatrix& features, int radius) {
  if (features.frames() < 1) throw Error("features: context window needs at least one frame");
  if (radius < 0) throw Error("features: negative context radius");
  const Eigen::Index T = features.frames();
  const Eigen::Index D = features.dim();
  FeatureMatrix out;
  out.frame_hop_s = features.frame_hop_s;
  out.values.resize(T, (2 * radius + 1) * D);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int o = -radius; o <= radius; ++o) {
      const Eigen::Index src = std::clamp<Eigen::Index>(t + o, 0, T - 1);
      out.values.block(t, (o + radius) * D, 1, D) = features.values.row(src);
    }
  }
  return out;
}

FeatureMatrix NormalizeMeanVariance(const FeatureMatrix& features) {
  FeatureMatrix out = features;
  const Eigen::RowVectorXd mean = features.values.colwise().mean();
  out.values.rowwise() -= mean;
  const Eigen::RowVectorXd stddev =
      (out.values.array().square().colwise().mean()).sqrt().matrix();
  for (Eigen::Index d = 0; d < out.dim(); ++d) {
    if (stddev[d] > 0) out.values.col(d) /= stddev[d];
  }
  return out;
}

FeatureMatrix ComputeFeatures(const AudioBuffer& audio, const FeatureConfig& config) {
  FeatureMatrix fm = LogMel(audio, config);
  if (config.normalize) fm = NormalizeMeanVariance(fm);
  return ContextWindow(fm, config.context_radius);
}

void WriteFeatures(std::ostream& out, const FeatureMatrix& features) {
  binio::WriteMagic(out, "FEAT");
  binio::WriteU32(out, static_cast<std::uint32_t>(features.frames()));
  binio::WriteU32(out, static_cast<std::uint32_t>(features.dim()));
  for (Eigen::Index t = 0; t < features.frames(); ++t) {
    for (Eigen::Index d = 0; d < features.dim(); ++d) {
      binio::WriteF32(out, static_cast<float>(features.values(t, d)));
    }
  }
}

FeatureMatrix ReadFeatures(std::istream& in) {
  binio::ExpectMagic(in, "FEAT", "feature file");
  const std::uint32_t T = binio::ReadU32(in);
  const std::uint32_t D = binio::ReadU32(in);
  FeatureMatrix fm;
  fm.values.resize(T, D);
  for (std::uint32_t t = 0; t < T; ++t) {
    for (std::uint32_t d = 0; d < D; ++d) fm.values(t, d) = binio::ReadF32(in);
  }
  if (!fm.values.allFinite()) throw FormatError("feature file: non-finite value");
  return fm;
}

void SaveFeatures(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteFeatures(out, features);
}

FeatureMatrix LoadFeatures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return ReadFeatures(in);
}

}  // namespace ctcasr
