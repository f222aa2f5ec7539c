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

#ifndef CTCASR_NETWORK_H_
#define CTCASR_NETWORK_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ctcasr/features.h"

namespace ctcasr {

enum class Architecture { kDnn, kRdnn, kBrdnn };

std::string_view ArchitectureName(Architecture arch);
// Accepts "dnn", "rdnn", "brdnn". Throws Error otherwise.
Architecture ParseArchitecture(std::string_view name);

struct NetworkConfig {
  Architecture architecture = Architecture::kBrdnn;
  int input_dim = 483;
  int output_dim = 32;
  std::vector<int> layer_sizes = {1824, 1824, 1824, 1824, 1824};
  // 0-based index into layer_sizes; ignored for kDnn.
  int recurrent_layer = 2;
  // Upper bound of the rectifier in recurrent architectures. The feedforward
  // network uses the plain rectifier max(z, 0).
  double activation_clip = 20.0;

  bool recurrent() const { return architecture != Architecture::kDnn; }
  // Throws Error when widths, dims, recurrent index or clip are invalid.
  void Validate() const;
};

// Weight matrices are stored output x input, so a layer computes W * h + b.
struct NetworkParams {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd output_weights;
  Eigen::VectorXd output_bias;
  Eigen::MatrixXd forward_recurrent;   // rdnn, brdnn
  Eigen::MatrixXd backward_recurrent;  // brdnn only

  // All-zero parameters shaped for `config`.
  static NetworkParams Zeros(const NetworkConfig& config);

  // Every tensor in canonical order (layer weights and biases interleaved,
  // then output weights, output bias, forward and backward recurrence).
  // Empty recurrent matrices are skipped.
  std::vector<Eigen::Map<Eigen::MatrixXd>> Tensors();
  std::vector<Eigen::Map<const Eigen::MatrixXd>> Tensors() const;

  std::size_t NumParameters() const;
  bool AllFinite() const;
  bool SameShape(const NetworkParams& other) const;

  // this += scale * other
  void AddScaled(const NetworkParams& other, double scale);
  void Scale(double factor);
  double Dot(const NetworkParams& other) const;
};

// Free parameter count implied by a configuration (weights + biases,
// including recurrent matrices).
std::size_t NumParameters(const NetworkConfig& config);

// T x |alphabet| matrix; row t is the distribution p(c | x_t).
struct PosteriorGrid {
  Eigen::MatrixXd probs;

  Eigen::Index frames() const { return probs.rows(); }
  Eigen::Index symbols() const { return probs.cols(); }
};

// Per-utterance activations retained for the backward pass. Matrices are
// width x T (one column per frame).
struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;   // per hidden layer; for the recurrent
                                      // layer, the shared feedforward part
  std::vector<Eigen::MatrixXd> post;  // per hidden layer
  Eigen::MatrixXd forward_pre, forward_post;    // recurrent layer, forward time
  Eigen::MatrixXd backward_pre, backward_post;  // brdnn, backward time
  Eigen::MatrixXd logits;                       // output_dim x T
};

struct ForwardResult {
  PosteriorGrid grid;
  ForwardCache cache;
};

double ClippedRectifier(double z, double clip = 20.0);

// Row-wise softmax of a T x K logit matrix with max subtraction.
Eigen::MatrixXd Softmax(const Eigen::MatrixXd& logits);
Eigen::MatrixXd LogSoftmax(const Eigen::MatrixXd& logits);

// Runs the network over an utterance. Throws DimensionError when the input
// width or parameter shapes disagree with `config`, and Error when an
// activation becomes non-finite.
ForwardResult Forward(const NetworkParams& params, const NetworkConfig& config,
                      const FeatureMatrix& input);

// Exact gradient by backpropagation through the whole utterance.
// `grad_logits` is T x output_dim: d loss / d pre-softmax outputs.
NetworkParams Backward(const NetworkParams& params, const NetworkConfig& config,
                       const ForwardCache& cache, const Eigen::MatrixXd& grad_logits);

enum class TensorPrecision : std::uint32_t { kFloat32 = 4, kFloat64 = 8 };

// NETP binary: "NETP", u32 version, config block, u32 scalar width, then
// each tensor as u32 rows, u32 cols, row-major little-endian values.
void WriteNetwork(std::ostream& out, const NetworkConfig& config,
                  const NetworkParams& params,
                  TensorPrecision precision = TensorPrecision::kFloat32);
std::pair<NetworkConfig, NetworkParams> ReadNetwork(std::istream& in);
void SaveNetwork(const std::filesystem::path& path, const NetworkConfig& config,
                 const NetworkParams& params,
                 TensorPrecision precision = TensorPrecision::kFloat32);
std::pair<NetworkConfig, NetworkParams> LoadNetwork(const std::filesystem::path& path);

}  // namespace ctcasr

#endif  // CTCASR_NETWORK_H_
