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

#include "ctcasr/network.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ctcasr/binary_io.h"
#include "ctcasr/error.h"

namespace ctcasr {
namespace {

constexpr std::uint32_t kNetworkFormatVersion = 1;

template <typename Self, typename MapT>
std::vector<MapT> CollectTensors(Self& p) {
  std::vector<MapT> out;
  auto add = [&](auto& m) {
    if (m.size() > 0) out.emplace_back(m.data(), m.rows(), m.cols());
  };
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    add(p.weights[i]);
    add(p.biases[i]);
  }
  add(p.output_weights);
  add(p.output_bias);
  add(p.forward_recurrent);
  add(p.backward_recurrent);
  return out;
}

// Rectifier applied elementwise; clip <= 0 means unbounded.
Eigen::MatrixXd Activate(const Eigen::MatrixXd& z, double clip) {
  if (clip > 0) return z.cwiseMax(0.0).cwiseMin(clip);
  return z.cwiseMax(0.0);
}

// Subgradient: 1 strictly inside the linear region, 0 elsewhere.
Eigen::MatrixXd ActivationMask(const Eigen::MatrixXd& z, double clip) {
  if (clip > 0) return ((z.array() > 0.0) && (z.array() < clip)).cast<double>().matrix();
  return (z.array() > 0.0).cast<double>().matrix();
}

void CheckShape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError("network: " + name + " is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
}

void CheckParams(const NetworkParams& params, const NetworkConfig& config) {
  const std::size_t L = config.layer_sizes.size();
  if (params.weights.size() != L || params.biases.size() != L) {
    throw DimensionError("network: parameter layer count does not match config");
  }
  int prev = config.input_dim;
  for (std::size_t i = 0; i < L; ++i) {
    const int w = config.layer_sizes[i];
    CheckShape(params.weights[i], w, prev, "weights[" + std::to_string(i) + "]");
    CheckShape(params.biases[i], w, 1, "biases[" + std::to_string(i) + "]");
    prev = w;
  }
  CheckShape(params.output_weights, config.output_dim, prev, "output_weights");
  CheckShape(params.output_bias, config.output_dim, 1, "output_bias");
  const int r = config.recurrent() ? config.layer_sizes[config.recurrent_layer] : 0;
  CheckShape(params.forward_recurrent, r, r, "forward_recurrent");
  const int rb = config.architecture == Architecture::kBrdnn ? r : 0;
  CheckShape(params.backward_recurrent, rb, rb, "backward_recurrent");
}

}  // namespace

std::string_view ArchitectureName(Architecture arch) {
  switch (arch) {
    case Architecture::kDnn: return "dnn";
    case Architecture::kRdnn: return "rdnn";
    case Architecture::kBrdnn: return "brdnn";
  }
  return "unknown";
}

Architecture ParseArchitecture(std::string_view name) {
  if (name == "dnn") return Architecture::kDnn;
  if (name == "rdnn") return Architecture::kRdnn;
  if (name == "brdnn") return Architecture::kBrdnn;
  throw Error("unknown architecture '" + std::string(name) + "' (expected dnn, rdnn or brdnn)");
}

void NetworkConfig::Validate() const {
  if (input_dim < 1 || output_dim < 1) throw Error("network: input and output dims must be positive");
  if (layer_sizes.empty()) throw Error("network: need at least one hidden layer");
  for (int w : layer_sizes) {
    if (w < 1) throw Error("network: hidden widths must be positive");
  }
  if (!(activation_clip > 0)) throw Error("network: activation clip must be positive");
  if (recurrent() &&
      (recurrent_layer < 0 || recurrent_layer >= static_cast<int>(layer_sizes.size()))) {
    throw Error("network: recurrent layer index " + std::to_string(recurrent_layer) +
                " out of range");
  }
}

NetworkParams NetworkParams::Zeros(const NetworkConfig& config) {
  config.Validate();
  NetworkParams p;
  int prev = config.input_dim;
  for (int w : config.layer_sizes) {
    p.weights.push_back(Eigen::MatrixXd::Zero(w, prev));
    p.biases.push_back(Eigen::VectorXd::Zero(w));
    prev = w;
  }
  p.output_weights = Eigen::MatrixXd::Zero(config.output_dim, prev);
  p.output_bias = Eigen::VectorXd::Zero(config.output_dim);
  if (config.recurrent()) {
    const int r = config.layer_sizes[config.recurrent_layer];
    p.forward_recurrent = Eigen::MatrixXd::Zero(r, r);
    if (config.architecture == Architecture::kBrdnn) {
      p.backward_recurrent = Eigen::MatrixXd::Zero(r, r);
    }
  }
  return p;
}

std::vector<Eigen::Map<Eigen::MatrixXd>> NetworkParams::Tensors() {
  return CollectTensors<NetworkParams, Eigen::Map<Eigen::MatrixXd>>(*this);
}

std::vector<Eigen::Map<const Eigen::MatrixXd>> NetworkParams::Tensors() const {
  return CollectTensors<const NetworkParams, Eigen::Map<const Eigen::MatrixXd>>(*this);
}

std::size_t NetworkParams::NumParameters() const {
  std::size_t n = 0;
  for (const auto& t : Tensors()) n += static_cast<std::size_t>(t.size());
  return n;
}

bool NetworkParams::AllFinite() const {
  for (const auto& t : Tensors()) {
    if (!t.allFinite()) return false;
  }
  return true;
}

bool NetworkParams::SameShape(const NetworkParams& other) const {
  const auto a = Tensors();
  const auto b = other.Tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) return false;
  }
  return true;
}

void NetworkParams::AddScaled(const NetworkParams& other, double scale) {
  if (!SameShape(other)) throw DimensionError("network: AddScaled on mismatched parameters");
  auto a = Tensors();
  const auto b = other.Tensors();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
}

void NetworkParams::Scale(double factor) {
  for (auto& t : Tensors()) t *= factor;
}

double NetworkParams::Dot(const NetworkParams& other) const {
  if (!SameShape(other)) throw DimensionError("network: Dot on mismatched parameters");
  const auto a = Tensors();
  const auto b = other.Tensors();
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

std::size_t NumParameters(const NetworkConfig& config) {
  config.Validate();
  std::size_t n = 0;
  std::size_t prev = static_cast<std::size_t>(config.input_dim);
  for (int w : config.layer_sizes) {
    n += prev * w + w;
    prev = static_cast<std::size_t>(w);
  }
  n += prev * config.output_dim + config.output_dim;
  if (config.recurrent()) {
    const std::size_t r = static_cast<std::size_t>(config.layer_sizes[config.recurrent_layer]);
    n += r * r * (config.architecture == Architecture::kBrdnn ? 2 : 1);
  }
  return n;
}

double ClippedRectifier(double z, double clip) { return std::min(std::max(z, 0.0), clip); }

Eigen::MatrixXd Softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    out.row(t) = (logits.row(t).array() - m).exp().matrix();
    out.row(t) /= out.row(t).sum();
  }
  return out;
}

Eigen::MatrixXd LogSoftmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

ForwardResult Forward(const NetworkParams& params, const NetworkConfig& config,
                      const FeatureMatrix& input) {
  config.Validate();
  CheckParams(params, config);
  if (input.dim() != config.input_dim) {
    throw DimensionError("network: input has " + std::to_string(input.dim()) +
                         " columns, expected " + std::to_string(config.input_dim));
  }
  const Eigen::Index T = input.frames();
  const double clip = config.recurrent() ? config.activation_clip : 0.0;
  const std::size_t L = config.layer_sizes.size();

  ForwardResult result;
  ForwardCache& c = result.cache;
  c.input = input.values.transpose();
  c.pre.resize(L);
  c.post.resize(L);
  const Eigen::MatrixXd* below = &c.input;
  for (std::size_t i = 0; i < L; ++i) {
    c.pre[i] = params.weights[i] * (*below);
    c.pre[i].colwise() += params.biases[i];
    if (config.recurrent() && static_cast<int>(i) == config.recurrent_layer) {
      const Eigen::Index w = c.pre[i].rows();
      c.forward_pre = c.pre[i];
      c.forward_post.resize(w, T);
      for (Eigen::Index t = 0; t < T; ++t) {
        if (t > 0) c.forward_pre.col(t) += params.forward_recurrent * c.forward_post.col(t - 1);
        c.forward_post.col(t) = Activate(c.forward_pre.col(t), clip);
      }
      if (config.architecture == Architecture::kBrdnn) {
        c.backward_pre = c.pre[i];
        c.backward_post.resize(w, T);
        for (Eigen::Index t = T - 1; t >= 0; --t) {
          if (t + 1 < T) c.backward_pre.col(t) += params.backward_recurrent * c.backward_post.col(t + 1);
          c.backward_post.col(t) = Activate(c.backward_pre.col(t), clip);
        }
        c.post[i] = c.forward_post + c.backward_post;
      } else {
        c.post[i] = c.forward_post;
      }
    } else {
      c.post[i] = Activate(c.pre[i], clip);
    }
    if (!c.post[i].allFinite()) {
      throw Error("network: non-finite activation in hidden layer " + std::to_string(i) +
                  " (training diverged?)");
    }
    below = &c.post[i];
  }
  c.logits = params.output_weights * (*below);
  c.logits.colwise() += params.output_bias;
  if (!c.logits.allFinite()) throw Error("network: non-finite output logits");
  result.grid.probs = Softmax(c.logits.transpose());
  return result;
}

NetworkParams Backward(const NetworkParams& params, const NetworkConfig& config,
                       const ForwardCache& cache, const Eigen::MatrixXd& grad_logits) {
  CheckParams(params, config);
  const Eigen::Index T = cache.input.cols();
  if (grad_logits.rows() != T || grad_logits.cols() != config.output_dim) {
    throw DimensionError("network: upstream gradient is " + std::to_string(grad_logits.rows()) +
                         "x" + std::to_string(grad_logits.cols()) + ", expected " +
                         std::to_string(T) + "x" + std::to_string(config.output_dim));
  }
  if (cache.post.size() != config.layer_sizes.size()) {
    throw DimensionError("network: forward cache does not match config");
  }
  const double clip = config.recurrent() ? config.activation_clip : 0.0;
  const std::size_t L = config.layer_sizes.size();

  NetworkParams g = NetworkParams::Zeros(config);
  const Eigen::MatrixXd d_out = grad_logits.transpose();
  g.output_weights.noalias() = d_out * cache.post[L - 1].transpose();
  g.output_bias = d_out.rowwise().sum();
  Eigen::MatrixXd d_post = params.output_weights.transpose() * d_out;

  for (std::size_t ii = L; ii-- > 0;) {
    const Eigen::MatrixXd& below = ii == 0 ? cache.input : cache.post[ii - 1];
    Eigen::MatrixXd d_pre;
    if (config.recurrent() && static_cast<int>(ii) == config.recurrent_layer) {
      const Eigen::Index w = d_post.rows();
      const Eigen::MatrixXd mask_f = ActivationMask(cache.forward_pre, clip);
      Eigen::MatrixXd dz_f(w, T);
      Eigen::VectorXd carry = Eigen::VectorXd::Zero(w);
      for (Eigen::Index t = T - 1; t >= 0; --t) {
        dz_f.col(t) = (d_post.col(t) + carry).cwiseProduct(mask_f.col(t));
        carry.noalias() = params.forward_recurrent.transpose() * dz_f.col(t);
      }
      if (T > 1) {
        g.forward_recurrent.noalias() =
            dz_f.rightCols(T - 1) * cache.forward_post.leftCols(T - 1).transpose();
      }
      d_pre = dz_f;
      if (config.architecture == Architecture::kBrdnn) {
        const Eigen::MatrixXd mask_b = ActivationMask(cache.backward_pre, clip);
        Eigen::MatrixXd dz_b(w, T);
        carry.setZero();
        for (Eigen::Index t = 0; t < T; ++t) {
          dz_b.col(t) = (d_post.col(t) + carry).cwiseProduct(mask_b.col(t));
          carry.noalias() = params.backward_recurrent.transpose() * dz_b.col(t);
        }
        if (T > 1) {
          g.backward_recurrent.noalias() =
              dz_b.leftCols(T - 1) * cache.backward_post.rightCols(T - 1).transpose();
        }
        d_pre += dz_b;
      }
    } else {
      d_pre = d_post.cwiseProduct(ActivationMask(cache.pre[ii], clip));
    }
    g.weights[ii].noalias() = d_pre * below.transpose();
    g.biases[ii] = d_pre.rowwise().sum();
    if (ii > 0) d_post = params.weights[ii].transpose() * d_pre;
  }
  return g;
}

void WriteNetwork(std::ostream& out, const NetworkConfig& config,
                  const NetworkParams& params, TensorPrecision precision) {
  config.Validate();
  CheckParams(params, config);
  binio::WriteMagic(out, "NETP");
  binio::WriteU32(out, kNetworkFormatVersion);
  binio::WriteU32(out, static_cast<std::uint32_t>(config.architecture));
  binio::WriteU32(out, static_cast<std::uint32_t>(config.input_dim));
  binio::WriteU32(out, static_cast<std::uint32_t>(config.output_dim));
  binio::WriteU32(out, static_cast<std::uint32_t>(config.layer_sizes.size()));
  for (int w : config.layer_sizes) binio::WriteU32(out, static_cast<std::uint32_t>(w));
  binio::WriteI32(out, config.recurrent_layer);
  binio::WriteF64(out, config.activation_clip);
  binio::WriteU32(out, static_cast<std::uint32_t>(precision));
  for (const auto& t : params.Tensors()) {
    binio::WriteU32(out, static_cast<std::uint32_t>(t.rows()));
    binio::WriteU32(out, static_cast<std::uint32_t>(t.cols()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index col = 0; col < t.cols(); ++col) {
        if (precision == TensorPrecision::kFloat32) {
          binio::WriteF32(out, static_cast<float>(t(r, col)));
        } else {
          binio::WriteF64(out, t(r, col));
        }
      }
    }
  }
}

std::pair<NetworkConfig, NetworkParams> ReadNetwork(std::istream& in) {
  binio::ExpectMagic(in, "NETP", "network file");
  const std::uint32_t version = binio::ReadU32(in);
  if (version != kNetworkFormatVersion) {
    throw FormatError("network file: unsupported version " + std::to_string(version));
  }
  NetworkConfig config;
  const std::uint32_t arch = binio::ReadU32(in);
  if (arch > static_cast<std::uint32_t>(Architecture::kBrdnn)) {
    throw FormatError("network file: bad architecture code");
  }
  config.architecture = static_cast<Architecture>(arch);
  config.input_dim = static_cast<int>(binio::ReadU32(in));
  config.output_dim = static_cast<int>(binio::ReadU32(in));
  const std::uint32_t layers = binio::ReadU32(in);
  if (layers > 1024) throw FormatError("network file: implausible layer count");
  config.layer_sizes.resize(layers);
  for (auto& w : config.layer_sizes) w = static_cast<int>(binio::ReadU32(in));
  config.recurrent_layer = binio::ReadI32(in);
  config.activation_clip = binio::ReadF64(in);
  try {
    config.Validate();
  } catch (const Error& e) {
    throw FormatError(std::string("network file: ") + e.what());
  }
  const std::uint32_t width = binio::ReadU32(in);
  if (width != 4 && width != 8) throw FormatError("network file: bad scalar width");

  NetworkParams params = NetworkParams::Zeros(config);
  for (auto& t : params.Tensors()) {
    const std::uint32_t rows = binio::ReadU32(in);
    const std::uint32_t cols = binio::ReadU32(in);
    if (rows != t.rows() || cols != t.cols()) {
      throw FormatError("network file: tensor shape does not match config");
    }
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index col = 0; col < t.cols(); ++col) {
        t(r, col) = width == 4 ? binio::ReadF32(in) : binio::ReadF64(in);
      }
    }
  }
  if (!params.AllFinite()) throw FormatError("network file: non-finite parameter");
  return {config, std::move(params)};
}

void SaveNetwork(const std::filesystem::path& path, const NetworkConfig& config,
                 const NetworkParams& params, TensorPrecision precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteNetwork(out, config, params, precision);
}

std::pair<NetworkConfig, NetworkParams> LoadNetwork(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return ReadNetwork(in);
}

}  // namespace ctcasr
