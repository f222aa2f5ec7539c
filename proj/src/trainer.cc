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

#include "ctcasr/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ctcasr/binary_io.h"
#include "ctcasr/ctc.h"
#include "ctcasr/decoder.h"
#include "ctcasr/error.h"
#include "ctcasr/evaluation.h"
#include "ctcasr/parallel.h"

namespace ctcasr {
namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

void FillUniform(Eigen::MatrixXd& m, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  }
}

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

void Log(const TrainOptions& options, const std::string& msg) {
  if (options.log) options.log(msg);
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(initial_lr > 0)) throw Error("train: initial learning rate must be positive");
  if (!(lr_decay_divisor > 0)) throw Error("train: learning-rate divisor must be positive");
  if (!(max_momentum >= 0 && max_momentum < 1)) throw Error("train: momentum must lie in [0, 1)");
  if (epochs < 0) throw Error("train: epochs must be non-negative");
  if (batch_size < 1) throw Error("train: batch size must be positive");
  if (momentum_warmup_steps < 0) throw Error("train: momentum warm-up must be non-negative");
}

OptimizerState OptimizerState::For(const NetworkParams& params) {
  OptimizerState s;
  s.velocity = params;
  s.velocity.Scale(0.0);
  return s;
}

NetworkParams InitParams(const NetworkConfig& config, std::uint64_t seed) {
  NetworkParams p = NetworkParams::Zeros(config);
  std::mt19937_64 rng(seed);
  for (auto& w : p.weights) FillUniform(w, rng);
  FillUniform(p.output_weights, rng);
  if (p.forward_recurrent.size() > 0) FillUniform(p.forward_recurrent, rng);
  if (p.backward_recurrent.size() > 0) FillUniform(p.backward_recurrent, rng);
  return p;
}

double LrAtEpoch(const TrainConfig& config, int epoch) {
  if (epoch < 0) throw Error("train: negative epoch");
  return config.initial_lr / std::pow(config.lr_decay_divisor, epoch);
}

double MomentumAtStep(const TrainConfig& config, std::uint64_t step) {
  if (config.momentum_warmup_steps <= 0) return config.max_momentum;
  const double frac = std::min(1.0, static_cast<double>(step) / config.momentum_warmup_steps);
  return config.max_momentum * frac;
}

NagStepResult NagStep(NetworkParams& params, OptimizerState& state, const GradientFn& gradient,
                      double lr, double momentum) {
  if (!state.velocity.SameShape(params)) throw DimensionError("nag: velocity shape mismatch");
  ++state.step;
  NetworkParams lookahead = params;
  if (momentum != 0.0) lookahead.AddScaled(state.velocity, momentum);
  const NetworkParams g = gradient(lookahead);
  if (!g.SameShape(params)) throw DimensionError("nag: gradient shape mismatch");
  if (!g.AllFinite()) return {false};

  auto v = state.velocity.Tensors();
  auto theta = params.Tensors();
  const auto grad = g.Tensors();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = momentum * v[i] - lr * grad[i];
    theta[i] += v[i];
  }
  return {true};
}

UtteranceLoss UtteranceGradient(const NetworkParams& params, const NetworkConfig& config,
                                const TrainingExample& example, const Alphabet& alphabet) {
  const ForwardResult fwd = Forward(params, config, example.features);
  const CtcLossResult ctc = CtcLossAndGradientFromLogProbs(
      LogSoftmax(fwd.cache.logits.transpose()), CtcTarget(example.labels, alphabet));
  UtteranceLoss out;
  out.nll = -ctc.log_likelihood;
  out.gradient = Backward(params, config, fwd.cache, ctc.grad_logits);
  out.greedy_text = CollapseToText(GreedyPath(fwd.grid), alphabet);
  return out;
}

TrainResult Train(const std::vector<TrainingExample>& examples, const NetworkConfig& net_config,
                  const TrainConfig& config, const Alphabet& alphabet, NetworkParams params,
                  std::optional<OptimizerState> state, const TrainOptions& options) {
  config.Validate();
  net_config.Validate();
  TrainResult result;
  result.state = state ? std::move(*state) : OptimizerState::For(params);
  if (!result.state.velocity.SameShape(params)) {
    throw DimensionError("train: optimizer state does not match the network");
  }

  std::vector<const TrainingExample*> usable;
  std::size_t skipped = 0;
  for (const auto& ex : examples) {
    const CtcTarget target(ex.labels, alphabet);
    if (ex.features.frames() < target.MinimumFrames()) {
      Log(options, "warning: skipping '" + ex.id + "': " + std::to_string(ex.labels.size()) +
                       " labels need " + std::to_string(target.MinimumFrames()) +
                       " frames, have " + std::to_string(ex.features.frames()));
      ++skipped;
      continue;
    }
    usable.push_back(&ex);
  }

  for (int epoch = result.state.epoch; epoch < config.epochs; ++epoch) {
    const double lr = LrAtEpoch(config, epoch);
    const auto order = EpochOrder(usable.size(), config.seed, epoch);
    double epoch_loss = 0.0;
    ErrorReport char_errors;
    std::size_t failed_steps = 0;

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<UtteranceLoss> losses(end - start);
      const GradientFn grad_fn = [&](const NetworkParams& at) {
        try {
          ParallelFor(losses.size(), config.workers, [&](std::size_t i) {
            losses[i] = UtteranceGradient(at, net_config, *usable[order[start + i]], alphabet);
          });
        } catch (const Error& e) {
          Log(options, std::string("warning: gradient evaluation failed: ") + e.what());
          NetworkParams bad = at;
          bad.Scale(std::numeric_limits<double>::quiet_NaN());
          losses.clear();
          return bad;
        }
        NetworkParams total = std::move(losses[0].gradient);
        for (std::size_t i = 1; i < losses.size(); ++i) total.AddScaled(losses[i].gradient, 1.0);
        return total;
      };
      const NagStepResult step =
          NagStep(params, result.state, grad_fn, lr, MomentumAtStep(config, result.state.step));
      if (!step.applied) {
        ++failed_steps;
        Log(options, "warning: non-finite gradient, update skipped");
      }
      for (std::size_t i = 0; i < losses.size(); ++i) {
        const TrainingExample& ex = *usable[order[start + i]];
        epoch_loss += losses[i].nll;
        if (!ex.transcript.empty()) char_errors += CharErrors(ex.transcript, losses[i].greedy_text);
      }
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.lr = lr;
    m.loss = epoch_loss;
    m.train_cer = char_errors.reference_length > 0 ? char_errors.rate() : 0.0;
    m.skipped = skipped + failed_steps;
    result.state.epoch = epoch + 1;
    result.metrics.push_back(m);

    std::ostringstream msg;
    msg << "epoch " << epoch << " lr " << lr << " loss " << epoch_loss << " train_cer "
        << m.train_cer;
    Log(options, msg.str());
    if (!options.checkpoint_dir.empty()) {
      std::ostringstream name;
      name << "checkpoint_" << std::setw(4) << std::setfill('0') << epoch + 1 << ".ckpt";
      std::filesystem::create_directories(options.checkpoint_dir);
      SaveCheckpoint(options.checkpoint_dir / name.str(), net_config, params, result.state);
    }
    if (options.on_epoch_end) options.on_epoch_end(m, params);
  }
  result.params = std::move(params);
  return result;
}

void WriteCheckpoint(std::ostream& out, const NetworkConfig& config, const NetworkParams& params,
                     const OptimizerState& state) {
  binio::WriteMagic(out, "CKPT");
  binio::WriteU32(out, kCheckpointVersion);
  binio::WriteU32(out, static_cast<std::uint32_t>(state.epoch));
  binio::WriteU32(out, static_cast<std::uint32_t>(state.step & 0xFFFFFFFFu));
  binio::WriteU32(out, static_cast<std::uint32_t>(state.step >> 32));
  WriteNetwork(out, config, params, TensorPrecision::kFloat64);
  WriteNetwork(out, config, state.velocity, TensorPrecision::kFloat64);
}

Checkpoint ReadCheckpoint(std::istream& in) {
  binio::ExpectMagic(in, "CKPT", "checkpoint");
  const std::uint32_t version = binio::ReadU32(in);
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.state.epoch = static_cast<int>(binio::ReadU32(in));
  const std::uint64_t lo = binio::ReadU32(in);
  const std::uint64_t hi = binio::ReadU32(in);
  ck.state.step = lo | (hi << 32);
  std::tie(ck.config, ck.params) = ReadNetwork(in);
  auto [vconfig, velocity] = ReadNetwork(in);
  ck.state.velocity = std::move(velocity);
  if (!ck.state.velocity.SameShape(ck.params)) throw FormatError("checkpoint: velocity shape mismatch");
  return ck;
}

void SaveCheckpoint(const std::filesystem::path& path, const NetworkConfig& config,
                    const NetworkParams& params, const OptimizerState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteCheckpoint(out, config, params, state);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return ReadCheckpoint(in);
}

std::pair<NetworkConfig, NetworkParams> LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  in.seekg(0);
  if (std::string(magic, 4) == "CKPT") {
    Checkpoint ck = ReadCheckpoint(in);
    return {ck.config, std::move(ck.params)};
  }
  return ReadNetwork(in);
}

void WriteMetricsCsv(std::ostream& out, const std::vector<EpochMetrics>& metrics) {
  out << "epoch,lr,loss,train_cer\n";
  out << std::setprecision(10);
  for (const auto& m : metrics) {
    out << m.epoch << ',' << m.lr << ',' << m.loss << ',' << m.train_cer << '\n';
  }
}

}  // namespace ctcasr
