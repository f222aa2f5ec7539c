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

#ifndef CTCASR_TRAINER_H_
#define CTCASR_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctcasr/alphabet.h"
#include "ctcasr/features.h"
#include "ctcasr/network.h"

namespace ctcasr {

struct TrainConfig {
  double initial_lr = 1e-5;
  double max_momentum = 0.95;
  double lr_decay_divisor = 1.2;
  int epochs = 20;
  std::uint64_t seed = 0;
  int batch_size = 1;
  // Linear ramp of the momentum from 0 to max_momentum over this many
  // updates; 0 keeps it constant.
  int momentum_warmup_steps = 0;
  int workers = 1;

  // Throws Error unless rates/divisor/batch are positive, epochs >= 0 and
  // 0 <= momentum < 1.
  void Validate() const;
};

struct OptimizerState {
  NetworkParams velocity;
  int epoch = 0;          // epochs completed
  std::uint64_t step = 0; // updates applied or attempted

  static OptimizerState For(const NetworkParams& params);
};

// Uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases. Same
// seed, same bits.
NetworkParams InitParams(const NetworkConfig& config, std::uint64_t seed);

// initial_lr / divisor^epoch, epoch 0-based.
double LrAtEpoch(const TrainConfig& config, int epoch);

// Momentum used for update number `step` (0-based).
double MomentumAtStep(const TrainConfig& config, std::uint64_t step);

using GradientFn = std::function<NetworkParams(const NetworkParams&)>;

struct NagStepResult {
  bool applied = true;  // false when the gradient was non-finite
};

// One Nesterov update: v <- mu v - lr grad(theta + mu v); theta <- theta + v.
// A non-finite gradient leaves params and velocity untouched.
NagStepResult NagStep(NetworkParams& params, OptimizerState& state, const GradientFn& gradient,
                      double lr, double momentum);

struct TrainingExample {
  std::string id;
  FeatureMatrix features;
  LabelSequence labels;
  std::string transcript;
};

struct UtteranceLoss {
  double nll = 0.0;
  NetworkParams gradient;
  std::string greedy_text;
};

// CTC negative log-likelihood of one utterance and its gradient with
// respect to every parameter. Throws Error for an infeasible target.
UtteranceLoss UtteranceGradient(const NetworkParams& params, const NetworkConfig& config,
                                const TrainingExample& example, const Alphabet& alphabet);

struct EpochMetrics {
  int epoch = 0;  // 0-based
  double lr = 0.0;
  double loss = 0.0;       // summed NLL over the epoch
  double train_cer = 0.0;  // greedy CER at the evaluated parameters
  std::size_t skipped = 0;
};

struct TrainOptions {
  // Written after every epoch as checkpoint_NNNN.ckpt, NNNN being the number
  // of completed epochs, when set.
  std::filesystem::path checkpoint_dir;
  std::function<void(const std::string&)> log;
  std::function<void(const EpochMetrics&, const NetworkParams&)> on_epoch_end;
};

struct TrainResult {
  NetworkParams params;
  OptimizerState state;
  std::vector<EpochMetrics> metrics;
};

// Runs epochs state.epoch .. config.epochs-1. The utterance order of each
// epoch is a shuffle seeded by (seed, epoch), so resuming from a checkpoint
// repeats the uninterrupted run. Infeasible utterances are skipped.
TrainResult Train(const std::vector<TrainingExample>& examples, const NetworkConfig& net_config,
                  const TrainConfig& config, const Alphabet& alphabet, NetworkParams params,
                  std::optional<OptimizerState> state = std::nullopt,
                  const TrainOptions& options = {});

// CKPT binary: "CKPT", u32 version, u32 epoch, u64 step, then the network
// and the velocity as float64 NETP blocks.
void WriteCheckpoint(std::ostream& out, const NetworkConfig& config, const NetworkParams& params,
                     const OptimizerState& state);
struct Checkpoint {
  NetworkConfig config;
  NetworkParams params;
  OptimizerState state;
};
Checkpoint ReadCheckpoint(std::istream& in);
void SaveCheckpoint(const std::filesystem::path& path, const NetworkConfig& config,
                    const NetworkParams& params, const OptimizerState& state);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Loads either a CKPT checkpoint or a bare NETP network.
std::pair<NetworkConfig, NetworkParams> LoadModel(const std::filesystem::path& path);

void WriteMetricsCsv(std::ostream& out, const std::vector<EpochMetrics>& metrics);

}  // namespace ctcasr

#endif  // CTCASR_TRAINER_H_
