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

#include <doctest.h>

#include <random>
#include <sstream>

#include "ctcasr/error.h"
#include "ctcasr/network.h"
#include "ctcasr/trainer.h"
#include "oracles.h"

using namespace ctcasr;

namespace {

NetworkConfig SmallConfig(Architecture arch, int in = 4, int out = 5) {
  NetworkConfig c;
  c.architecture = arch;
  c.input_dim = in;
  c.output_dim = out;
  c.layer_sizes = {6, 8, 7};
  c.recurrent_layer = 1;
  return c;
}

NetworkParams RandomParams(const NetworkConfig& c, std::uint64_t seed, double scale = 0.5) {
  NetworkParams p = NetworkParams::Zeros(c);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  for (auto& t : p.Tensors()) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = n(rng);
  }
  return p;
}

FeatureMatrix RandomInput(int T, int D, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  FeatureMatrix fm;
  fm.values.resize(T, D);
  for (Eigen::Index i = 0; i < fm.values.size(); ++i) fm.values.data()[i] = n(rng);
  return fm;
}

const Architecture kAll[] = {Architecture::kDnn, Architecture::kRdnn, Architecture::kBrdnn};

}  // namespace

TEST_CASE("clipped rectifier") {
  CHECK(ClippedRectifier(-3) == 0);
  CHECK(ClippedRectifier(5) == 5);
  CHECK(ClippedRectifier(25) == 20);
}

TEST_CASE("architecture names") {
  CHECK(ParseArchitecture("brdnn") == Architecture::kBrdnn);
  CHECK(ArchitectureName(Architecture::kRdnn) == "rdnn");
  CHECK_THROWS_AS(ParseArchitecture("lstm"), Error);
}

TEST_CASE("config validation") {
  NetworkConfig c = SmallConfig(Architecture::kRdnn);
  c.recurrent_layer = 3;
  CHECK_THROWS_AS(c.Validate(), Error);
  c.architecture = Architecture::kDnn;
  CHECK_NOTHROW(c.Validate());
  c.activation_clip = 0;
  CHECK_THROWS_AS(c.Validate(), Error);
}

TEST_CASE("zero parameters give uniform posteriors") {
  for (Architecture arch : kAll) {
    const NetworkConfig c = SmallConfig(arch, 4, 32);
    const ForwardResult r = Forward(NetworkParams::Zeros(c), c, RandomInput(6, 4, 1));
    CHECK((r.grid.probs.array() - 1.0 / 32).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("rows are distributions and activations respect the clip") {
  for (Architecture arch : kAll) {
    const NetworkConfig c = SmallConfig(arch);
    const NetworkParams p = RandomParams(c, 11, 4.0);
    const ForwardResult r = Forward(p, c, RandomInput(12, 4, 2));
    CHECK((r.grid.probs.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(r.grid.probs.minCoeff() >= 0.0);
    if (arch == Architecture::kDnn) continue;
    for (std::size_t i = 0; i < r.cache.post.size(); ++i) {
      if (static_cast<int>(i) == c.recurrent_layer) continue;
      CHECK(r.cache.post[i].minCoeff() >= 0.0);
      CHECK(r.cache.post[i].maxCoeff() <= 20.0);
    }
    CHECK(r.cache.forward_post.minCoeff() >= 0.0);
    CHECK(r.cache.forward_post.maxCoeff() <= 20.0);
    if (arch == Architecture::kBrdnn) CHECK(r.cache.backward_post.maxCoeff() <= 20.0);
  }
}

TEST_CASE("dnn rows depend only on their own frame") {
  const NetworkConfig c = SmallConfig(Architecture::kDnn);
  const NetworkParams p = RandomParams(c, 3);
  FeatureMatrix x = RandomInput(8, 4, 3);
  const Eigen::MatrixXd before = Forward(p, c, x).grid.probs;
  x.values.row(4).setConstant(3.0);
  const Eigen::MatrixXd after = Forward(p, c, x).grid.probs;
  for (int t = 0; t < 8; ++t) {
    if (t != 4) CHECK(before.row(t) == after.row(t));
  }
  CHECK(before.row(4) != after.row(4));
}

TEST_CASE("rdnn is causal") {
  const NetworkConfig c = SmallConfig(Architecture::kRdnn);
  const NetworkParams p = RandomParams(c, 4);
  for (int t = 0; t < 7; ++t) {
    FeatureMatrix x = RandomInput(8, 4, 5);
    const Eigen::MatrixXd before = Forward(p, c, x).grid.probs;
    x.values.row(t + 1).array() += 1.5;
    const Eigen::MatrixXd after = Forward(p, c, x).grid.probs;
    CHECK(before.topRows(t + 1) == after.topRows(t + 1));
  }
}

TEST_CASE("brdnn without recurrence equals a dnn reading the summed layer") {
  // With both recurrent matrices zero, the recurrent layer emits
  // h_f + h_b = 2 relu(a); a dnn whose next layer weights are doubled
  // computes the same thing (weights kept small so no clipping happens).
  NetworkConfig bc = SmallConfig(Architecture::kBrdnn);
  NetworkParams bp = RandomParams(bc, 6, 0.3);
  bp.forward_recurrent.setZero();
  bp.backward_recurrent.setZero();

  NetworkConfig dc = bc;
  dc.architecture = Architecture::kDnn;
  NetworkParams dp = NetworkParams::Zeros(dc);
  dp.weights = bp.weights;
  dp.biases = bp.biases;
  dp.output_weights = bp.output_weights;
  dp.output_bias = bp.output_bias;
  dp.weights[bc.recurrent_layer + 1] *= 2.0;

  const FeatureMatrix x = RandomInput(9, 4, 7);
  const ForwardResult b = Forward(bp, bc, x);
  REQUIRE(b.cache.forward_post.maxCoeff() < 20.0);
  CHECK((b.grid.probs - Forward(dp, dc, x).grid.probs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("brdnn time reversal swaps the recurrent directions") {
  const NetworkConfig c = SmallConfig(Architecture::kBrdnn);
  const NetworkParams p = RandomParams(c, 8);
  NetworkParams swapped = p;
  std::swap(swapped.forward_recurrent, swapped.backward_recurrent);
  const FeatureMatrix x = RandomInput(10, 4, 9);
  FeatureMatrix reversed = x;
  reversed.values = x.values.colwise().reverse();
  const Eigen::MatrixXd a = Forward(p, c, x).grid.probs;
  const Eigen::MatrixXd b = Forward(swapped, c, reversed).grid.probs;
  CHECK((a - Eigen::MatrixXd(b.colwise().reverse())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("forward rejects bad shapes and divergence") {
  const NetworkConfig c = SmallConfig(Architecture::kRdnn);
  const NetworkParams p = RandomParams(c, 1);
  CHECK_THROWS_AS(Forward(p, c, RandomInput(3, 5, 1)), DimensionError);
  NetworkConfig other = c;
  other.layer_sizes = {6, 9, 7};
  CHECK_THROWS_AS(Forward(p, other, RandomInput(3, 4, 1)), DimensionError);

  const NetworkConfig d = SmallConfig(Architecture::kDnn);
  NetworkParams huge = RandomParams(d, 2, 1e200);
  CHECK_THROWS_AS(Forward(huge, d, RandomInput(3, 4, 1)), Error);
}

TEST_CASE("backward is linear in the upstream gradient") {
  for (Architecture arch : kAll) {
    const NetworkConfig c = SmallConfig(arch);
    const NetworkParams p = RandomParams(c, 12);
    const ForwardResult r = Forward(p, c, RandomInput(6, 4, 13));
    const NetworkParams zero = Backward(p, c, r.cache, Eigen::MatrixXd::Zero(6, 5));
    for (const auto& t : zero.Tensors()) CHECK(t.cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd g = Eigen::MatrixXd::Random(6, 5);
    const NetworkParams one = Backward(p, c, r.cache, g);
    const NetworkParams two = Backward(p, c, r.cache, 2.0 * g);
    const auto a = one.Tensors();
    const auto b = two.Tensors();
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK((2.0 * a[i] - b[i]).cwiseAbs().maxCoeff() <= 1e-12 * (1 + a[i].cwiseAbs().maxCoeff()));
    }
    CHECK_THROWS_AS(Backward(p, c, r.cache, Eigen::MatrixXd::Zero(5, 5)), DimensionError);
  }
}

TEST_CASE("backward matches central finite differences") {
  for (Architecture arch : kAll) {
    CAPTURE(ArchitectureName(arch));
    const NetworkConfig c = SmallConfig(arch);
    NetworkParams p = RandomParams(c, 21);
    const FeatureMatrix x = RandomInput(5, 4, 22);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd upstream(5, 5);
    for (Eigen::Index i = 0; i < upstream.size(); ++i) upstream.data()[i] = n(rng);

    // Scalar loss whose pre-softmax gradient is exactly `upstream`.
    auto loss = [&] {
      return (Forward(p, c, x).cache.logits.transpose().cwiseProduct(upstream)).sum();
    };
    const NetworkParams analytic = Backward(p, c, Forward(p, c, x).cache, upstream);
    CHECK(testing::ParamGradientError(p, analytic, loss) < 1e-5);
  }
}

TEST_CASE("parameter counts for the large configurations") {
  NetworkConfig c;
  c.input_dim = 483;
  c.output_dim = 32;
  c.architecture = Architecture::kBrdnn;
  c.layer_sizes.assign(5, 1824);
  CHECK(std::abs(static_cast<double>(NumParameters(c)) / 1e6 - 20.9) <= 0.05);
  c.architecture = Architecture::kRdnn;
  c.layer_sizes.assign(5, 2048);
  CHECK(std::abs(static_cast<double>(NumParameters(c)) / 1e6 - 22.0) <= 0.05);

  const NetworkConfig s = SmallConfig(Architecture::kBrdnn);
  CHECK(NumParameters(s) == NetworkParams::Zeros(s).NumParameters());
}

TEST_CASE("NETP serialization") {
  for (Architecture arch : kAll) {
    const NetworkConfig c = SmallConfig(arch);
    const NetworkParams p = RandomParams(c, 31);

    std::stringstream f64;
    WriteNetwork(f64, c, p, TensorPrecision::kFloat64);
    CHECK(f64.str().substr(0, 4) == "NETP");
    auto [c2, p2] = ReadNetwork(f64);
    CHECK(c2.layer_sizes == c.layer_sizes);
    CHECK(c2.architecture == arch);
    CHECK(p2.Dot(p2) == p.Dot(p));

    std::stringstream f32a, f32b;
    WriteNetwork(f32a, c, p);
    auto [c3, p3] = ReadNetwork(f32a);
    WriteNetwork(f32b, c3, p3);
    CHECK(f32a.str() == f32b.str());
  }
  std::stringstream junk("NETPxxxx");
  CHECK_THROWS_AS(ReadNetwork(junk), FormatError);
}
