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

#include <cmath>
#include <random>

#include "ctcasr/ctc.h"
#include "ctcasr/error.h"
#include "ctcasr/log_math.h"
#include "oracles.h"

using namespace ctcasr;

namespace {

PosteriorGrid Grid(Eigen::MatrixXd m) { return PosteriorGrid{std::move(m)}; }

}  // namespace

TEST_CASE("augmented target and minimum length") {
  const CtcTarget t({1, 1, 2}, 0, 3);
  CHECK(t.augmented() == LabelSequence{0, 1, 0, 1, 0, 2, 0});
  CHECK(t.MinimumFrames() == 4);
  CHECK(CtcTarget({}, 0, 3).MinimumFrames() == 0);
  CHECK_THROWS_AS(CtcTarget({0}, 0, 3), Error);
  CHECK_THROWS_AS(CtcTarget({3}, 0, 3), Error);
}

TEST_CASE("two-frame single label") {
  // Paths "a_", "_a", "aa" over {_, a}.
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5,
       0.6, 0.4;
  // a_ 0.5*0.6 + _a 0.5*0.4 + aa 0.5*0.4 = 0.3 + 0.2 + 0.2 = 0.7
  CHECK(CtcLogLikelihood(Grid(p), CtcTarget({1}, 0, 2)) == doctest::Approx(std::log(0.7)).epsilon(1e-14));
  Eigen::MatrixXd q(2, 2);
  q << 0.8, 0.2,
       0.6, 0.4;
  // 0.2*0.6 + 0.8*0.4 + 0.2*0.4 = 0.12 + 0.32 + 0.08
  CHECK(CtcLogLikelihood(Grid(q), CtcTarget({1}, 0, 2)) == doctest::Approx(std::log(0.52)).epsilon(1e-14));
}

TEST_CASE("uniform two-frame grid") {
  const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK(std::exp(CtcLogLikelihood(Grid(p), CtcTarget({1}, 0, 2))) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(std::exp(CtcLogLikelihood(Grid(p), CtcTarget({}, 0, 2))) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("repeated label needs a separating blank") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd p = testing::RandomGrid(2, 3, rng);
  CHECK(CtcLogLikelihood(Grid(p), CtcTarget({1, 1}, 0, 3)) == kLogZero);
  CHECK_THROWS_AS(CtcLossAndGradient(Grid(p), CtcTarget({1, 1}, 0, 3)), Error);
  CHECK(CtcLogLikelihood(Grid(p), CtcTarget({1, 2}, 0, 3)) > kLogZero);
}

TEST_CASE("single frame closed form") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd p = testing::RandomGrid(1, 4, rng);
  const auto r = CtcLossAndGradient(Grid(p), CtcTarget({2}, 0, 4));
  CHECK(r.log_likelihood == doctest::Approx(std::log(p(0, 2))).epsilon(1e-14));
  Eigen::MatrixXd expected = p;
  expected(0, 2) -= 1.0;
  CHECK((r.grad_logits - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("likelihood matches path enumeration") {
  std::mt19937_64 rng(3);
  const LabelSequence targets[] = {{}, {1}, {2, 1}, {1, 1}, {1, 2, 1}, {2, 2, 1}};
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd p = testing::RandomGrid(6, 3, rng);
    const auto mass = testing::EnumerateCollapsedMass(p, 0);
    for (const auto& target : targets) {
      auto it = mass.find(target);
      const double expected = it == mass.end() ? 0.0 : it->second;
      const double got = std::exp(CtcLogLikelihood(Grid(p), CtcTarget(target, 0, 3)));
      CHECK(std::abs(got - expected) <= 1e-10 * std::max(1.0, expected));
    }
  }
}

TEST_CASE("mass over all labelings is one") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd p = testing::RandomGrid(5, 3, rng);
  const auto mass = testing::EnumerateCollapsedMass(p, 0);
  double total = 0.0;
  for (const auto& [labels, m] : mass) {
    total += std::exp(CtcLogLikelihood(Grid(p), CtcTarget(labels, 0, 3)));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relabeling symbols leaves the likelihood unchanged") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd p = testing::RandomGrid(7, 4, rng);
  // Swap columns 1 and 3 and relabel the target to match.
  Eigen::MatrixXd q = p;
  q.col(1) = p.col(3);
  q.col(3) = p.col(1);
  const double a = CtcLogLikelihood(Grid(p), CtcTarget({1, 2, 3, 1}, 0, 4));
  const double b = CtcLogLikelihood(Grid(q), CtcTarget({3, 2, 1, 3}, 0, 4));
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("gradient rows sum to zero") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd p = testing::RandomGrid(9, 5, rng);
  const auto r = CtcLossAndGradient(Grid(p), CtcTarget({1, 4, 4, 2}, 0, 5));
  CHECK(r.grad_logits.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient matches finite differences through the softmax") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const LabelSequence& target : {LabelSequence{1, 2}, LabelSequence{3, 3, 1}, LabelSequence{}}) {
    Eigen::MatrixXd logits(8, 4);
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = n(rng);
    const CtcTarget t(target, 0, 4);
    auto loss = [&] { return -CtcLogLikelihood(Grid(Softmax(logits)), t); };
    const Eigen::MatrixXd analytic = CtcLossAndGradient(Grid(Softmax(logits)), t).grad_logits;
    const Eigen::MatrixXd numeric = testing::NumericalGradient(logits, loss);
    CHECK(testing::MaxRelativeError(analytic, numeric) < 1e-6);
  }
}

TEST_CASE("log-probability entry point agrees and survives underflow") {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd p = testing::RandomGrid(6, 4, rng);
  const CtcTarget t({1, 3}, 0, 4);
  const auto a = CtcLossAndGradient(Grid(p), t);
  const auto b = CtcLossAndGradientFromLogProbs(p.array().log().matrix(), t);
  CHECK(a.log_likelihood == doctest::Approx(b.log_likelihood).epsilon(1e-13));
  CHECK((a.grad_logits - b.grad_logits).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(4, 3);
  logits.col(0).setConstant(900.0);
  const auto c = CtcLossAndGradientFromLogProbs(LogSoftmax(logits), CtcTarget({1}, 0, 3));
  CHECK(std::isfinite(c.log_likelihood));
  CHECK(c.log_likelihood < -800.0);
  CHECK(c.grad_logits.allFinite());
}

TEST_CASE("target longer than input") {
  const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 4, 0.25);
  CHECK(CtcLogLikelihood(Grid(p), CtcTarget({1, 2, 3}, 0, 4)) == kLogZero);
  CHECK_THROWS_AS(CtcLogLikelihood(Grid(p), CtcTarget({4}, 0, 5)), DimensionError);
}
