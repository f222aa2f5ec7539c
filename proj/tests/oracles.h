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

#ifndef CTCASR_TESTS_ORACLES_H_
#define CTCASR_TESTS_ORACLES_H_

// Test-only reference computations. Nothing here calls the dynamic
// programs under test: alignment sums are by exhaustive path enumeration
// and gradients by central differences.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ctcasr/alphabet.h"
#include "ctcasr/network.h"

namespace ctcasr::testing {

// Every collapsed label string reachable from a T x K grid mapped to the
// total probability of the paths that produce it (summed in linear space,
// in path order). Requires K^T paths; keep T*log2(K) below ~20.
inline std::map<LabelSequence, double> EnumerateCollapsedMass(const Eigen::MatrixXd& probs,
                                                              int blank) {
  const int T = static_cast<int>(probs.rows());
  const int K = static_cast<int>(probs.cols());
  std::map<LabelSequence, double> mass;
  std::vector<int> path(T, 0);
  while (true) {
    double p = 1.0;
    for (int t = 0; t < T; ++t) p *= probs(t, path[t]);
    LabelSequence collapsed;
    int prev = -1;
    for (int l : path) {
      if (l != prev && l != blank) collapsed.push_back(l);
      prev = l;
    }
    mass[collapsed] += p;
    int t = T - 1;
    while (t >= 0 && ++path[t] == K) path[t--] = 0;
    if (t < 0) break;
  }
  return mass;
}

inline double EnumeratedProbability(const Eigen::MatrixXd& probs, int blank,
                                    const LabelSequence& target) {
  const auto mass = EnumerateCollapsedMass(probs, blank);
  auto it = mass.find(target);
  return it == mass.end() ? 0.0 : it->second;
}

// Random row-stochastic grid; rows drawn from a softmax of N(0, spread^2)
// logits so both peaked and flat rows appear.
inline Eigen::MatrixXd RandomGrid(int T, int K, std::mt19937_64& rng, double spread = 1.5) {
  std::normal_distribution<double> normal(0.0, spread);
  Eigen::MatrixXd g(T, K);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) g(t, k) = std::exp(normal(rng));
    g.row(t) /= g.row(t).sum();
  }
  return g;
}

// A K-symbol alphabet: "_" blank, letters, and " " as the last symbol.
inline Alphabet SmallAlphabet(int K) {
  std::vector<std::string> symbols = {"_"};
  for (int i = 1; i < K - 1; ++i) symbols.emplace_back(1, static_cast<char>('a' + i - 1));
  symbols.emplace_back(" ");
  return Alphabet::Build(symbols, "_", " ");
}

// Central differences of f over every entry of `x` (modified in place and
// restored).
inline Eigen::MatrixXd NumericalGradient(Eigen::MatrixXd& x, const std::function<double()>& f,
                                         double step = 1e-6) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + step;
    const double up = f();
    x.data()[i] = saved - step;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * step);
  }
  return g;
}

// max |a - b| / max(|a|, |b|, floor) over entries.
inline double MaxRelativeError(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               double floor = 1e-4) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a.data()[i]), std::abs(b.data()[i]), floor});
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / denom);
  }
  return worst;
}

// Finite-difference check of an analytic parameter gradient. `loss`
// evaluates the scalar at the current contents of `params`.
inline double ParamGradientError(NetworkParams& params, const NetworkParams& analytic,
                                 const std::function<double()>& loss, double step = 1e-6,
                                 double floor = 1e-4) {
  double worst = 0.0;
  auto tensors = params.Tensors();
  const auto expected = analytic.Tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Eigen::MatrixXd copy = tensors[i];
    for (Eigen::Index j = 0; j < copy.size(); ++j) {
      const double saved = tensors[i].data()[j];
      tensors[i].data()[j] = saved + step;
      const double up = loss();
      tensors[i].data()[j] = saved - step;
      const double down = loss();
      tensors[i].data()[j] = saved;
      const double numeric = (up - down) / (2 * step);
      const double a = expected[i].data()[j];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace ctcasr::testing

#endif  // CTCASR_TESTS_ORACLES_H_
