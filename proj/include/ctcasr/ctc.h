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

#ifndef CTCASR_CTC_H_
#define CTCASR_CTC_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ctcasr/alphabet.h"
#include "ctcasr/network.h"

namespace ctcasr {

// A transcript over non-blank symbols together with its blank-interleaved
// form _ l1 _ l2 _ ... lL _ of length 2L + 1.
class CtcTarget {
 public:
  // Throws Error if a label is the blank or lies outside [0, num_symbols).
  CtcTarget(LabelSequence labels, int blank, int num_symbols);
  CtcTarget(LabelSequence labels, const Alphabet& alphabet)
      : CtcTarget(std::move(labels), alphabet.blank_index(),
                  static_cast<int>(alphabet.size())) {}

  const LabelSequence& labels() const { return labels_; }
  const LabelSequence& augmented() const { return augmented_; }
  int blank() const { return blank_; }

  // Shortest input that can emit the target: L plus one blank between each
  // pair of equal neighbours.
  int MinimumFrames() const;

 private:
  LabelSequence labels_;
  LabelSequence augmented_;
  int blank_;
};

// log p(target | grid), the sum over every length-T path that collapses to
// the target. Returns -infinity when no path exists.
double CtcLogLikelihood(const PosteriorGrid& grid, const CtcTarget& target);

struct CtcLossResult {
  double log_likelihood;
  Eigen::MatrixXd grad_logits;  // T x K, d(-log p) / d(pre-softmax)
};

// Negative log-likelihood gradient with respect to the pre-softmax outputs
// that produced `grid`: p(k | x_t) minus the posterior occupancy of symbol k
// at frame t. Throws Error when the target is infeasible.
CtcLossResult CtcLossAndGradient(const PosteriorGrid& grid, const CtcTarget& target);

// Same, from T x K log-probabilities (a log-softmax of the logits), which
// stays finite where probabilities would underflow to zero.
CtcLossResult CtcLossAndGradientFromLogProbs(const Eigen::MatrixXd& log_probs,
                                             const CtcTarget& target);

}  // namespace ctcasr

#endif  // CTCASR_CTC_H_
