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

#include "ctcasr/ctc.h"

#include "ctcasr/error.h"
#include "ctcasr/log_math.h"

namespace ctcasr {
namespace {

// Forward (alpha) and backward (beta) variables in log space, S x T, over
// the augmented sequence. alpha includes the emission at t; beta covers
// frames t+1..T only, so alpha(s,t) + beta(s,t) is the log mass of paths
// through state s at frame t.
struct Lattice {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
  double log_likelihood;
};

bool CanSkip(const LabelSequence& aug, Eigen::Index s, int blank) {
  return s >= 2 && aug[s] != blank && aug[s] != aug[s - 2];
}

Eigen::MatrixXd LogProbs(const PosteriorGrid& grid) {
  return grid.probs.unaryExpr([](double p) { return SafeLog(p); });
}

void CheckTargetFits(const Eigen::MatrixXd& grid, const CtcTarget& target) {
  if (grid.rows() < 1) throw Error("ctc: empty posterior grid");
  for (int l : target.augmented()) {
    if (l >= grid.cols()) throw DimensionError("ctc: target label outside grid columns");
  }
}

Eigen::MatrixXd ForwardVariables(const Eigen::MatrixXd& logp, const CtcTarget& target) {
  const LabelSequence& aug = target.augmented();
  const Eigen::Index S = static_cast<Eigen::Index>(aug.size());
  const Eigen::Index T = logp.rows();
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Constant(S, T, kLogZero);
  alpha(0, 0) = logp(0, aug[0]);
  if (S > 1) alpha(1, 0) = logp(0, aug[1]);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      double acc = alpha(s, t - 1);
      if (s >= 1) acc = LogAdd(acc, alpha(s - 1, t - 1));
      if (CanSkip(aug, s, target.blank())) acc = LogAdd(acc, alpha(s - 2, t - 1));
      alpha(s, t) = acc == kLogZero ? kLogZero : acc + logp(t, aug[s]);
    }
  }
  return alpha;
}

Lattice BuildLattice(const Eigen::MatrixXd& logp, const CtcTarget& target) {
  const LabelSequence& aug = target.augmented();
  const Eigen::Index S = static_cast<Eigen::Index>(aug.size());
  const Eigen::Index T = logp.rows();

  Lattice lat;
  lat.alpha = ForwardVariables(logp, target);
  lat.log_likelihood = S > 1 ? LogAdd(lat.alpha(S - 1, T - 1), lat.alpha(S - 2, T - 1))
                             : lat.alpha(S - 1, T - 1);

  lat.beta = Eigen::MatrixXd::Constant(S, T, kLogZero);
  lat.beta(S - 1, T - 1) = 0.0;
  if (S > 1) lat.beta(S - 2, T - 1) = 0.0;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      // Successors of s at t+1: s, s+1, and s+2 when s+2 may skip back to s.
      double acc = kLogZero;
      auto take = [&](Eigen::Index next) {
        const double b = lat.beta(next, t + 1);
        if (b != kLogZero && logp(t + 1, aug[next]) != kLogZero) {
          acc = LogAdd(acc, b + logp(t + 1, aug[next]));
        }
      };
      take(s);
      if (s + 1 < S) take(s + 1);
      if (s + 2 < S && CanSkip(aug, s + 2, target.blank())) take(s + 2);
      lat.beta(s, t) = acc;
    }
  }
  return lat;
}

}  // namespace

CtcTarget::CtcTarget(LabelSequence labels, int blank, int num_symbols)
    : labels_(std::move(labels)), blank_(blank) {
  for (int l : labels_) {
    if (l == blank) throw Error("ctc: target contains the blank symbol");
    if (l < 0 || l >= num_symbols) {
      throw Error("ctc: target label " + std::to_string(l) + " out of range");
    }
  }
  augmented_.reserve(2 * labels_.size() + 1);
  augmented_.push_back(blank);
  for (int l : labels_) {
    augmented_.push_back(l);
    augmented_.push_back(blank);
  }
}

int CtcTarget::MinimumFrames() const {
  int n = static_cast<int>(labels_.size());
  for (std::size_t i = 1; i < labels_.size(); ++i) {
    if (labels_[i] == labels_[i - 1]) ++n;
  }
  return n;
}

double CtcLogLikelihood(const PosteriorGrid& grid, const CtcTarget& target) {
  CheckTargetFits(grid.probs, target);
  if (grid.frames() < target.MinimumFrames()) return kLogZero;
  const Eigen::MatrixXd alpha = ForwardVariables(LogProbs(grid), target);
  const Eigen::Index S = alpha.rows();
  const Eigen::Index T = alpha.cols();
  return S > 1 ? LogAdd(alpha(S - 1, T - 1), alpha(S - 2, T - 1)) : alpha(S - 1, T - 1);
}

CtcLossResult CtcLossAndGradient(const PosteriorGrid& grid, const CtcTarget& target) {
  return CtcLossAndGradientFromLogProbs(LogProbs(grid), target);
}

CtcLossResult CtcLossAndGradientFromLogProbs(const Eigen::MatrixXd& log_probs,
                                             const CtcTarget& target) {
  CheckTargetFits(log_probs, target);
  if (log_probs.rows() < target.MinimumFrames()) {
    throw Error("ctc: target of " + std::to_string(target.labels().size()) +
                " symbols cannot be emitted in " + std::to_string(log_probs.rows()) + " frames");
  }
  const Lattice lat = BuildLattice(log_probs, target);
  if (lat.log_likelihood == kLogZero) throw Error("ctc: target has zero probability under grid");

  const LabelSequence& aug = target.augmented();
  const Eigen::Index T = log_probs.rows();
  const Eigen::Index K = log_probs.cols();
  CtcLossResult r;
  r.log_likelihood = lat.log_likelihood;
  r.grad_logits = log_probs.array().exp().matrix();
  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXd occupancy = Eigen::VectorXd::Constant(K, kLogZero);
    for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(aug.size()); ++s) {
      const double a = lat.alpha(s, t);
      const double b = lat.beta(s, t);
      if (a == kLogZero || b == kLogZero) continue;
      occupancy[aug[s]] = LogAdd(occupancy[aug[s]], a + b);
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      if (occupancy[k] != kLogZero) {
        r.grad_logits(t, k) -= std::exp(occupancy[k] - lat.log_likelihood);
      }
    }
  }
  return r;
}

}  // namespace ctcasr
