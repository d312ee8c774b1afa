// Copyright 2026 The Spreadlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Spread-likelihood estimators for discrete models: the randomised-response
// voting correction and its K-state generalization.

#ifndef SPREADLEARN_ESTIMATORS_H_
#define SPREADLEARN_ESTIMATORS_H_

#include <span>
#include <vector>

#include "spreadlearn/channels.h"

namespace spreadlearn {

struct VotingEstimate {
  double theta = 0.0;    // clipped into [0,1]
  double raw = 0.0;      // unclipped closed form
  bool clipped = false;  // raw fell outside [0,1]
};

// Maximizer of the Bernoulli spread likelihood given the corrupted fraction of
// ones f_tilde: (f_tilde - P10) / (1 - P10 - P01), clipped to [0,1], where
// P10 = p(noisy=1|clean=0) and P01 = p(noisy=0|clean=1). Throws
// NumericalError when |1 - P10 - P01| < 1e-9.
VotingEstimate EstimateVoting(double f_tilde, const FlipChannel& channel);

// Average spread log likelihood
//   (1-f) log(P00 (1-theta) + P01 theta) + f log(P10 (1-theta) + P11 theta).
// Terms with zero weight are skipped; throws NumericalError for the log of a
// nonpositive mixture with positive weight.
double SpreadLoglikBernoulli(double theta, double f_tilde,
                             const FlipChannel& channel);

enum class SimplexStrategy { kEm, kGrid };

// EM stops once the objective gain is below `tolerance` and no coordinate of
// q moved by more than `step_tolerance`. EM converges slowly when the channel
// is close to uninformative or the optimum is on the boundary, so the gain
// alone stops it early there.
struct SimplexEmOptions {
  int max_iterations = 100'000;
  double tolerance = 1e-10;
  double step_tolerance = 1e-12;
  double grid_step = 1e-4;  // kGrid only (K = 2)
};

struct SimplexEstimate {
  std::vector<double> q;          // estimate on the probability simplex
  double objective = 0.0;         // sum_i counts_i log(sum_j P_ij q_j) / total
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per EM iteration, incl. start
};

// Maximizes sum_i counts_i log(sum_j P(i,j) q_j) over the simplex. EM starts
// from the uniform distribution; kGrid scans q_1 on a grid (K = 2 only).
// Throws InvalidArgument for a zero total count or a size mismatch.
SimplexEstimate SpreadMleDiscrete(std::span<const double> counts,
                                  const DiscreteChannel& channel,
                                  SimplexStrategy strategy = SimplexStrategy::kEm,
                                  const SimplexEmOptions& options = {});

// The spread objective (normalized by the total count) at q.
double SpreadObjectiveDiscrete(std::span<const double> counts,
                               const DiscreteChannel& channel,
                               std::span<const double> q);

}  // namespace spreadlearn

#endif  // SPREADLEARN_ESTIMATORS_H_
