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

#include "spreadlearn/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spreadlearn/error.h"

namespace spreadlearn {

VotingEstimate EstimateVoting(double f_tilde, const FlipChannel& channel) {
  if (!(f_tilde >= 0.0 && f_tilde <= 1.0)) {
    throw InvalidArgument("f_tilde must be in [0,1]");
  }
  const double p10 = channel.p_0to1();
  const double p01 = channel.p_1to0();
  const double denom = 1.0 - p10 - p01;
  if (std::abs(denom) < 1e-9) {
    throw NumericalError("degenerate channel: 1 - P10 - P01 is zero");
  }
  VotingEstimate est;
  est.raw = (f_tilde - p10) / denom;
  est.theta = std::clamp(est.raw, 0.0, 1.0);
  est.clipped = est.theta != est.raw;
  return est;
}

double SpreadLoglikBernoulli(double theta, double f_tilde,
                             const FlipChannel& channel) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument("theta must be in [0,1]");
  }
  const double p_one = channel.Prob(1, 0) * (1.0 - theta) +
                       channel.Prob(1, 1) * theta;
  const double p_zero = channel.Prob(0, 0) * (1.0 - theta) +
                        channel.Prob(0, 1) * theta;
  double value = 0.0;
  for (auto [weight, mixture] : {std::pair{1.0 - f_tilde, p_zero},
                                 std::pair{f_tilde, p_one}}) {
    if (weight == 0.0) continue;
    if (!(mixture > 0.0)) {
      throw NumericalError("log of a nonpositive mixture probability");
    }
    value += weight * std::log(mixture);
  }
  return value;
}

double SpreadObjectiveDiscrete(std::span<const double> counts,
                               const DiscreteChannel& channel,
                               std::span<const double> q) {
  const int k = channel.num_states();
  double total = 0.0;
  for (double c : counts) total += c;
  double value = 0.0;
  for (int i = 0; i < k; ++i) {
    if (counts[i] == 0.0) continue;
    double mixture = 0.0;
    for (int j = 0; j < k; ++j) mixture += channel(i, j) * q[j];
    if (!(mixture > 0.0)) return -std::numeric_limits<double>::infinity();
    value += counts[i] * std::log(mixture);
  }
  return value / total;
}

namespace {

SimplexEstimate GridSearchBinary(std::span<const double> counts,
                                 const DiscreteChannel& channel,
                                 double step) {
  SimplexEstimate best;
  best.objective = -std::numeric_limits<double>::infinity();
  const auto steps = static_cast<long>(std::llround(1.0 / step));
  for (long s = 0; s <= steps; ++s) {
    const double q1 = std::min(1.0, s * step);
    const double q[2] = {1.0 - q1, q1};
    const double value = SpreadObjectiveDiscrete(counts, channel, q);
    if (value > best.objective) {
      best.objective = value;
      best.q = {q[0], q[1]};
    }
  }
  best.iterations = static_cast<int>(steps + 1);
  return best;
}

}  // namespace

SimplexEstimate SpreadMleDiscrete(std::span<const double> counts,
                                  const DiscreteChannel& channel,
                                  SimplexStrategy strategy,
                                  const SimplexEmOptions& options) {
  const int k = channel.num_states();
  if (counts.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("counts length must equal the number of states");
  }
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw InvalidArgument("counts must be nonnegative");
    total += c;
  }
  if (!(total > 0.0)) throw InvalidArgument("zero total count");

  if (strategy == SimplexStrategy::kGrid) {
    if (k != 2) throw InvalidArgument("grid strategy supports K = 2 only");
    return GridSearchBinary(counts, channel, options.grid_step);
  }

  SimplexEstimate est;
  est.q.assign(k, 1.0 / k);
  est.objective = SpreadObjectiveDiscrete(counts, channel, est.q);
  est.objective_trace.push_back(est.objective);
  std::vector<double> mixture(k), next(k);
  for (int it = 0; it < options.max_iterations; ++it) {
    // E-step: responsibility of clean state j for noisy state i is
    // P(i,j) q_j / mixture_i. M-step: q_j = sum_i f_i * responsibility.
    for (int i = 0; i < k; ++i) {
      double m = 0.0;
      for (int j = 0; j < k; ++j) m += channel(i, j) * est.q[j];
      mixture[i] = m;
    }
    std::ranges::fill(next, 0.0);
    for (int i = 0; i < k; ++i) {
      if (counts[i] == 0.0) continue;
      const double f = counts[i] / total;
      for (int j = 0; j < k; ++j) {
        next[j] += f * channel(i, j) * est.q[j] / mixture[i];
      }
    }
    double norm = 0.0;
    for (double v : next) norm += v;
    double step = 0.0;
    for (int j = 0; j < k; ++j) {
      const double qj = next[j] / norm;
      step = std::max(step, std::abs(qj - est.q[j]));
      est.q[j] = qj;
    }
    const double value = SpreadObjectiveDiscrete(counts, channel, est.q);
    est.objective_trace.push_back(value);
    est.iterations = it + 1;
    const double gain = value - est.objective;
    est.objective = value;
    if (gain < options.tolerance && step < options.step_tolerance) break;
  }
  return est;
}

}  // namespace spreadlearn
