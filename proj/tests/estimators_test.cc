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

#include <gtest/gtest.h>

#include <cmath>

#include "spreadlearn/error.h"

namespace spreadlearn {
namespace {

// Independent oracle: theta-grid argmax of the Bernoulli spread likelihood.
double GridArgmax(double f_tilde, const FlipChannel& ch, double step = 1e-4) {
  double best = -INFINITY, arg = 0.0;
  const int steps = static_cast<int>(std::lround(1.0 / step));
  for (int k = 0; k <= steps; ++k) {
    const double t = k * step;
    const double p1 = ch.p_0to1() * (1 - t) + (1 - ch.p_1to0()) * t;
    double v = 0.0;
    if (f_tilde > 0) v += f_tilde * std::log(p1);
    if (f_tilde < 1) v += (1 - f_tilde) * std::log(1 - p1);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  return arg;
}

TEST(VotingEstimateTest, NoNoiseReturnsFrequency) {
  EXPECT_DOUBLE_EQ(EstimateVoting(0.4, FlipChannel::Symmetric(0.0)).theta, 0.4);
}

TEST(VotingEstimateTest, InvertsTheForwardMap) {
  const auto est = EstimateVoting(0.38, FlipChannel::Symmetric(0.2));
  EXPECT_NEAR(est.theta, 0.3, 1e-12);
  EXPECT_FALSE(est.clipped);
}

TEST(VotingEstimateTest, ClipsBelowZero) {
  const auto est = EstimateVoting(0.1, FlipChannel::Symmetric(0.2));
  EXPECT_NEAR(est.raw, -1.0 / 6.0, 1e-12);
  EXPECT_EQ(est.theta, 0.0);
  EXPECT_TRUE(est.clipped);
}

TEST(VotingEstimateTest, DegenerateChannelThrows) {
  EXPECT_THROW(EstimateVoting(0.5, FlipChannel::Symmetric(0.5)), NumericalError);
  EXPECT_THROW(EstimateVoting(1.5, FlipChannel::Symmetric(0.1)), InvalidArgument);
}

TEST(VotingEstimateTest, MatchesGridArgmaxOfSpreadLikelihood) {
  for (double p : {0.05, 0.2, 0.4}) {
    const FlipChannel ch = FlipChannel::Symmetric(p);
    for (int i = 0; i <= 100; ++i) {
      const double f = i / 100.0;
      EXPECT_NEAR(EstimateVoting(f, ch).theta, GridArgmax(f, ch), 1e-4 + 1e-12)
          << "f=" << f << " p=" << p;
    }
  }
}

TEST(VotingEstimateTest, ConsistentOnSimulatedData) {
  // |estimate - theta0| < 0.01 at N = 1e6 for a grid of settings.
  for (double theta0 : {0.1, 0.5, 0.9}) {
    for (double p : {0.1, 0.3}) {
      const FlipChannel ch = FlipChannel::Symmetric(p);
      double ones = 0.0;
      constexpr int kN = 1'000'000;
      for (int n = 0; n < kN; ++n) {
        SplitMix64 rng = RecordStream(42, StreamTag::kSynthetic, n);
        const int clean = rng.Uniform() < theta0 ? 1 : 0;
        ones += ch.Sample(clean, rng);
      }
      EXPECT_NEAR(EstimateVoting(ones / kN, ch).theta, theta0, 0.01);
    }
  }
}

TEST(SpreadLoglikBernoulliTest, Examples) {
  EXPECT_DOUBLE_EQ(SpreadLoglikBernoulli(1.0, 1.0, FlipChannel::Symmetric(0.0)),
                   0.0);
  const FlipChannel ch = FlipChannel::Symmetric(0.15);
  for (double t : {0.1, 0.35, 0.8}) {
    for (double f : {0.0, 0.3, 0.77}) {
      EXPECT_NEAR(SpreadLoglikBernoulli(t, f, ch),
                  SpreadLoglikBernoulli(1 - t, 1 - f, ch), 1e-14);
    }
  }
  // The maximum sits where the mixture equals f.
  const double f = 0.5;
  const double at_match = SpreadLoglikBernoulli(0.5, f, ch);
  for (double t = 0.0; t <= 1.0; t += 1e-3) {
    EXPECT_LE(SpreadLoglikBernoulli(t, f, ch), at_match + 1e-15);
  }
  EXPECT_THROW(SpreadLoglikBernoulli(0.0, 0.5, FlipChannel::Symmetric(0.0)),
               NumericalError);
}

TEST(SpreadMleDiscreteTest, BinaryEmMatchesVoting) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = 0.05 + 0.35 * rng.Uniform();
    const double f = rng.Uniform();
    const FlipChannel flip = FlipChannel::Symmetric(p);
    const std::vector<double> counts = {1.0 - f, f};
    const auto em = SpreadMleDiscrete(counts, flip.ToDiscrete());
    EXPECT_NEAR(em.q[1], EstimateVoting(f, flip).theta, 1e-4)
        << "f=" << f << " p=" << p;
  }
}

TEST(SpreadMleDiscreteTest, GridMatchesVoting) {
  const FlipChannel flip(0.1, 0.25);
  for (double f : {0.05, 0.3, 0.62, 0.9}) {
    const std::vector<double> counts = {1.0 - f, f};
    const auto grid =
        SpreadMleDiscrete(counts, flip.ToDiscrete(), SimplexStrategy::kGrid);
    EXPECT_NEAR(grid.q[1], EstimateVoting(f, flip).theta, 1e-4);
  }
  const std::vector<double> three = {1, 1, 1};
  EXPECT_THROW(SpreadMleDiscrete(three, UniformStateChannel(3, 0.1).ToDiscrete(),
                                 SimplexStrategy::kGrid),
               InvalidArgument);
}

TEST(SpreadMleDiscreteTest, NearIdentityReturnsFrequencies) {
  const std::vector<double> counts = {10, 30, 60};
  const auto est =
      SpreadMleDiscrete(counts, UniformStateChannel(3, 1e-6).ToDiscrete());
  EXPECT_NEAR(est.q[0], 0.1, 1e-4);
  EXPECT_NEAR(est.q[1], 0.3, 1e-4);
  EXPECT_NEAR(est.q[2], 0.6, 1e-4);
}

TEST(SpreadMleDiscreteTest, RecoversThreeStateDistribution) {
  const UniformStateChannel ch(3, 0.3);
  const std::vector<double> q = {0.5, 0.3, 0.2};
  std::vector<double> counts(3, 0.0);
  for (int n = 0; n < 1'000'000; ++n) {
    SplitMix64 rng = RecordStream(5, StreamTag::kSynthetic, n);
    const double u = rng.Uniform();
    const int clean = u < 0.5 ? 0 : (u < 0.8 ? 1 : 2);
    counts[ch.Sample(clean, rng)] += 1.0;
  }
  const auto est = SpreadMleDiscrete(counts, ch.ToDiscrete());
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(est.q[j], q[j], 0.01);
}

TEST(SpreadMleDiscreteTest, SimplexMonotoneAndBeatsPlugIn) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 5;
    std::vector<double> counts(k);
    for (double& c : counts) c = std::floor(100 * rng.Uniform());
    counts[0] += 1;
    const DiscreteChannel ch = UniformStateChannel(k, 0.4 * rng.Uniform()).ToDiscrete();
    const auto est = SpreadMleDiscrete(counts, ch);
    double sum = 0.0;
    for (double v : est.q) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
    for (std::size_t i = 1; i < est.objective_trace.size(); ++i) {
      EXPECT_GE(est.objective_trace[i], est.objective_trace[i - 1] - 1e-14);
    }
    double total = 0.0;
    for (double c : counts) total += c;
    std::vector<double> plug_in(k);
    for (int j = 0; j < k; ++j) plug_in[j] = counts[j] / total;
    EXPECT_GE(est.objective, SpreadObjectiveDiscrete(counts, ch, plug_in) - 1e-12);
  }
}

TEST(SpreadMleDiscreteTest, ZeroTotalThrows) {
  const std::vector<double> counts = {0, 0};
  EXPECT_THROW(SpreadMleDiscrete(counts, FlipChannel::Symmetric(0.1).ToDiscrete()),
               InvalidArgument);
}

}  // namespace
}  // namespace spreadlearn
