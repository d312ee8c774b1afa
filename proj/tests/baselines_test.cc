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

#include "spreadlearn/baselines.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spreadlearn/error.h"
#include "spreadlearn/numeric.h"

namespace spreadlearn {
namespace {

// Direct Monte Carlo of the reconstruction objective: draw x ~ Bern(theta0),
// flip with p, impute with p_theta(x | x~), score log p_theta(x).
std::pair<double, double> ReconObjectiveMc(double theta, double theta0,
                                           double p, int draws, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_p[2] = {std::log(1 - theta), std::log(theta)};
  double post_one[2];
  for (int noisy : {0, 1}) {
    const double like1 = noisy == 1 ? 1 - p : p;
    const double like0 = noisy == 0 ? 1 - p : p;
    post_one[noisy] = like1 * theta / (like1 * theta + like0 * (1 - theta));
  }
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const int x = unif(gen) < theta0;
    const int noisy = unif(gen) < p ? 1 - x : x;
    const double v = post_one[noisy] * log_p[1] + (1 - post_one[noisy]) * log_p[0];
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  return {mean, std::sqrt((sum_sq / draws - mean * mean) / draws)};
}

TEST(ReconObjectiveTest, MatchesDirectSimulation) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int triple = 0; triple < 20; ++triple) {
    const double theta = unif(gen), theta0 = unif(gen);
    const double p = 0.45 * (unif(gen) - 0.05) / 0.9;
    const auto [mean, se] = ReconObjectiveMc(theta, theta0, p, 1'000'000, triple);
    EXPECT_NEAR(ReconObjectiveBernoulli(theta, theta0, p), mean, 3 * se + 1e-12)
        << theta << " " << theta0 << " " << p;
  }
}

TEST(ReconObjectiveTest, SymmetricUnderRelabeling) {
  for (double p : {0.0, 0.1, 0.3}) {
    for (double theta : {0.2, 0.55, 0.9}) {
      for (double theta0 : {0.0, 0.3, 0.7, 1.0}) {
        EXPECT_NEAR(ReconObjectiveBernoulli(theta, theta0, p),
                    ReconObjectiveBernoulli(1 - theta, 1 - theta0, p), 1e-12);
      }
    }
  }
  EXPECT_THROW(ReconObjectiveBernoulli(0.0, 0.5, 0.1), InvalidArgument);
  EXPECT_THROW(ReconObjectiveBernoulli(1.0, 0.5, 0.1), InvalidArgument);
}

TEST(ReconObjectiveTest, NoiselessIsCrossEntropy) {
  const double theta = 0.35, theta0 = 0.6;
  EXPECT_NEAR(ReconObjectiveBernoulli(theta, theta0, 0.0),
              theta0 * std::log(theta) + (1 - theta0) * std::log(1 - theta),
              1e-14);
}

TEST(ReconCurveTest, NoiselessCurveIsIdentity) {
  const ReconstructionCurve curve = ReconCurve(0.0);
  ASSERT_EQ(curve.theta0.size(), 101u);
  EXPECT_LT(curve.MaxDeviation(), 1e-4);
}

TEST(ReconCurveTest, SmallNoiseAlreadyBiases) {
  EXPECT_GT(std::abs(ReconArgmax(0.3, 0.004) - 0.3), 0.01);
  const ReconstructionCurve curve = ReconCurve(0.004);
  EXPECT_GT(curve.MaxDeviation(), 0.01);
}

TEST(ReconCurveTest, RejectsInvalidNoise) {
  EXPECT_THROW(ReconCurve(0.5), InvalidArgument);
  EXPECT_THROW(ReconCurve(-0.1), InvalidArgument);
}

TEST(GammaTest, Examples) {
  EXPECT_NEAR(Gamma(0.0, 0.8, 0.2), 0.5, 1e-15);
  EXPECT_NEAR(Gamma(50.0, 0.8, 0.2), 0.8, 1e-12);
  EXPECT_NEAR(Gamma(-50.0, 0.8, 0.2), 0.2, 1e-12);
  EXPECT_NEAR(Gamma(1.3, 1.0, 0.0), Sigmoid(1.3), 1e-15);
}

TEST(NoisyLabelGradientTest, VanishesAtTrueDirection) {
  for (double p11 : {0.6, 0.8, 0.95}) {
    for (double p01 : {0.05, 0.2, 0.4}) {
      for (double s : {0.5, 2.0}) {
        NoisyLabelAnalysis a;
        a.p_1to1 = p11;
        a.p_0to1 = p01;
        a.s = s;
        a.seed = 11;
        const McEstimate g = NoisyLabelGradientAtAlpha(a);
        EXPECT_LT(std::abs(g.mean), 3 * g.std_error + 1e-12)
            << p11 << " " << p01 << " " << s;
      }
    }
  }
}

TEST(NoisyLabelGradientTest, PointsBackTowardTrueDirection) {
  NoisyLabelAnalysis a;
  a.alpha = 0.3;
  const McEstimate g = NoisyLabelGradientAtAlpha(a);
  EXPECT_LT(g.mean, -5 * g.std_error);
}

TEST(NoisyLabelGradientTest, AntitheticPairsCancelAtZero) {
  NoisyLabelAnalysis a;
  a.antithetic = true;
  EXPECT_EQ(NoisyLabelGradientAtAlpha(a).mean, 0.0);
}

TEST(NoisyLabelGradientTest, RejectsSmallSampleCounts) {
  NoisyLabelAnalysis a;
  a.mc_samples = 1000;
  EXPECT_THROW(NoisyLabelGradientAtAlpha(a), InvalidArgument);
}

TEST(NoisyLabelHessianTest, NegativeWhenLabelsInformative) {
  NoisyLabelAnalysis a;
  const HessianTerms h = NoisyLabelHessianAtZero(a);
  EXPECT_LT(h.total.mean + 3 * h.total.std_error, 0.0);
  EXPECT_LT(h.first.mean, 0.0);
  EXPECT_LT(h.second.mean, -0.19);
}

TEST(NoisyLabelHessianTest, FirstTermVanishesForUninformativeLabels) {
  NoisyLabelAnalysis a;
  a.p_1to1 = 0.4;
  a.p_0to1 = 0.4;
  const HessianTerms h = NoisyLabelHessianAtZero(a);
  EXPECT_LT(std::abs(h.first.mean), 3 * h.first.std_error + 1e-12);
  EXPECT_LT(h.total.mean, 0.0);
}

TEST(NoisyLabelHessianTest, QuadratureAgreesWithMonteCarlo) {
  for (auto [p11, p01, s] : {std::tuple{0.8, 0.2, 1.0}, std::tuple{0.9, 0.3, 2.0},
                            std::tuple{0.4, 0.4, 1.0}}) {
    NoisyLabelAnalysis a;
    a.p_1to1 = p11;
    a.p_0to1 = p01;
    a.s = s;
    const HessianTerms mc = NoisyLabelHessianAtZero(a);
    const HessianQuadrature q = NoisyLabelHessianQuadrature(p11, p01, s);
    EXPECT_NEAR(q.first, mc.first.mean, 4 * mc.first.std_error);
    EXPECT_NEAR(q.second, mc.second.mean, 4 * mc.second.std_error);
    EXPECT_NEAR(q.total, q.first + q.second, 1e-15);
  }
}

TEST(GaussHermiteTest, IntegratesNormalMoments) {
  const QuadratureRule rule = GaussHermiteNormal(20);
  EXPECT_NEAR(rule.Expectation([](double) { return 1.0; }), 1.0, 1e-13);
  EXPECT_NEAR(rule.Expectation([](double x) { return x; }), 0.0, 1e-13);
  EXPECT_NEAR(rule.Expectation([](double x) { return x * x; }), 1.0, 1e-12);
  EXPECT_NEAR(rule.Expectation([](double x) { return std::pow(x, 6); }), 15.0,
              1e-10);
  EXPECT_NEAR(rule.Expectation([](double x) { return std::cos(x); }),
              std::exp(-0.5), 1e-12);
}

TEST(AnisotropyTest, DiagonalCovarianceTiltsOffAxisDirection) {
  const double r = std::numbers::sqrt2 / 2;
  const AnisotropyResult res = AnisotropyCounterexample(
      {1, 0, 0, 25}, {r, r}, FlipChannel::Symmetric(0.2), 1'000'000, 1);
  EXPECT_TRUE(res.exceeds);
  EXPECT_GT(res.z_score, 5.0);
  EXPECT_GT(res.norm, 5 * res.norm_se);
}

TEST(AnisotropyTest, IsotropicCovarianceKeepsDirection) {
  const double r = std::numbers::sqrt2 / 2;
  const AnisotropyResult res = AnisotropyCounterexample(
      {1, 0, 0, 1}, {r, r}, FlipChannel::Symmetric(0.2), 1'000'000, 1);
  EXPECT_FALSE(res.exceeds);
  EXPECT_LT(std::abs(res.tangential), 3 * res.tangential_se);
}

TEST(AnisotropyTest, AxisAlignedDirectionIsAnEigenvector) {
  const AnisotropyResult res = AnisotropyCounterexample(
      {1, 0, 0, 25}, {1, 0}, FlipChannel::Symmetric(0.2), 1'000'000, 2);
  EXPECT_FALSE(res.exceeds);
}

TEST(AnisotropyTest, RejectsIndefiniteCovariance) {
  EXPECT_THROW(AnisotropyCounterexample({1, 2, 2, 1}, {1, 0},
                                        FlipChannel::Symmetric(0.2), 1000, 0),
               InvalidArgument);
  EXPECT_THROW(AnisotropyCounterexample({1, 0.5, 0.4, 1}, {1, 0},
                                        FlipChannel::Symmetric(0.2), 1000, 0),
               InvalidArgument);
}

TEST(NaiveTest, LoglikIsPlainLogisticOnNoisyData) {
  SyntheticSpec spec;
  spec.num_records = 200;
  spec.dims = 3;
  spec.theta0 = UnitDirection(3, 4);
  spec.seed = 2;
  const LabeledDataset clean = GenerateSynthetic(spec);
  const LabeledDataset noisy =
      CorruptDataset(clean, {FlipChannel::Symmetric(0.3), std::monostate{}}, 1);
  const LogregModel model{{0.5, -0.1, 0.2, 0.05}, 1.0};
  EXPECT_EQ(NaiveLoglikNoisy(model, noisy), LogisticLoglik(model, noisy));
  EXPECT_NEAR(NaiveLoglikNoisy(LogregModel::Zero(3), noisy), std::log(0.5), 1e-14);
}

TEST(NaiveTest, RandomLabelsCarryNoDirection) {
  SyntheticSpec spec;
  spec.num_records = 5000;
  spec.dims = 200;
  spec.theta0 = UnitDirection(200, std::nullopt);
  spec.seed = 9;
  const LabeledDataset clean = GenerateSynthetic(spec);
  const LabeledDataset noisy =
      CorruptDataset(clean, {FlipChannel::Symmetric(0.5), std::monostate{}}, 3);
  const LogregFit fit = TrainNaive(noisy, {});
  const auto w = fit.model.weights();
  EXPECT_LT(std::abs(Dot(w, spec.theta0)) / std::sqrt(Dot(w, w)), 0.2);
}

}  // namespace
}  // namespace spreadlearn
