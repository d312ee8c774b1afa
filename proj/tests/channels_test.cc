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

#include "spreadlearn/channels.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "spreadlearn/error.h"

namespace spreadlearn {
namespace {

void ExpectColumnStochastic(const DiscreteChannel& ch) {
  for (int j = 0; j < ch.num_states(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < ch.num_states(); ++i) sum += ch(i, j);
    EXPECT_NEAR(sum, 1.0, 1e-12) << "column " << j;
  }
}

TEST(DiscreteChannelTest, RejectsNonStochasticColumns) {
  EXPECT_THROW(DiscreteChannel(2, {0.9, 0.2, 0.2, 0.8}), InvalidArgument);
  EXPECT_THROW(DiscreteChannel(2, {1.1, 0.0, -0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(DiscreteChannel(2, {1.0, 0.0, 0.0}), InvalidArgument);
}

TEST(DiscreteChannelTest, ConstructorsAreColumnStochastic) {
  ExpectColumnStochastic(DiscreteChannel::Identity(5));
  ExpectColumnStochastic(FlipChannel(0.1, 0.35).ToDiscrete());
  for (int k : {2, 3, 16, 256}) {
    for (double p : {0.0, 0.01, 0.3, 0.9}) {
      ExpectColumnStochastic(UniformStateChannel(k, p).ToDiscrete());
    }
  }
}

TEST(FlipChannelTest, ConvertsToColumns) {
  const DiscreteChannel d = FlipChannel(0.1, 0.3).ToDiscrete();
  EXPECT_DOUBLE_EQ(d(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(d(1, 0), 0.1);
  EXPECT_DOUBLE_EQ(d(0, 1), 0.3);
  EXPECT_DOUBLE_EQ(d(1, 1), 0.7);
}

TEST(UniformStateChannelTest, KeepsOrMovesToAnotherState) {
  const UniformStateChannel ch(4, 0.3);
  EXPECT_DOUBLE_EQ(ch.Prob(2, 2), 0.7);
  EXPECT_DOUBLE_EQ(ch.Prob(1, 2), 0.1);
  const DiscreteChannel d = ch.ToDiscrete();
  EXPECT_DOUBLE_EQ(d(3, 0), 0.1);
}

TEST(UniformStateChannelTest, EmpiricalTransitionsMatchMatrix) {
  const UniformStateChannel ch(5, 0.4);
  constexpr int kN = 200'000;
  std::vector<int> hits(5, 0);
  for (int n = 0; n < kN; ++n) {
    SplitMix64 rng = RecordStream(3, StreamTag::kSequence, n);
    ++hits[ch.Sample(2, rng)];
  }
  for (int i = 0; i < 5; ++i) {
    const double p = ch.Prob(i, 2);
    EXPECT_LT(std::abs(hits[i] / double{kN} - p),
              5 * std::sqrt(p * (1 - p) / kN));
  }
}

TEST(ValidateSpreadNoiseTest, IdentityHasZeroEntries) {
  const auto v = ValidateSpreadNoise(DiscreteChannel::Identity(2));
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.reason, InvalidReason::kZeroEntry);
}

TEST(ValidateSpreadNoiseTest, HalfFlipIsSingular) {
  const auto v = ValidateSpreadNoise(FlipChannel::Symmetric(0.5));
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.reason, InvalidReason::kSingular);
  EXPECT_EQ(ValidateSpreadNoise(FlipChannel::Symmetric(0.5).ToDiscrete()).reason,
            InvalidReason::kSingular);
}

TEST(ValidateSpreadNoiseTest, FlipPointTwoIsValid) {
  EXPECT_TRUE(ValidateSpreadNoise(FlipChannel::Symmetric(0.2)).valid);
  EXPECT_TRUE(ValidateSpreadNoise(FlipChannel::Symmetric(0.2).ToDiscrete()).valid);
}

TEST(ValidateSpreadNoiseTest, UniformStateAgreesWithDenseCheck) {
  for (int k : {2, 3, 6}) {
    for (double p : {0.0, 0.2, 0.5, 2.0 / 3.0, 0.8}) {
      const UniformStateChannel ch(k, p);
      const auto structured = ValidateSpreadNoise(ch);
      const auto dense = ValidateSpreadNoise(ch.ToDiscrete());
      EXPECT_EQ(structured.valid, dense.valid) << "K=" << k << " p=" << p;
      EXPECT_EQ(structured.reason, dense.reason) << "K=" << k << " p=" << p;
    }
  }
  // K = 256: singular exactly at p_f = (K-1)/K.
  EXPECT_TRUE(ValidateSpreadNoise(UniformStateChannel(256, 0.4)).valid);
  EXPECT_FALSE(ValidateSpreadNoise(UniformStateChannel(256, 255.0 / 256)).valid);
}

TEST(CorruptDiscreteTest, NoiselessChannelIsIdentity) {
  const std::vector<int> in = {0, 1, 1, 0, 1};
  EXPECT_EQ(CorruptDiscrete(in, FlipChannel::Symmetric(0.0).ToDiscrete(), 9), in);
}

TEST(CorruptDiscreteTest, FlipFractionMatchesBinomial) {
  const std::vector<int> zeros(1'000'000, 0);
  const auto out =
      CorruptDiscrete(zeros, FlipChannel::Symmetric(0.2).ToDiscrete(), 11);
  const double ones = std::accumulate(out.begin(), out.end(), 0.0);
  EXPECT_NEAR(ones / zeros.size(), 0.2, 0.002);
}

TEST(CorruptDiscreteTest, DeterministicAndRangeChecked) {
  const std::vector<int> in = {0, 2, 1, 2, 0, 1};
  const DiscreteChannel ch = UniformStateChannel(3, 0.5).ToDiscrete();
  EXPECT_EQ(CorruptDiscrete(in, ch, 4), CorruptDiscrete(in, ch, 4));
  const std::vector<int> bad = {0, 3};
  EXPECT_THROW(CorruptDiscrete(bad, ch, 4), InvalidArgument);
}

TEST(CorruptGaussianTest, VanishingNoise) {
  Matrix m(3, 2);
  m(1, 1) = 5.0;
  const Matrix out = CorruptGaussian(m, GaussianChannel({1e-12}), 1);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(out(r, c), m(r, c), 1e-5);
  }
}

TEST(CorruptGaussianTest, NoiseMomentsMatchVariance) {
  Matrix m(1'000'000, 1);
  const Matrix out = CorruptGaussian(m, GaussianChannel({0.1}), 2);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    sum += out(r, 0);
    sum_sq += out(r, 0) * out(r, 0);
  }
  const double mean = sum / m.rows();
  EXPECT_NEAR(mean, 0.0, 0.001);
  EXPECT_NEAR(sum_sq / m.rows() - mean * mean, 0.1, 0.001);
}

TEST(CorruptGaussianTest, DimensionMismatch) {
  EXPECT_THROW(CorruptGaussian(Matrix(2, 3), GaussianChannel({1.0, 1.0}), 0),
               InvalidArgument);
  EXPECT_THROW(GaussianChannel({0.0}), InvalidArgument);
}

TEST(PosteriorOverCleanTest, EmptyObservationsReturnPrior) {
  const std::vector<double> prior = {0.3, 0.7};
  const auto post = PosteriorOverClean(
      prior, {}, FlipChannel::Symmetric(0.2).ToDiscrete());
  EXPECT_NEAR(post[0], 0.3, 1e-15);
  EXPECT_NEAR(post[1], 0.7, 1e-15);
}

TEST(PosteriorOverCleanTest, ThreeOnesArithmetic) {
  const std::vector<double> prior = {0.5, 0.5};
  const std::vector<int> obs = {1, 1, 1};
  const auto post =
      PosteriorOverClean(prior, obs, FlipChannel::Symmetric(0.2).ToDiscrete());
  const double expected = std::pow(0.8, 3) / (std::pow(0.8, 3) + std::pow(0.2, 3));
  EXPECT_NEAR(post[1], expected, 1e-12);
  EXPECT_NEAR(post[1], 0.9846, 1e-4);
  EXPECT_NEAR(post[0] + post[1], 1.0, 1e-12);
}

TEST(PosteriorOverCleanTest, UninformativeChannelKeepsUniform) {
  const std::vector<double> prior = {0.5, 0.5};
  const std::vector<int> obs = {1, 0, 1, 1, 1};
  const auto post =
      PosteriorOverClean(prior, obs, FlipChannel::Symmetric(0.5).ToDiscrete());
  EXPECT_NEAR(post[0], 0.5, 1e-12);
}

TEST(PosteriorOverCleanTest, InvariantToPriorScaleAndDegenerate) {
  const DiscreteChannel ch = UniformStateChannel(3, 0.3).ToDiscrete();
  const std::vector<int> obs = {2, 0, 2};
  const auto a = PosteriorOverClean(std::vector<double>{0.2, 0.3, 0.5}, obs, ch);
  const auto b = PosteriorOverClean(std::vector<double>{2.0, 3.0, 5.0}, obs, ch);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  const std::vector<int> one = {1};
  EXPECT_THROW(PosteriorOverClean(std::vector<double>{1.0, 0.0},
                                  one, DiscreteChannel::Identity(2)),
               NumericalError);
}

// Posterior mass on the true state after M releases. The mean over trials
// is compared with an exact enumeration over the binomial number of flips.
TEST(PosteriorOverCleanTest, ConcentratesWithRepeatedReleases) {
  const FlipChannel flip = FlipChannel::Symmetric(0.2);
  const DiscreteChannel ch = flip.ToDiscrete();
  const std::vector<double> prior = {0.5, 0.5};
  for (int m : {5, 10, 20}) {
    double exact = 0.0;
    for (int k = 0; k <= m; ++k) {  // k flipped observations
      const double pk = std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                                 std::lgamma(m - k + 1.0)) *
                        std::pow(0.2, k) * std::pow(0.8, m - k);
      const double post = 1.0 / (1.0 + std::pow(0.25, m - 2 * k));
      exact += pk * post;
    }
    constexpr int kTrials = 1000;
    double total = 0.0, total_sq = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      SplitMix64 rng = RecordStream(m, StreamTag::kMonteCarlo, t);
      std::vector<int> obs(m);
      for (int& o : obs) o = flip.Sample(1, rng);
      const double mass = PosteriorOverClean(prior, obs, ch)[1];
      total += mass;
      total_sq += mass * mass;
    }
    const double mean = total / kTrials;
    const double se = std::sqrt((total_sq / kTrials - mean * mean) / kTrials);
    EXPECT_NEAR(mean, exact, 3 * se + 1e-12) << "M=" << m;
    EXPECT_GT(mean + 3 * se, 1.0 - std::exp(-m / 4.0)) << "M=" << m;
  }
}

TEST(ChannelSetTest, TrainableAcceptsNoiselessPassthrough) {
  ChannelSet set;
  EXPECT_NO_THROW(CheckTrainable(set, FeatureDomain::Continuous(), 3));
  set.label = FlipChannel::Symmetric(0.5);
  EXPECT_THROW(CheckTrainable(set, FeatureDomain::Continuous(), 3),
               InvalidArgument);
  set.label = FlipChannel::Symmetric(0.2);
  set.input = UniformStateChannel(4, 0.2);
  EXPECT_THROW(CheckTrainable(set, FeatureDomain::Continuous(), 3),
               InvalidArgument);
  EXPECT_NO_THROW(CheckTrainable(set, FeatureDomain::Discrete(4), 3));
}

TEST(CorruptDatasetTest, PreservesShapeAndDomain) {
  Matrix m(50, 4);
  std::vector<uint8_t> labels(50);
  for (std::size_t r = 0; r < 50; ++r) {
    labels[r] = r % 2;
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = (r + c) % 3;
  }
  const LabeledDataset clean(m, labels, FeatureDomain::Discrete(3),
                             Provenance::Clean());
  ChannelSet set{FlipChannel::Symmetric(0.3), UniformStateChannel(3, 0.3)};
  const LabeledDataset noisy = CorruptDataset(clean, set, 17);
  EXPECT_EQ(noisy.size(), clean.size());
  EXPECT_EQ(noisy.dims(), clean.dims());
  EXPECT_EQ(noisy.domain(), clean.domain());
  EXPECT_TRUE(noisy.provenance().corrupted);
  EXPECT_EQ(noisy.provenance().seed, 17u);
  EXPECT_EQ(noisy.ContentHash(), CorruptDataset(clean, set, 17).ContentHash());
  EXPECT_NE(noisy.ContentHash(), CorruptDataset(clean, set, 18).ContentHash());
}

}  // namespace
}  // namespace spreadlearn
