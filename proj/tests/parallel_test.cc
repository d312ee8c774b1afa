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

// The OpenMP kernels against their serial counterparts.

#include <gtest/gtest.h>

#include <cmath>

#include "spreadlearn/baselines.h"
#include "spreadlearn/parallel.h"
#include "spreadlearn/reference.h"

namespace spreadlearn {
namespace {

class ThreadCapGuard {
 public:
  explicit ThreadCapGuard(int threads) { SetMaxThreads(threads); }
  ~ThreadCapGuard() { SetMaxThreads(0); }
};

LabeledDataset Images(std::size_t per_class) {
  SyntheticImageSpec spec;
  spec.per_class = per_class;
  spec.seed = 6;
  return GenerateSyntheticImages(spec);
}

void ExpectSameBatch(const ImportanceBatch& a, const ImportanceBatch& b) {
  ASSERT_EQ(a.records(), b.records());
  ASSERT_EQ(a.samples(), b.samples());
  for (std::size_t n = 0; n < a.records(); ++n) {
    for (std::size_t s = 0; s < a.samples(); ++s) {
      ASSERT_EQ(a.c(n, s), b.c(n, s));
      ASSERT_EQ(a.w(n, s), b.w(n, s));
      const auto xa = a.x(n, s), xb = b.x(n, s);
      ASSERT_TRUE(std::equal(xa.begin(), xa.end(), xb.begin()));
    }
  }
}

const ChannelSet kChannels{FlipChannel::Symmetric(0.2),
                           UniformStateChannel(16, 0.3)};

TEST(ParallelKernelTest, CorruptionIsBitIdentical) {
  const LabeledDataset clean = Images(300);
  const LabeledDataset serial = reference::CorruptDataset(clean, kChannels, 4);
  for (int threads : {1, 2, 4}) {
    ThreadCapGuard guard(threads);
    EXPECT_EQ(CorruptDataset(clean, kChannels, 4).ContentHash(),
              serial.ContentHash());
  }
}

TEST(ParallelKernelTest, ImportanceSamplingIsBitIdentical) {
  const LabeledDataset noisy = CorruptDataset(Images(300), kChannels, 4);
  LogregModel model = LogregModel::Zero(noisy.dims(), 1.0 / 15);
  for (std::size_t j = 0; j < model.theta.size(); ++j) {
    model.theta[j] = std::sin(0.7 * j);
  }
  const ImportanceProposal proposal(kChannels, DiscretePrior::Flat(64, 16), 64);
  const ImportanceBatch serial =
      reference::SampleImportance(noisy, model, proposal, 3, 9, 2);
  for (int threads : {1, 3}) {
    ThreadCapGuard guard(threads);
    ExpectSameBatch(SampleImportance(noisy, model, proposal, 3, 9, 2), serial);
  }
}

TEST(ParallelKernelTest, EnergyMatchesWithinRounding) {
  const LabeledDataset noisy = CorruptDataset(Images(400), kChannels, 4);
  const LogregModel model{std::vector<double>(65, 0.05), 1.0 / 15};
  const ImportanceProposal proposal(kChannels, DiscretePrior::Flat(64, 16), 64);
  const ImportanceBatch batch = SampleImportance(noisy, model, proposal, 2, 1, 0);
  const EnergyResult serial = reference::EnergyClass(batch, model.theta);
  EnergyResult first;
  for (int threads : {1, 2, 4}) {
    ThreadCapGuard guard(threads);
    const EnergyResult e = EnergyClass(batch, model.theta);
    EXPECT_NEAR(e.value, serial.value, 1e-12 * std::abs(serial.value));
    for (std::size_t j = 0; j < e.gradient.size(); ++j) {
      EXPECT_NEAR(e.gradient[j], serial.gradient[j], 1e-10);
    }
    if (threads == 1) {
      first = e;
    } else {
      EXPECT_EQ(e.value, first.value);
      EXPECT_EQ(e.gradient, first.gradient);
    }
  }
}

TEST(ParallelKernelTest, LogisticTrainingMatchesWithinRounding) {
  SyntheticSpec spec;
  spec.num_records = 3000;
  spec.dims = 6;
  spec.theta0 = UnitDirection(6, 2);
  spec.seed = 3;
  const LabeledDataset data = GenerateSynthetic(spec);
  LogregConfig config;
  config.iterations = 100;
  const LogregFit serial = reference::TrainLogreg(data, config);
  const LogregFit parallel = TrainLogreg(data, config);
  for (std::size_t j = 0; j < serial.model.theta.size(); ++j) {
    EXPECT_NEAR(parallel.model.theta[j], serial.model.theta[j], 1e-10);
  }
  EXPECT_NEAR(LogisticLoglik(parallel.model, data),
              reference::LogisticLoglik(parallel.model, data), 1e-12);
}

TEST(ParallelKernelTest, MonteCarloMatchesReference) {
  NoisyLabelAnalysis a;
  a.alpha = 0.2;
  a.mc_samples = 200'000;
  const McEstimate serial = reference::NoisyLabelGradientAtAlpha(a);
  McEstimate first;
  for (int threads : {1, 4}) {
    ThreadCapGuard guard(threads);
    const McEstimate m = NoisyLabelGradientAtAlpha(a);
    EXPECT_NEAR(m.mean, serial.mean, 1e-12);
    EXPECT_NEAR(m.std_error, serial.std_error, 1e-12);
    if (threads == 1) {
      first = m;
    } else {
      EXPECT_EQ(m.mean, first.mean);
    }
  }
}

TEST(ParallelKernelTest, SpreadTrainingIndependentOfThreadCount) {
  const LabeledDataset noisy = CorruptDataset(Images(200), kChannels, 8);
  TrainConfig config;
  config.max_outer_iters = 30;
  config.prior_mode = PriorMode::kLearned;
  std::vector<double> first;
  for (int threads : {1, 2, 4}) {
    ThreadCapGuard guard(threads);
    const SpreadFit fit = TrainSpreadLogreg(noisy, kChannels, config);
    if (threads == 1) {
      first = fit.model.theta;
    } else {
      EXPECT_EQ(fit.model.theta, first);
    }
  }
}

TEST(ParallelTest, BlockedSumIsThreadCountIndependent) {
  auto term = [](std::size_t i) { return 1.0 / (1.0 + i * 0.37); };
  double first = 0.0;
  for (int threads : {1, 2, 5}) {
    ThreadCapGuard guard(threads);
    const double v = BlockedSum(100'003, term);
    if (threads == 1) first = v;
    EXPECT_EQ(v, first);
  }
}

TEST(ParallelTest, ThreadCapIsHonoured) {
  ThreadCapGuard guard(2);
  EXPECT_EQ(MaxThreads(), 2);
}

}  // namespace
}  // namespace spreadlearn
