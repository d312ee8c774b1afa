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

// Enumeration oracle for the spread likelihood of a tiny discrete problem.

#ifndef SPREADLEARN_TESTS_EXACT_TOY_EM_H_
#define SPREADLEARN_TESTS_EXACT_TOY_EM_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "spreadlearn/channels.h"
#include "spreadlearn/logreg.h"
#include "spreadlearn/numeric.h"
#include "spreadlearn/priors.h"

namespace spreadlearn::oracle {

// Binary class, three binary features: every (c, x) is enumerable, so the
// E-step can be exact. Each record's batch holds all 16 configurations with
// their exact posterior weights; the M-step is the library's gradient step and
// prior update. The spread log likelihood must not decrease.
class ExactToyEm {
 public:
  static constexpr int kDims = 3;
  static constexpr int kConfigs = 2 << kDims;

  ExactToyEm(LabeledDataset noisy, ChannelSet channels)
      : noisy_(std::move(noisy)), channels_(std::move(channels)),
        input_(std::get<UniformStateChannel>(channels_.input)) {}

  static void Config(int index, int& c, double x[kDims]) {
    c = index & 1;
    for (int d = 0; d < kDims; ++d) x[d] = (index >> (d + 1)) & 1;
  }

  // log sum_{c,x} p(c~|c) prod_d p(x~_d|x_d) p(x_d) p(c|x), summed over n.
  double SpreadLoglik(const LogregModel& model, const DiscretePrior& prior) const {
    double total = 0.0;
    for (std::size_t n = 0; n < noisy_.size(); ++n) {
      double mass = 0.0;
      for (int i = 0; i < kConfigs; ++i) mass += Joint(model, prior, n, i);
      total += std::log(mass);
    }
    return total;
  }

  ImportanceBatch ExactBatch(const LogregModel& model,
                             const DiscretePrior& prior) const {
    ImportanceBatch batch(noisy_.size(), kConfigs, kDims, model.input_scale);
    for (std::size_t n = 0; n < noisy_.size(); ++n) {
      double mass = 0.0;
      std::vector<double> joint(kConfigs);
      for (int i = 0; i < kConfigs; ++i) mass += joint[i] = Joint(model, prior, n, i);
      for (int i = 0; i < kConfigs; ++i) {
        int c;
        double x[kDims];
        Config(i, c, x);
        batch.c(n, i) = c;
        std::copy(x, x + kDims, batch.x(n, i).begin());
        batch.w(n, i) = joint[i] / mass;
      }
    }
    return batch;
  }

 private:
  double Joint(const LogregModel& model, const DiscretePrior& prior,
               std::size_t n, int index) const {
    int c;
    double x[kDims];
    Config(index, c, x);
    double p = channels_.label.Prob(noisy_.label(n), c);
    for (int d = 0; d < kDims; ++d) {
      const int xd = static_cast<int>(x[d]);
      p *= input_.Prob(static_cast<int>(noisy_.x(n)[d]), xd) * prior.prob(d, xd);
    }
    const double pc1 = Predict(model, std::span<const double>(x, kDims));
    return p * (c == 1 ? pc1 : 1.0 - pc1);
  }

  LabeledDataset noisy_;
  ChannelSet channels_;
  UniformStateChannel input_;
};

// Clean data from a fixed three-feature model, corrupted with the given
// channels; the toy problem used for the monotonicity checks.
inline LabeledDataset ToyCleanData(std::size_t records) {
  Matrix m(records, 3);
  std::vector<uint8_t> labels(records);
  const double theta0[4] = {2.0, -1.5, 1.0, -0.3};
  for (std::size_t n = 0; n < records; ++n) {
    SplitMix64 rng = RecordStream(12, StreamTag::kSynthetic, n);
    double z = theta0[3];
    for (int d = 0; d < 3; ++d) {
      m(n, d) = rng.Uniform() < 0.3 + 0.2 * d ? 1 : 0;
      z += theta0[d] * m(n, d);
    }
    labels[n] = rng.Uniform() < Sigmoid(z);
  }
  return {std::move(m), std::move(labels), FeatureDomain::Discrete(2),
          Provenance::Clean()};
}

// Runs exact EM with gradient M-steps and returns the spread log likelihood
// after each iteration (entry 0 is the starting point).
inline std::vector<double> ExactEmTrace(const ExactToyEm& toy, std::size_t records,
                                        int iterations, LogregModel* final_model) {
  LogregModel model = LogregModel::Zero(3, 1.0);
  DiscretePrior prior = DiscretePrior::Flat(3, 2);
  std::vector<double> trace = {toy.SpreadLoglik(model, prior)};
  const double lr = 0.5 / static_cast<double>(records);
  for (int it = 0; it < iterations; ++it) {
    const ImportanceBatch batch = toy.ExactBatch(model, prior);
    const EnergyResult e = EnergyClass(batch, model.theta);
    for (std::size_t j = 0; j < model.theta.size(); ++j) {
      model.theta[j] += lr * e.gradient[j];
    }
    prior = UpdatePriorDiscrete(batch, 2, 0.0);
    trace.push_back(toy.SpreadLoglik(model, prior));
  }
  if (final_model != nullptr) *final_model = model;
  return trace;
}

}  // namespace spreadlearn::oracle

#endif  // SPREADLEARN_TESTS_EXACT_TOY_EM_H_
