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

#ifndef SPREADLEARN_PRIORS_H_
#define SPREADLEARN_PRIORS_H_

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "spreadlearn/dataset.h"

namespace spreadlearn {

inline constexpr double kDefaultPriorFloor = 1e-6;

// Factorised input model p(x) = prod_d p(x[d] | d) over K states per feature.
class DiscretePrior {
 public:
  DiscretePrior(std::size_t dims, int num_states, std::vector<double> tables);

  static DiscretePrior Flat(std::size_t dims, int num_states);

  // Normalizes each row of `weights` (D x K, nonnegative), floors entries at
  // `floor` and renormalizes. Rows with zero total become flat.
  static DiscretePrior FromWeights(std::size_t dims, int num_states,
                                   std::vector<double> weights, double floor);

  std::size_t dims() const { return dims_; }
  int num_states() const { return num_states_; }
  std::span<const double> table(std::size_t d) const {
    return {tables_.data() + d * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  double prob(std::size_t d, int k) const { return tables_[d * num_states_ + k]; }
  std::span<const double> tables() const { return tables_; }

 private:
  std::size_t dims_;
  int num_states_;
  std::vector<double> tables_;
};

// Factorised Gaussian input model: x[d] ~ N(mean_d, variance_d). A single
// entry in either vector is shared by all features.
struct GaussianPrior {
  std::vector<double> mean = {0.0};
  std::vector<double> variance = {10.0};

  double mean_at(std::size_t d) const {
    return mean.size() == 1 ? mean[0] : mean[d];
  }
  double variance_at(std::size_t d) const {
    return variance.size() == 1 ? variance[0] : variance[d];
  }
  void Check(std::size_t dims) const;
};

using InputPrior = std::variant<std::monostate, DiscretePrior, GaussianPrior>;

// Per-feature empirical state frequencies of clean discrete data, floored at
// `floor` and renormalized. Throws InvalidArgument for continuous features.
DiscretePrior TrueMarginalPrior(const LabeledDataset& data,
                                double floor = kDefaultPriorFloor);

}  // namespace spreadlearn

#endif  // SPREADLEARN_PRIORS_H_
