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

// Logistic regression trained from randomised-response data.
//
// The learner sees only corrupted pairs (c~, x~) and the channels that
// produced them. Training is EM on the spread likelihood with the E-step
// replaced by self-normalized importance sampling:
//
//   c^s ~ rho(c | c~)  ∝ p(c~ | c)
//   x^s ~ rho(x | x~)  ∝ p(x~ | x) p(x)          (factorised per feature)
//   w(s|n) = Sigmoid((2c^s-1) theta.x^s) / sum_s' Sigmoid(...)
//
// The M-step takes one gradient-ascent step on the weighted class energy
// sum_n sum_s w(s|n) log Sigmoid((2c^s-1) theta.x^s), halving the step until
// that energy does not decrease, and, when the input prior is learned, sets
// p(k|d) to the weighted state frequencies of the samples.

#ifndef SPREADLEARN_LOGREG_H_
#define SPREADLEARN_LOGREG_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spreadlearn/channels.h"
#include "spreadlearn/dataset.h"
#include "spreadlearn/priors.h"
#include "spreadlearn/rng.h"

namespace spreadlearn {

// p(c=1|x) = Sigmoid(theta . [input_scale * x, 1]). The last entry of theta is
// the bias (a constant-1 feature).
struct LogregModel {
  std::vector<double> theta;
  double input_scale = 1.0;

  static LogregModel Zero(std::size_t dims, double input_scale = 1.0) {
    return {std::vector<double>(dims + 1, 0.0), input_scale};
  }
  std::size_t dims() const { return theta.empty() ? 0 : theta.size() - 1; }
  // Weight vector without the bias.
  std::span<const double> weights() const {
    return std::span<const double>(theta).first(dims());
  }
};

// Discrete states are fed to the model as k / (K-1); continuous values as-is.
double InputScaleFor(const FeatureDomain& domain);

double Logit(const LogregModel& model, std::span<const double> x);
double Predict(const LogregModel& model, std::span<const double> x);

// (1/N) sum_n log Sigmoid((2c_n - 1) logit(x_n)).
double LogisticLoglik(const LogregModel& model, const LabeledDataset& data);

struct LogregConfig {
  double learning_rate = 0.2;
  int iterations = 400;
};

struct LogregFit {
  LogregModel model;
  std::vector<double> loglik_trace;  // mean log likelihood before each step
};

// Full-batch gradient ascent on the mean log likelihood, starting from zero.
LogregFit TrainLogreg(const LabeledDataset& data, const LogregConfig& config);

// S weighted samples of (c, x) for each of N noisy records.
class ImportanceBatch {
 public:
  ImportanceBatch(std::size_t records, std::size_t samples, std::size_t dims,
                  double value_scale);

  std::size_t records() const { return records_; }
  std::size_t samples() const { return samples_; }
  std::size_t dims() const { return dims_; }
  // Model input = value_scale * stored value.
  double value_scale() const { return value_scale_; }

  std::span<double> x(std::size_t n, std::size_t s) {
    return {x_.data() + (n * samples_ + s) * dims_, dims_};
  }
  std::span<const double> x(std::size_t n, std::size_t s) const {
    return {x_.data() + (n * samples_ + s) * dims_, dims_};
  }
  uint8_t& c(std::size_t n, std::size_t s) { return c_[n * samples_ + s]; }
  int c(std::size_t n, std::size_t s) const { return c_[n * samples_ + s]; }
  double& w(std::size_t n, std::size_t s) { return w_[n * samples_ + s]; }
  double w(std::size_t n, std::size_t s) const { return w_[n * samples_ + s]; }

  // Recomputes w(.|n) for every record from the current classifier.
  void Reweight(const LogregModel& model);

 private:
  std::size_t records_, samples_, dims_;
  double value_scale_;
  std::vector<double> x_;
  std::vector<uint8_t> c_;
  std::vector<double> w_;
};

// rho(c|c~) and rho(x|x~) for one channel/prior pairing. Precomputes the
// cumulative prior tables needed by the two-branch uniform-state sampler.
class ImportanceProposal {
 public:
  // Supported pairings: no input channel (x = x~), uniform-state or discrete
  // channel with a DiscretePrior, Gaussian channel with a GaussianPrior.
  ImportanceProposal(const ChannelSet& channels, const InputPrior& prior,
                     std::size_t dims);

  // rho(c = 1 | c~).
  double LabelProbabilityOne(int noisy_label) const;
  int SampleLabel(int noisy_label, SplitMix64& rng) const;
  void SampleInput(std::span<const double> noisy_x, SplitMix64& rng,
                   std::span<double> out) const;

 private:
  int SampleUniformState(std::size_t d, int noisy, SplitMix64& rng) const;

  ChannelSet channels_;
  InputPrior prior_;
  std::size_t dims_;
  std::vector<double> cdf_;  // D x K cumulative prior, uniform-state case
};

struct GaussianPosterior {
  double mean;
  double variance;
};

// rho(x_d | x~_d) for Gaussian noise variance `noise_var` and prior
// N(prior_mean, prior_var): precision a = 1/noise_var + 1/prior_var and mean
// b/a with b = x~/noise_var + prior_mean/prior_var.
GaussianPosterior GaussianProposal(double noisy, double noise_var,
                                   double prior_mean, double prior_var);

// Self-normalized weights from per-sample logits (2c^s-1) theta.x^s. The two
// spans may be the same storage.
void NormalizedWeights(std::span<const double> signed_logits,
                       std::span<double> weights);

// Draws S samples for record (c~, x~) and sets their weights.
void SampleImportanceRecord(int noisy_label, std::span<const double> noisy_x,
                            const LogregModel& model,
                            const ImportanceProposal& proposal,
                            std::size_t samples, SplitMix64& rng,
                            ImportanceBatch& batch, std::size_t record);

// Whole-dataset batch. Record n uses RecordStream(MixSeed(seed, iteration),
// kImportance, n), so draws do not depend on the thread schedule.
ImportanceBatch SampleImportance(const LabeledDataset& noisy,
                                 const LogregModel& model,
                                 const ImportanceProposal& proposal,
                                 std::size_t samples, uint64_t seed,
                                 uint64_t iteration);

struct EnergyResult {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d theta, weights held fixed
};

// sum_n sum_s w(s|n) log Sigmoid((2c^s-1) theta.x^s) and its gradient.
EnergyResult EnergyClass(const ImportanceBatch& batch,
                         std::span<const double> theta);
double EnergyClassValue(const ImportanceBatch& batch,
                        std::span<const double> theta);

// p(k|d) ∝ sum_n sum_s w(s|n) [x^s[d] = k], floored at `floor` and
// renormalized. Throws InvalidArgument for an empty batch or non-state values.
DiscretePrior UpdatePriorDiscrete(const ImportanceBatch& batch, int num_states,
                                  double floor = kDefaultPriorFloor);

enum class PriorMode { kFlat, kLearned, kFixed, kGaussian };

struct TrainConfig {
  std::size_t samples = 2;
  double learning_rate = 0.2;
  int max_outer_iters = 400;
  uint64_t seed = 0;
  PriorMode prior_mode = PriorMode::kFlat;
  // Stop when the 10-iteration average of the M-step energy gain (per
  // record, measured on the iteration's own batch) drops below this. <= 0
  // disables the test.
  double tolerance = 1e-7;
  double prior_floor = kDefaultPriorFloor;
  std::optional<DiscretePrior> fixed_prior;  // kFixed
  GaussianPrior gaussian_prior;              // kGaussian
};

struct SpreadFit {
  LogregModel model;
  InputPrior prior;
  std::vector<double> energy_trace;  // class energy per record, per iteration
  int iterations = 0;
  bool converged = false;
};

// Throws InvalidArgument for bad channels/config and NumericalError if the
// energy stops being finite.
SpreadFit TrainSpreadLogreg(const LabeledDataset& noisy,
                            const ChannelSet& channels,
                            const TrainConfig& config);

}  // namespace spreadlearn

#endif  // SPREADLEARN_LOGREG_H_
