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

// Corruption channels ("spread noise") for randomised response.
//
// A discrete channel is a column-stochastic matrix P with
// P(i, j) = p(noisy = i | clean = j). Each data owner releases exactly one
// draw from the channel; the learner knows the channel but never the clean
// value.

#ifndef SPREADLEARN_CHANNELS_H_
#define SPREADLEARN_CHANNELS_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spreadlearn/dataset.h"
#include "spreadlearn/numeric.h"
#include "spreadlearn/rng.h"

namespace spreadlearn {

inline constexpr double kStochasticTolerance = 1e-12;
inline constexpr double kDefaultSingularTolerance = 1e-9;

class DiscreteChannel {
 public:
  // `matrix` is row-major K x K. Throws InvalidArgument unless every entry is
  // in [0,1] and every column sums to 1 within 1e-12.
  DiscreteChannel(int num_states, std::vector<double> matrix);

  static DiscreteChannel Identity(int num_states);

  int num_states() const { return num_states_; }
  double operator()(int noisy, int clean) const {
    return matrix_[static_cast<std::size_t>(noisy) * num_states_ + clean];
  }
  std::span<const double> matrix() const { return matrix_; }

  // Inverse-CDF draw from column `clean` using a uniform in [0,1).
  int Sample(int clean, double u) const;

  template <typename Rng>
  int Sample(int clean, Rng& rng) const {
    return Sample(clean, rng.Uniform());
  }

  bool IsIdentity() const;

 private:
  int num_states_;
  std::vector<double> matrix_;
};

// Binary label channel. p_0to1 = p(noisy=1 | clean=0), p_1to0 likewise.
class FlipChannel {
 public:
  FlipChannel(double p_0to1, double p_1to0);
  static FlipChannel Symmetric(double p_flip) { return {p_flip, p_flip}; }

  double p_0to1() const { return p_0to1_; }
  double p_1to0() const { return p_1to0_; }

  // p(noisy | clean) for noisy, clean in {0,1}.
  double Prob(int noisy, int clean) const;

  // Columns [1-p_0to1, p_0to1] and [p_1to0, 1-p_1to0].
  DiscreteChannel ToDiscrete() const;

  template <typename Rng>
  int Sample(int clean, Rng& rng) const {
    const double flip = clean == 0 ? p_0to1_ : p_1to0_;
    return rng.Uniform() < flip ? 1 - clean : clean;
  }

  bool IsNoiseless() const { return p_0to1_ == 0.0 && p_1to0_ == 0.0; }

 private:
  double p_0to1_;
  double p_1to0_;
};

// Keeps the state with probability 1 - p_f, otherwise moves to one of the
// K - 1 other states uniformly. Stored as (K, p_f); never materialized as a
// dense matrix unless asked.
class UniformStateChannel {
 public:
  UniformStateChannel(int num_states, double p_flip);

  int num_states() const { return num_states_; }
  double p_flip() const { return p_flip_; }

  double Prob(int noisy, int clean) const {
    return noisy == clean ? 1.0 - p_flip_ : OffDiagonal();
  }
  double OffDiagonal() const { return p_flip_ / (num_states_ - 1); }

  DiscreteChannel ToDiscrete() const;

  template <typename Rng>
  int Sample(int clean, Rng& rng) const {
    if (rng.Uniform() >= p_flip_) return clean;
    int other = static_cast<int>(rng.Uniform() * (num_states_ - 1));
    if (other >= num_states_ - 1) other = num_states_ - 2;
    return other >= clean ? other + 1 : other;
  }

  bool IsNoiseless() const { return p_flip_ == 0.0; }

 private:
  int num_states_;
  double p_flip_;
};

// Additive zero-mean Gaussian noise. A single variance is shared by every
// dimension; otherwise there is one variance per dimension.
class GaussianChannel {
 public:
  explicit GaussianChannel(std::vector<double> variances);

  double variance(std::size_t d) const {
    return variances_.size() == 1 ? variances_[0] : variances_[d];
  }
  bool shared() const { return variances_.size() == 1; }
  std::span<const double> variances() const { return variances_; }
  // Throws InvalidArgument unless the channel can act on `dims` features.
  void CheckDims(std::size_t dims) const;

 private:
  std::vector<double> variances_;
};

enum class InvalidReason { kNone, kZeroEntry, kSingular };

struct ValidityVerdict {
  bool valid = true;
  InvalidReason reason = InvalidReason::kNone;
  std::string detail;
};

// Sufficient condition for discrete spread noise: all entries > 0 and
// |det P| > tol.
ValidityVerdict ValidateSpreadNoise(const DiscreteChannel& channel,
                                    double tol = kDefaultSingularTolerance);
ValidityVerdict ValidateSpreadNoise(const FlipChannel& channel,
                                    double tol = kDefaultSingularTolerance);
// Structured check: P = (1-p_f-b) I + b 11^T with b = p_f/(K-1) has
// eigenvalues 1 and 1 - p_f K/(K-1) (multiplicity K-1). Invertibility is
// judged on the smallest |eigenvalue| because det underflows for large K.
ValidityVerdict ValidateSpreadNoise(const UniformStateChannel& channel,
                                    double tol = kDefaultSingularTolerance);
// Gaussian kernels have a strictly positive Fourier transform.
ValidityVerdict ValidateSpreadNoise(const GaussianChannel& channel);

std::string ToString(InvalidReason reason);

// Element n is drawn from column states[n] using RecordStream(seed,
// kSequence, n). Throws InvalidArgument on a state outside [0, K).
std::vector<int> CorruptDiscrete(std::span<const int> states,
                                 const DiscreteChannel& channel, uint64_t seed);

// data (N x D) plus independent N(0, variance_d) draws, one stream per row.
Matrix CorruptGaussian(const Matrix& data, const GaussianChannel& channel,
                       uint64_t seed);

// p(clean | observations) ∝ prior(clean) * prod_m P(obs_m, clean). The prior
// need not be normalized. Throws NumericalError when every state has zero
// posterior mass.
std::vector<double> PosteriorOverClean(std::span<const double> prior,
                                       std::span<const int> observations,
                                       const DiscreteChannel& channel);

// Input-side corruption applied independently to every feature.
using InputChannel = std::variant<std::monostate, UniformStateChannel,
                                  DiscreteChannel, GaussianChannel>;

struct ChannelSet {
  FlipChannel label = FlipChannel::Symmetric(0.0);
  InputChannel input;  // monostate: inputs released unchanged

  // Short stable description, recorded in dataset provenance.
  std::string Id() const;
};

// Valid spread noise, or exactly noiseless (passthrough). Throws
// InvalidArgument otherwise, and when the input channel does not fit the
// dataset domain.
void CheckTrainable(const ChannelSet& channels, const FeatureDomain& domain,
                    std::size_t dims);

// Corrupts labels (stream kLabelNoise) and features (stream kInputNoise), one
// stream per record. Preserves N, D and domain.
LabeledDataset CorruptDataset(const LabeledDataset& data,
                              const ChannelSet& channels, uint64_t seed);

}  // namespace spreadlearn

#endif  // SPREADLEARN_CHANNELS_H_
