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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spreadlearn/error.h"
#include "spreadlearn/parallel.h"

namespace spreadlearn {
namespace {

void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must be a probability in [0,1], got " << p;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

DiscreteChannel::DiscreteChannel(int num_states, std::vector<double> matrix)
    : num_states_(num_states), matrix_(std::move(matrix)) {
  if (num_states_ < 1) throw InvalidArgument("channel needs at least 1 state");
  const auto k = static_cast<std::size_t>(num_states_);
  if (matrix_.size() != k * k) {
    throw InvalidArgument("channel matrix must be K x K");
  }
  for (double v : matrix_) CheckProbability(v, "channel entry");
  for (std::size_t j = 0; j < k; ++j) {
    double column = 0.0;
    for (std::size_t i = 0; i < k; ++i) column += matrix_[i * k + j];
    if (std::abs(column - 1.0) > kStochasticTolerance) {
      std::ostringstream msg;
      msg << "channel column " << j << " sums to " << column << ", not 1";
      throw InvalidArgument(msg.str());
    }
  }
}

DiscreteChannel DiscreteChannel::Identity(int num_states) {
  const auto k = static_cast<std::size_t>(num_states);
  std::vector<double> m(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0;
  return DiscreteChannel(num_states, std::move(m));
}

int DiscreteChannel::Sample(int clean, double u) const {
  double cumulative = 0.0;
  int last_positive = clean;
  for (int i = 0; i < num_states_; ++i) {
    const double p = (*this)(i, clean);
    if (p <= 0.0) continue;
    last_positive = i;
    cumulative += p;
    if (u < cumulative) return i;
  }
  // Rounding left u above the column total.
  return last_positive;
}

bool DiscreteChannel::IsIdentity() const {
  for (int i = 0; i < num_states_; ++i) {
    for (int j = 0; j < num_states_; ++j) {
      if ((*this)(i, j) != (i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

FlipChannel::FlipChannel(double p_0to1, double p_1to0)
    : p_0to1_(p_0to1), p_1to0_(p_1to0) {
  CheckProbability(p_0to1, "p_0to1");
  CheckProbability(p_1to0, "p_1to0");
}

double FlipChannel::Prob(int noisy, int clean) const {
  if (clean == 0) return noisy == 1 ? p_0to1_ : 1.0 - p_0to1_;
  return noisy == 0 ? p_1to0_ : 1.0 - p_1to0_;
}

DiscreteChannel FlipChannel::ToDiscrete() const {
  // Row-major (noisy, clean).
  return DiscreteChannel(2, {1.0 - p_0to1_, p_1to0_, p_0to1_, 1.0 - p_1to0_});
}

UniformStateChannel::UniformStateChannel(int num_states, double p_flip)
    : num_states_(num_states), p_flip_(p_flip) {
  if (num_states < 2) {
    throw InvalidArgument("uniform-state channel needs at least 2 states");
  }
  CheckProbability(p_flip, "p_f");
}

DiscreteChannel UniformStateChannel::ToDiscrete() const {
  const auto k = static_cast<std::size_t>(num_states_);
  std::vector<double> m(k * k, OffDiagonal());
  for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0 - p_flip_;
  // Re-balance so each column sums to 1 to the last ulp.
  for (std::size_t j = 0; j < k; ++j) {
    double off = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != j) off += m[i * k + j];
    }
    m[j * k + j] = 1.0 - off;
  }
  return DiscreteChannel(num_states_, std::move(m));
}

GaussianChannel::GaussianChannel(std::vector<double> variances)
    : variances_(std::move(variances)) {
  if (variances_.empty()) {
    throw InvalidArgument("gaussian channel needs at least one variance");
  }
  for (double v : variances_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("gaussian channel variances must be positive");
    }
  }
}

void GaussianChannel::CheckDims(std::size_t dims) const {
  if (!shared() && variances_.size() != dims) {
    std::ostringstream msg;
    msg << "gaussian channel has " << variances_.size()
        << " variances but the data has " << dims << " features";
    throw InvalidArgument(msg.str());
  }
}

std::string ToString(InvalidReason reason) {
  switch (reason) {
    case InvalidReason::kNone:
      return "none";
    case InvalidReason::kZeroEntry:
      return "zero-entry";
    case InvalidReason::kSingular:
      return "singular";
  }
  return "unknown";
}

ValidityVerdict ValidateSpreadNoise(const DiscreteChannel& channel,
                                    double tol) {
  const auto k = static_cast<std::size_t>(channel.num_states());
  for (double v : channel.matrix()) {
    if (!(v > 0.0)) {
      return {false, InvalidReason::kZeroEntry,
              "channel has a zero entry; every P_ij must be positive"};
    }
  }
  Eigen::MatrixXd m(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      m(i, j) = channel(static_cast<int>(i), static_cast<int>(j));
    }
  }
  const double det = m.partialPivLu().determinant();
  if (!(std::abs(det) > tol)) {
    std::ostringstream msg;
    msg << "|det P| = " << std::abs(det) << " is not above " << tol;
    return {false, InvalidReason::kSingular, msg.str()};
  }
  return {};
}

ValidityVerdict ValidateSpreadNoise(const FlipChannel& channel, double tol) {
  return ValidateSpreadNoise(channel.ToDiscrete(), tol);
}

ValidityVerdict ValidateSpreadNoise(const UniformStateChannel& channel,
                                    double tol) {
  const double p = channel.p_flip();
  if (!(p > 0.0) || !(p < 1.0) || !(channel.OffDiagonal() > 0.0)) {
    return {false, InvalidReason::kZeroEntry,
            "uniform-state channel has a zero entry (p_f must be in (0,1))"};
  }
  const double k = channel.num_states();
  const double smallest = std::min(1.0, std::abs(1.0 - p * k / (k - 1.0)));
  if (!(smallest > tol)) {
    std::ostringstream msg;
    msg << "smallest |eigenvalue| " << smallest << " is not above " << tol;
    return {false, InvalidReason::kSingular, msg.str()};
  }
  return {};
}

ValidityVerdict ValidateSpreadNoise(const GaussianChannel&) { return {}; }

std::vector<int> CorruptDiscrete(std::span<const int> states,
                                 const DiscreteChannel& channel,
                                 uint64_t seed) {
  const int k = channel.num_states();
  for (int s : states) {
    if (s < 0 || s >= k) {
      std::ostringstream msg;
      msg << "state " << s << " outside [0, " << k << ")";
      throw InvalidArgument(msg.str());
    }
  }
  std::vector<int> out(states.size());
  ParallelFor(states.size(), [&](std::size_t n) {
    SplitMix64 rng = RecordStream(seed, StreamTag::kSequence, n);
    out[n] = channel.Sample(states[n], rng);
  });
  return out;
}

Matrix CorruptGaussian(const Matrix& data, const GaussianChannel& channel,
                       uint64_t seed) {
  channel.CheckDims(data.cols());
  Matrix out = data;
  ParallelFor(data.rows(), [&](std::size_t n) {
    SplitMix64 rng = RecordStream(seed, StreamTag::kInputNoise, n);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto row = out.row(n);
    for (std::size_t d = 0; d < row.size(); ++d) {
      row[d] += std::sqrt(channel.variance(d)) * normal(rng);
    }
  });
  return out;
}

std::vector<double> PosteriorOverClean(std::span<const double> prior,
                                       std::span<const int> observations,
                                       const DiscreteChannel& channel) {
  const int k = channel.num_states();
  if (prior.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("prior length must equal the number of states");
  }
  double prior_total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) throw InvalidArgument("prior entries must be >= 0");
    prior_total += p;
  }
  // Unnormalized priors are accepted; only the ratios matter.
  if (!(prior_total > 0.0)) throw InvalidArgument("prior has no mass");
  for (int obs : observations) {
    if (obs < 0 || obs >= k) throw InvalidArgument("observation out of range");
  }
  // Log space: M can be large enough to underflow the plain product.
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_post(k, kNegInf);
  for (int c = 0; c < k; ++c) {
    if (prior[c] <= 0.0) continue;
    double acc = std::log(prior[c]);
    for (int obs : observations) {
      const double p = channel(obs, c);
      if (p <= 0.0) {
        acc = kNegInf;
        break;
      }
      acc += std::log(p);
    }
    log_post[c] = acc;
  }
  const double top = *std::max_element(log_post.begin(), log_post.end());
  if (top == kNegInf) {
    throw NumericalError(
        "degenerate evidence: observations have zero probability under the "
        "prior and channel");
  }
  std::vector<double> post(k);
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    post[c] = log_post[c] == kNegInf ? 0.0 : std::exp(log_post[c] - top);
    total += post[c];
  }
  for (double& p : post) p /= total;
  return post;
}

std::string ChannelSet::Id() const {
  std::ostringstream id;
  id.precision(17);
  id << "label:flip(" << label.p_0to1() << "," << label.p_1to0() << ")";
  std::visit(
      [&](const auto& ch) {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          id << ";input:none";
        } else if constexpr (std::is_same_v<T, UniformStateChannel>) {
          id << ";input:uniform_state(" << ch.num_states() << ","
             << ch.p_flip() << ")";
        } else if constexpr (std::is_same_v<T, DiscreteChannel>) {
          id << ";input:discrete(" << ch.num_states() << ")";
        } else {
          id << ";input:gaussian(";
          for (std::size_t i = 0; i < ch.variances().size(); ++i) {
            id << (i ? "," : "") << ch.variances()[i];
          }
          id << ")";
        }
      },
      input);
  return id.str();
}

void CheckTrainable(const ChannelSet& channels, const FeatureDomain& domain,
                    std::size_t dims) {
  const auto label_verdict = ValidateSpreadNoise(channels.label);
  if (!label_verdict.valid && !channels.label.IsNoiseless()) {
    throw InvalidArgument("label channel is not valid spread noise: " +
                          label_verdict.detail);
  }
  std::visit(
      [&](const auto& ch) {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return;
        } else if constexpr (std::is_same_v<T, GaussianChannel>) {
          if (domain.discrete()) {
            throw InvalidArgument("gaussian channel needs continuous features");
          }
          ch.CheckDims(dims);
        } else {
          if (!domain.discrete() || domain.num_states != ch.num_states()) {
            throw InvalidArgument(
                "discrete input channel does not match the feature domain");
          }
          const auto verdict = ValidateSpreadNoise(ch);
          bool noiseless;
          if constexpr (std::is_same_v<T, UniformStateChannel>) {
            noiseless = ch.IsNoiseless();
          } else {
            noiseless = ch.IsIdentity();
          }
          if (!verdict.valid && !noiseless) {
            throw InvalidArgument("input channel is not valid spread noise: " +
                                  verdict.detail);
          }
        }
      },
      channels.input);
}

LabeledDataset CorruptDataset(const LabeledDataset& data,
                              const ChannelSet& channels, uint64_t seed) {
  const std::size_t n_rows = data.size();
  const std::size_t dims = data.dims();
  std::vector<uint8_t> labels(n_rows);
  ParallelFor(n_rows, [&](std::size_t n) {
    SplitMix64 rng = RecordStream(seed, StreamTag::kLabelNoise, n);
    labels[n] = static_cast<uint8_t>(channels.label.Sample(data.label(n), rng));
  });

  Matrix features = data.features();
  std::visit(
      [&](const auto& ch) {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return;
        } else if constexpr (std::is_same_v<T, GaussianChannel>) {
          if (data.domain().discrete()) {
            throw InvalidArgument("gaussian channel needs continuous features");
          }
          features = CorruptGaussian(data.features(), ch, seed);
        } else {
          if (!data.domain().discrete() ||
              data.domain().num_states != ch.num_states()) {
            throw InvalidArgument(
                "discrete input channel does not match the feature domain");
          }
          ParallelFor(n_rows, [&](std::size_t n) {
            SplitMix64 rng = RecordStream(seed, StreamTag::kInputNoise, n);
            auto row = features.row(n);
            for (std::size_t d = 0; d < dims; ++d) {
              row[d] = ch.Sample(static_cast<int>(row[d]), rng);
            }
          });
        }
      },
      channels.input);
  return data.WithCorruption(std::move(features), std::move(labels),
                             channels.Id(), seed);
}

}  // namespace spreadlearn
