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

// Importance-sampled EM for spread logistic regression.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spreadlearn/error.h"
#include "spreadlearn/logreg.h"
#include "spreadlearn/parallel.h"

namespace spreadlearn {

ImportanceBatch::ImportanceBatch(std::size_t records, std::size_t samples,
                                 std::size_t dims, double value_scale)
    : records_(records),
      samples_(samples),
      dims_(dims),
      value_scale_(value_scale),
      x_(records * samples * dims, 0.0),
      c_(records * samples, 0),
      w_(records * samples, 0.0) {
  if (samples == 0) throw InvalidArgument("need at least one sample per record");
}

namespace {

double SignedLogit(const ImportanceBatch& batch, std::span<const double> theta,
                   std::size_t n, std::size_t s) {
  const std::size_t dims = batch.dims();
  const double logit =
      batch.value_scale() * Dot(theta.first(dims), batch.x(n, s)) +
      theta[dims];
  return batch.c(n, s) == 1 ? logit : -logit;
}

}  // namespace

void ImportanceBatch::Reweight(const LogregModel& model) {
  if (model.dims() != dims_) {
    throw InvalidArgument("model dimension does not match the batch");
  }
  ParallelFor(records_, [&](std::size_t n) {
    const std::span<double> w(w_.data() + n * samples_, samples_);
    for (std::size_t s = 0; s < samples_; ++s) {
      w[s] = SignedLogit(*this, model.theta, n, s);
    }
    NormalizedWeights(w, w);
  });
}

void NormalizedWeights(std::span<const double> signed_logits,
                       std::span<double> weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (double z : signed_logits) top = std::max(top, z);
  // Weights are proportional to Sigmoid(z); normalize directly unless the
  // largest one is near underflow.
  if (top > -600.0) {
    double total = 0.0;
    for (std::size_t s = 0; s < signed_logits.size(); ++s) {
      weights[s] = Sigmoid(signed_logits[s]);
      total += weights[s];
    }
    for (double& w : weights) w /= total;
    return;
  }
  // log Sigmoid(z) = z - log1p(exp(z)) ~ z here; shift by the top logit.
  double total = 0.0;
  for (std::size_t s = 0; s < signed_logits.size(); ++s) {
    weights[s] = std::exp(LogSigmoid(signed_logits[s]) - LogSigmoid(top));
    total += weights[s];
  }
  for (double& w : weights) w /= total;
}

GaussianPosterior GaussianProposal(double noisy, double noise_var,
                                   double prior_mean, double prior_var) {
  const double a = 1.0 / noise_var + 1.0 / prior_var;
  const double b = noisy / noise_var + prior_mean / prior_var;
  return {b / a, 1.0 / a};
}

ImportanceProposal::ImportanceProposal(const ChannelSet& channels,
                                       const InputPrior& prior,
                                       std::size_t dims)
    : channels_(channels), prior_(prior), dims_(dims) {
  const auto* discrete_prior = std::get_if<DiscretePrior>(&prior_);
  auto require_discrete_prior = [&](int k) {
    if (discrete_prior == nullptr || discrete_prior->num_states() != k ||
        discrete_prior->dims() != dims) {
      throw InvalidArgument(
          "discrete input channel needs a D x K discrete prior");
    }
  };
  if (const auto* ch = std::get_if<UniformStateChannel>(&channels_.input)) {
    require_discrete_prior(ch->num_states());
    const auto k = static_cast<std::size_t>(ch->num_states());
    cdf_.resize(dims * k);
    for (std::size_t d = 0; d < dims; ++d) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        acc += discrete_prior->prob(d, static_cast<int>(j));
        cdf_[d * k + j] = acc;
      }
    }
  } else if (const auto* dch = std::get_if<DiscreteChannel>(&channels_.input)) {
    require_discrete_prior(dch->num_states());
  } else if (const auto* gch = std::get_if<GaussianChannel>(&channels_.input)) {
    const auto* gp = std::get_if<GaussianPrior>(&prior_);
    if (gp == nullptr) {
      throw InvalidArgument("gaussian input channel needs a gaussian prior");
    }
    gp->Check(dims);
    gch->CheckDims(dims);
  }
}

double ImportanceProposal::LabelProbabilityOne(int noisy_label) const {
  const double p0 = channels_.label.Prob(noisy_label, 0);
  const double p1 = channels_.label.Prob(noisy_label, 1);
  return p1 / (p0 + p1);
}

int ImportanceProposal::SampleLabel(int noisy_label, SplitMix64& rng) const {
  return rng.Uniform() < LabelProbabilityOne(noisy_label) ? 1 : 0;
}

int ImportanceProposal::SampleUniformState(std::size_t d, int noisy,
                                           SplitMix64& rng) const {
  const auto& ch = std::get<UniformStateChannel>(channels_.input);
  const int k = ch.num_states();
  const double* cdf = cdf_.data() + d * k;
  const double p_noisy = cdf[noisy] - (noisy > 0 ? cdf[noisy - 1] : 0.0);
  const double other_mass = cdf[k - 1] - p_noisy;
  // rho(x=noisy) ∝ p(noisy) (1-p_f); rho(x=j) ∝ p(j) p_f/(K-1) for j != noisy.
  const double keep = p_noisy * (1.0 - ch.p_flip());
  const double move = other_mass * ch.OffDiagonal();
  if (!(move > 0.0) || rng.Uniform() * (keep + move) < keep) return noisy;

  // Inverse CDF of the prior restricted to states other than `noisy`.
  const double before = noisy > 0 ? cdf[noisy - 1] : 0.0;
  double target = rng.Uniform() * other_mass;
  if (target >= before) target += p_noisy;
  int state = static_cast<int>(std::upper_bound(cdf, cdf + k, target) - cdf);
  state = std::min(state, k - 1);
  if (state == noisy) state = noisy + 1 < k ? noisy + 1 : noisy - 1;
  return state;
}

void ImportanceProposal::SampleInput(std::span<const double> noisy_x,
                                     SplitMix64& rng,
                                     std::span<double> out) const {
  if (noisy_x.size() != dims_ || out.size() != dims_) {
    throw InvalidArgument("sampler dimension mismatch");
  }
  std::visit(
      [&](const auto& ch) {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          std::ranges::copy(noisy_x, out.begin());
        } else if constexpr (std::is_same_v<T, UniformStateChannel>) {
          for (std::size_t d = 0; d < dims_; ++d) {
            out[d] = SampleUniformState(d, static_cast<int>(noisy_x[d]), rng);
          }
        } else if constexpr (std::is_same_v<T, DiscreteChannel>) {
          const auto& prior = std::get<DiscretePrior>(prior_);
          const int k = ch.num_states();
          std::vector<double> mass(k);
          for (std::size_t d = 0; d < dims_; ++d) {
            const int noisy = static_cast<int>(noisy_x[d]);
            double total = 0.0;
            for (int j = 0; j < k; ++j) {
              total += ch(noisy, j) * prior.prob(d, j);
              mass[j] = total;
            }
            const double target = rng.Uniform() * total;
            int state = static_cast<int>(
                std::upper_bound(mass.begin(), mass.end(), target) -
                mass.begin());
            out[d] = std::min(state, k - 1);
          }
        } else {
          const auto& prior = std::get<GaussianPrior>(prior_);
          std::normal_distribution<double> normal(0.0, 1.0);
          for (std::size_t d = 0; d < dims_; ++d) {
            const auto post = GaussianProposal(noisy_x[d], ch.variance(d),
                                               prior.mean_at(d),
                                               prior.variance_at(d));
            out[d] = post.mean + std::sqrt(post.variance) * normal(rng);
          }
        }
      },
      channels_.input);
}

void SampleImportanceRecord(int noisy_label, std::span<const double> noisy_x,
                            const LogregModel& model,
                            const ImportanceProposal& proposal,
                            std::size_t samples, SplitMix64& rng,
                            ImportanceBatch& batch, std::size_t record) {
  if (samples != batch.samples() || model.dims() != batch.dims()) {
    throw InvalidArgument("importance batch shape mismatch");
  }
  for (std::size_t s = 0; s < samples; ++s) {
    batch.c(record, s) =
        static_cast<uint8_t>(proposal.SampleLabel(noisy_label, rng));
    proposal.SampleInput(noisy_x, rng, batch.x(record, s));
    batch.w(record, s) = SignedLogit(batch, model.theta, record, s);
  }
  // Normalized in place: the weight slots hold the signed logits until here.
  const std::span<double> w(&batch.w(record, 0), samples);
  NormalizedWeights(w, w);
}

ImportanceBatch SampleImportance(const LabeledDataset& noisy,
                                 const LogregModel& model,
                                 const ImportanceProposal& proposal,
                                 std::size_t samples, uint64_t seed,
                                 uint64_t iteration) {
  if (noisy.dims() != model.dims()) {
    throw InvalidArgument("model dimension does not match the data");
  }
  ImportanceBatch batch(noisy.size(), samples, noisy.dims(),
                        model.input_scale);
  const uint64_t key = MixSeed(seed, iteration);
  ParallelFor(noisy.size(), [&](std::size_t n) {
    SplitMix64 rng = RecordStream(key, StreamTag::kImportance, n);
    SampleImportanceRecord(noisy.label(n), noisy.x(n), model, proposal,
                           samples, rng, batch, n);
  });
  return batch;
}

EnergyResult EnergyClass(const ImportanceBatch& batch,
                         std::span<const double> theta) {
  const std::size_t dims = batch.dims();
  if (theta.size() != dims + 1) {
    throw InvalidArgument("theta must have D + 1 entries");
  }
  const double scale = batch.value_scale();
  auto acc = BlockedAccumulate(
      batch.records(), dims + 2, [&](std::size_t n, std::span<double> out) {
        for (std::size_t s = 0; s < batch.samples(); ++s) {
          const double w = batch.w(n, s);
          if (w == 0.0) continue;
          const double z = SignedLogit(batch, theta, n, s);
          const double sign = batch.c(n, s) == 1 ? 1.0 : -1.0;
          // d/dz log Sigmoid(z) = Sigmoid(-z); both share e = exp(-|z|).
          const double e = std::exp(-std::abs(z));
          const double sig_neg = (z >= 0 ? e : 1.0) / (1.0 + e);
          const double log_sig = std::min(z, 0.0) - std::log1p(e);
          const double g = w * sign * sig_neg;
          const auto x = batch.x(n, s);
          for (std::size_t d = 0; d < dims; ++d) out[d] += g * scale * x[d];
          out[dims] += g;
          out[dims + 1] += w * log_sig;
        }
      });
  EnergyResult result;
  result.value = acc[dims + 1];
  acc.resize(dims + 1);
  result.gradient = std::move(acc);
  return result;
}

double EnergyClassValue(const ImportanceBatch& batch,
                        std::span<const double> theta) {
  if (theta.size() != batch.dims() + 1) {
    throw InvalidArgument("theta must have D + 1 entries");
  }
  return BlockedSum(batch.records(), [&](std::size_t n) {
    double acc = 0.0;
    for (std::size_t s = 0; s < batch.samples(); ++s) {
      const double w = batch.w(n, s);
      if (w != 0.0) acc += w * LogSigmoid(SignedLogit(batch, theta, n, s));
    }
    return acc;
  });
}

DiscretePrior UpdatePriorDiscrete(const ImportanceBatch& batch, int num_states,
                                  double floor) {
  if (batch.records() == 0) throw InvalidArgument("empty importance batch");
  if (num_states < 1) throw InvalidArgument("need at least one state");
  const std::size_t dims = batch.dims();
  const auto k = static_cast<std::size_t>(num_states);
  std::vector<double> weights(dims * k, 0.0);
  std::atomic<bool> bad_value{false};
  ParallelFor(dims, [&](std::size_t d) {
    double* row = weights.data() + d * k;
    for (std::size_t n = 0; n < batch.records(); ++n) {
      for (std::size_t s = 0; s < batch.samples(); ++s) {
        const double v = batch.x(n, s)[d];
        const auto state = static_cast<std::size_t>(v);
        if (!(v >= 0.0) || state >= k || static_cast<double>(state) != v) {
          bad_value = true;
          continue;
        }
        row[state] += batch.w(n, s);
      }
    }
  });
  if (bad_value) {
    throw InvalidArgument("importance samples are not discrete states");
  }
  return DiscretePrior::FromWeights(dims, num_states, std::move(weights),
                                    floor);
}

namespace {

InputPrior InitialPrior(const LabeledDataset& noisy, const ChannelSet& channels,
                        const TrainConfig& config) {
  if (std::holds_alternative<std::monostate>(channels.input)) {
    return std::monostate{};
  }
  switch (config.prior_mode) {
    case PriorMode::kFlat:
    case PriorMode::kLearned:
      if (!noisy.domain().discrete()) {
        throw InvalidArgument("flat/learned priors need discrete features");
      }
      return DiscretePrior::Flat(noisy.dims(), noisy.domain().num_states);
    case PriorMode::kFixed:
      if (!config.fixed_prior) {
        throw InvalidArgument("fixed prior mode needs a prior");
      }
      return *config.fixed_prior;
    case PriorMode::kGaussian:
      config.gaussian_prior.Check(noisy.dims());
      return config.gaussian_prior;
  }
  return std::monostate{};
}

}  // namespace

SpreadFit TrainSpreadLogreg(const LabeledDataset& noisy,
                            const ChannelSet& channels,
                            const TrainConfig& config) {
  if (config.samples < 1) throw InvalidArgument("samples must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    throw InvalidArgument("learning rate must be > 0");
  }
  if (noisy.size() == 0) throw InvalidArgument("cannot train on empty data");
  CheckTrainable(channels, noisy.domain(), noisy.dims());

  SpreadFit fit;
  fit.model = LogregModel::Zero(noisy.dims(), InputScaleFor(noisy.domain()));
  fit.prior = InitialPrior(noisy, channels, config);
  const bool learn_prior =
      config.prior_mode == PriorMode::kLearned &&
      std::holds_alternative<DiscretePrior>(fit.prior);
  const double inv_n = 1.0 / static_cast<double>(noisy.size());

  constexpr int kWindow = 10;
  constexpr int kMaxHalvings = 30;
  std::vector<double> gains;
  for (int it = 0; it < config.max_outer_iters; ++it) {
    const ImportanceProposal proposal(channels, fit.prior, noisy.dims());
    const ImportanceBatch batch =
        SampleImportance(noisy, fit.model, proposal, config.samples,
                         config.seed, static_cast<uint64_t>(it));
    const EnergyResult energy = EnergyClass(batch, fit.model.theta);
    if (!std::isfinite(energy.value)) {
      std::ostringstream msg;
      msg << "spread training diverged: energy is " << energy.value
          << " at iteration " << it;
      throw NumericalError(msg.str());
    }
    fit.energy_trace.push_back(energy.value * inv_n);
    // Gradient step on the batch energy, halved until the energy does not
    // decrease so every M-step is an improvement.
    std::vector<double> theta = fit.model.theta;
    double step = config.learning_rate * inv_n;
    double after = energy.value;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, step *= 0.5) {
      for (std::size_t j = 0; j < theta.size(); ++j) {
        theta[j] = fit.model.theta[j] + step * energy.gradient[j];
      }
      after = EnergyClassValue(batch, theta);
      if (after >= energy.value) break;
    }
    if (after >= energy.value) fit.model.theta = theta;
    if (learn_prior) {
      fit.prior = UpdatePriorDiscrete(batch, noisy.domain().num_states,
                                      config.prior_floor);
    }
    fit.iterations = it + 1;

    if (config.tolerance > 0.0) {
      gains.push_back(std::max(0.0, after - energy.value) * inv_n);
      if (gains.size() >= kWindow) {
        double mean_gain = 0.0;
        for (std::size_t i = gains.size() - kWindow; i < gains.size(); ++i) {
          mean_gain += gains[i];
        }
        mean_gain /= kWindow;
        if (mean_gain < config.tolerance) {
          fit.converged = true;
          break;
        }
      }
    }
  }
  return fit;
}

}  // namespace spreadlearn
