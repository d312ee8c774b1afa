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

#include "spreadlearn/reference.h"

#include <cmath>
#include <random>

#include "spreadlearn/error.h"
#include "spreadlearn/numeric.h"

namespace spreadlearn::reference {

LabeledDataset CorruptDataset(const LabeledDataset& data,
                              const ChannelSet& channels, uint64_t seed) {
  std::vector<uint8_t> labels(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    SplitMix64 rng = RecordStream(seed, StreamTag::kLabelNoise, n);
    labels[n] = static_cast<uint8_t>(channels.label.Sample(data.label(n), rng));
  }
  Matrix features = data.features();
  if (const auto* g = std::get_if<GaussianChannel>(&channels.input)) {
    if (data.domain().discrete()) {
      throw InvalidArgument("gaussian channel needs continuous features");
    }
    g->CheckDims(data.dims());
    for (std::size_t n = 0; n < data.size(); ++n) {
      SplitMix64 rng = RecordStream(seed, StreamTag::kInputNoise, n);
      std::normal_distribution<double> normal(0.0, 1.0);
      auto row = features.row(n);
      for (std::size_t d = 0; d < row.size(); ++d) {
        row[d] += std::sqrt(g->variance(d)) * normal(rng);
      }
    }
  } else if (!std::holds_alternative<std::monostate>(channels.input)) {
    std::visit(
        [&](const auto& ch) {
          using T = std::decay_t<decltype(ch)>;
          if constexpr (std::is_same_v<T, UniformStateChannel> ||
                        std::is_same_v<T, DiscreteChannel>) {
            if (!data.domain().discrete() ||
                data.domain().num_states != ch.num_states()) {
              throw InvalidArgument(
                  "discrete input channel does not match the feature domain");
            }
            for (std::size_t n = 0; n < data.size(); ++n) {
              SplitMix64 rng = RecordStream(seed, StreamTag::kInputNoise, n);
              auto row = features.row(n);
              for (double& v : row) v = ch.Sample(static_cast<int>(v), rng);
            }
          }
        },
        channels.input);
  }
  return data.WithCorruption(std::move(features), std::move(labels),
                             channels.Id(), seed);
}

ImportanceBatch SampleImportance(const LabeledDataset& noisy,
                                 const LogregModel& model,
                                 const ImportanceProposal& proposal,
                                 std::size_t samples, uint64_t seed,
                                 uint64_t iteration) {
  ImportanceBatch batch(noisy.size(), samples, noisy.dims(),
                        model.input_scale);
  const uint64_t key = MixSeed(seed, iteration);
  for (std::size_t n = 0; n < noisy.size(); ++n) {
    SplitMix64 rng = RecordStream(key, StreamTag::kImportance, n);
    SampleImportanceRecord(noisy.label(n), noisy.x(n), model, proposal,
                           samples, rng, batch, n);
  }
  return batch;
}

EnergyResult EnergyClass(const ImportanceBatch& batch,
                         std::span<const double> theta) {
  const std::size_t dims = batch.dims();
  if (theta.size() != dims + 1) {
    throw InvalidArgument("theta must have D + 1 entries");
  }
  EnergyResult out;
  out.gradient.assign(dims + 1, 0.0);
  for (std::size_t n = 0; n < batch.records(); ++n) {
    for (std::size_t s = 0; s < batch.samples(); ++s) {
      const auto x = batch.x(n, s);
      double z = theta[dims];
      for (std::size_t d = 0; d < dims; ++d) {
        z += theta[d] * batch.value_scale() * x[d];
      }
      const double sign = batch.c(n, s) == 1 ? 1.0 : -1.0;
      const double w = batch.w(n, s);
      out.value += w * std::log(Sigmoid(sign * z));
      const double g = w * sign * (1.0 - Sigmoid(sign * z));
      for (std::size_t d = 0; d < dims; ++d) {
        out.gradient[d] += g * batch.value_scale() * x[d];
      }
      out.gradient[dims] += g;
    }
  }
  return out;
}

double LogisticLoglik(const LogregModel& model, const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double sign = 2.0 * data.label(n) - 1.0;
    total += LogSigmoid(sign * Logit(model, data.x(n)));
  }
  return total / static_cast<double>(data.size());
}

LogregFit TrainLogreg(const LabeledDataset& data, const LogregConfig& config) {
  const std::size_t dims = data.dims();
  LogregFit fit{LogregModel::Zero(dims, InputScaleFor(data.domain())), {}};
  const double inv_n = 1.0 / static_cast<double>(data.size());
  std::vector<double> grad(dims + 1);
  for (int it = 0; it < config.iterations; ++it) {
    std::ranges::fill(grad, 0.0);
    double loglik = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
      const auto x = data.x(n);
      const double z = Logit(fit.model, x);
      const double residual = data.label(n) - Sigmoid(z);
      for (std::size_t d = 0; d < dims; ++d) {
        grad[d] += residual * fit.model.input_scale * x[d];
      }
      grad[dims] += residual;
      loglik += LogSigmoid((2.0 * data.label(n) - 1.0) * z);
    }
    fit.loglik_trace.push_back(loglik * inv_n);
    for (std::size_t d = 0; d <= dims; ++d) {
      fit.model.theta[d] += config.learning_rate * grad[d] * inv_n;
    }
  }
  return fit;
}

McEstimate NoisyLabelGradientAtAlpha(const NoisyLabelAnalysis& analysis) {
  double sum = 0.0, sum_sq = 0.0;
  const std::size_t chunks = (analysis.mc_samples + kMcChunk - 1) / kMcChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    SplitMix64 rng = RecordStream(analysis.seed, StreamTag::kMonteCarlo, c);
    const std::size_t count =
        std::min(kMcChunk, analysis.mc_samples - c * kMcChunk);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = NoisyLabelGradientDraw(analysis, rng);
      sum += v;
      sum_sq += v * v;
    }
  }
  return McFromSums(sum, sum_sq, analysis.mc_samples);
}

}  // namespace spreadlearn::reference
