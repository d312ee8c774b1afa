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

#include "spreadlearn/logreg.h"

#include <cmath>

#include "spreadlearn/error.h"
#include "spreadlearn/parallel.h"

namespace spreadlearn {

double InputScaleFor(const FeatureDomain& domain) {
  return domain.discrete() ? 1.0 / (domain.num_states - 1) : 1.0;
}

double Logit(const LogregModel& model, std::span<const double> x) {
  const std::size_t dims = model.dims();
  if (x.size() != dims) {
    throw InvalidArgument("feature dimension does not match the model");
  }
  return model.input_scale * Dot(model.weights(), x) + model.theta[dims];
}

double Predict(const LogregModel& model, std::span<const double> x) {
  return Sigmoid(Logit(model, x));
}

double LogisticLoglik(const LogregModel& model, const LabeledDataset& data) {
  if (data.dims() != model.dims()) {
    throw InvalidArgument("feature dimension does not match the model");
  }
  if (data.size() == 0) return 0.0;
  const double total = BlockedSum(data.size(), [&](std::size_t n) {
    const double sign = 2.0 * data.label(n) - 1.0;
    return LogSigmoid(sign * Logit(model, data.x(n)));
  });
  return total / static_cast<double>(data.size());
}

LogregFit TrainLogreg(const LabeledDataset& data, const LogregConfig& config) {
  if (data.size() == 0) throw InvalidArgument("cannot train on empty data");
  if (!(config.learning_rate > 0.0) || config.iterations < 0) {
    throw InvalidArgument("learning rate must be > 0 and iterations >= 0");
  }
  const std::size_t dims = data.dims();
  LogregFit fit{LogregModel::Zero(dims, InputScaleFor(data.domain())), {}};
  LogregModel& model = fit.model;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (int it = 0; it < config.iterations; ++it) {
    // Slot `dims + 1` of the accumulator carries the log likelihood.
    const auto acc = BlockedAccumulate(
        data.size(), dims + 2, [&](std::size_t n, std::span<double> out) {
          const auto x = data.x(n);
          const double z = Logit(model, x);
          const double sign = 2.0 * data.label(n) - 1.0;
          const double residual = data.label(n) - Sigmoid(z);
          for (std::size_t d = 0; d < dims; ++d) {
            out[d] += residual * model.input_scale * x[d];
          }
          out[dims] += residual;
          out[dims + 1] += LogSigmoid(sign * z);
        });
    const double loglik = acc[dims + 1] * inv_n;
    if (!std::isfinite(loglik)) {
      throw NumericalError("logistic regression diverged at iteration " +
                           std::to_string(it));
    }
    fit.loglik_trace.push_back(loglik);
    for (std::size_t d = 0; d <= dims; ++d) {
      model.theta[d] += config.learning_rate * acc[d] * inv_n;
    }
  }
  return fit;
}

}  // namespace spreadlearn
