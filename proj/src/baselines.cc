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

#include "spreadlearn/baselines.h"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "spreadlearn/error.h"
#include "spreadlearn/numeric.h"
#include "spreadlearn/parallel.h"

namespace spreadlearn {

double NaiveLoglikNoisy(const LogregModel& model, const LabeledDataset& noisy) {
  return LogisticLoglik(model, noisy);
}

LogregFit TrainNaive(const LabeledDataset& noisy, const LogregConfig& config) {
  return TrainLogreg(noisy, config);
}

double ReconObjectiveBernoulli(double theta, double theta0, double p_flip) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw InvalidArgument("theta must lie in the open interval (0,1)");
  }
  if (!(theta0 >= 0.0 && theta0 <= 1.0) || !(p_flip >= 0.0 && p_flip <= 1.0)) {
    throw InvalidArgument("theta0 and p_f must lie in [0,1]");
  }
  const double p_theta[2] = {1.0 - theta, theta};
  const double p_theta0[2] = {1.0 - theta0, theta0};
  const double log_p[2] = {std::log1p(-theta), std::log(theta)};
  auto channel = [p_flip](int noisy, int clean) {
    return noisy == clean ? 1.0 - p_flip : p_flip;
  };
  double value = 0.0;
  for (int xt = 0; xt < 2; ++xt) {
    const double weight = channel(xt, 0) * p_theta0[0] +
                          channel(xt, 1) * p_theta0[1];
    if (weight == 0.0) continue;
    const double joint[2] = {channel(xt, 0) * p_theta[0],
                             channel(xt, 1) * p_theta[1]};
    const double evidence = joint[0] + joint[1];
    if (!(evidence > 0.0)) {
      throw NumericalError("zero evidence in reconstruction posterior");
    }
    double inner = 0.0;
    for (int x = 0; x < 2; ++x) {
      if (joint[x] > 0.0) inner += joint[x] / evidence * log_p[x];
    }
    value += weight * inner;
  }
  return value;
}

double ReconArgmax(double theta0, double p_flip, double grid_step) {
  if (!(grid_step > 0.0 && grid_step < 0.5)) {
    throw InvalidArgument("grid_step must be in (0, 0.5)");
  }
  double best_theta = kReconEndpointMargin;
  double best = ReconObjectiveBernoulli(best_theta, theta0, p_flip);
  auto consider = [&](double theta) {
    const double value = ReconObjectiveBernoulli(theta, theta0, p_flip);
    if (value > best) {
      best = value;
      best_theta = theta;
    }
  };
  const auto steps = static_cast<long>(std::llround(1.0 / grid_step));
  for (long k = 1; k < steps; ++k) consider(k * grid_step);
  consider(1.0 - kReconEndpointMargin);
  return best_theta;
}

double ReconstructionCurve::MaxDeviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < theta0.size(); ++i) {
    worst = std::max(worst, std::abs(argmax_theta[i] - theta0[i]));
  }
  return worst;
}

ReconstructionCurve ReconCurve(double p_flip, double grid_step,
                               double theta0_step) {
  if (!(p_flip >= 0.0 && p_flip < 0.5)) {
    throw InvalidArgument("recon curve needs p_f in [0, 0.5)");
  }
  if (!(theta0_step > 0.0 && theta0_step <= 1.0)) {
    throw InvalidArgument("theta0_step must be in (0, 1]");
  }
  ReconstructionCurve curve;
  curve.p_flip = p_flip;
  const auto points = static_cast<std::size_t>(std::llround(1.0 / theta0_step));
  for (std::size_t i = 0; i <= points; ++i) {
    curve.theta0.push_back(std::min(1.0, i * theta0_step));
  }
  curve.argmax_theta.resize(curve.theta0.size());
  ParallelFor(curve.theta0.size(), [&](std::size_t i) {
    curve.argmax_theta[i] = ReconArgmax(curve.theta0[i], p_flip, grid_step);
  });
  return curve;
}

double Gamma(double z, double p_1to1, double p_0to1) {
  const double phi = Sigmoid(z);
  return p_1to1 * phi + p_0to1 * (1.0 - phi);
}

namespace {

void CheckAnalysis(const NoisyLabelAnalysis& a) {
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(a.p_1to1) || !unit(a.p_0to1)) {
    throw InvalidArgument("channel probabilities must lie in [0,1]");
  }
  if (!(a.s > 0.0)) throw InvalidArgument("s must be positive");
  if (a.mc_samples < 100'000) {
    throw InvalidArgument("at least 1e5 Monte Carlo samples are required");
  }
}

double GradientIntegrand(const NoisyLabelAnalysis& a, double ca, double sa,
                         double e1, double e2) {
  const double z1 = a.s * e1;
  const double z2 = a.s * (e1 * ca + e2 * sa);
  return a.s * (Gamma(z1, a.p_1to1, a.p_0to1) - Sigmoid(z2)) *
         (e2 * ca - e1 * sa);
}

}  // namespace

double NoisyLabelGradientDraw(const NoisyLabelAnalysis& a, SplitMix64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double e1 = normal(rng);
  const double e2 = normal(rng);
  const double ca = std::cos(a.alpha), sa = std::sin(a.alpha);
  if (!a.antithetic) return GradientIntegrand(a, ca, sa, e1, e2);
  return 0.5 * (GradientIntegrand(a, ca, sa, e1, e2) +
                GradientIntegrand(a, ca, sa, e1, -e2));
}

McEstimate NoisyLabelGradientAtAlpha(const NoisyLabelAnalysis& analysis) {
  CheckAnalysis(analysis);
  return ChunkedMonteCarlo<1>(
      analysis.mc_samples, analysis.seed, [&](SplitMix64& rng) {
        return std::array<double, 1>{NoisyLabelGradientDraw(analysis, rng)};
      })[0];
}

HessianTerms NoisyLabelHessianAtZero(const NoisyLabelAnalysis& analysis) {
  CheckAnalysis(analysis);
  const double s = analysis.s;
  const auto est = ChunkedMonteCarlo<3>(
      analysis.mc_samples, analysis.seed, [&](SplitMix64& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double e1 = normal(rng);
        const double first =
            -s * e1 * Gamma(s * e1, analysis.p_1to1, analysis.p_0to1);
        const double phi = Sigmoid(s * e1);
        const double second = -s * s * phi * (1.0 - phi);
        return std::array<double, 3>{first, second, first + second};
      });
  return {est[0], est[1], est[2]};
}

HessianQuadrature NoisyLabelHessianQuadrature(double p_1to1, double p_0to1,
                                              double s, int nodes) {
  if (!(s > 0.0)) throw InvalidArgument("s must be positive");
  const QuadratureRule rule = GaussHermiteNormal(nodes);
  HessianQuadrature out;
  out.first = rule.Expectation(
      [&](double e) { return -s * e * Gamma(s * e, p_1to1, p_0to1); });
  out.second = rule.Expectation([&](double e) {
    const double phi = Sigmoid(s * e);
    return -s * s * phi * (1.0 - phi);
  });
  out.total = out.first + out.second;
  return out;
}

AnisotropyResult AnisotropyCounterexample(const std::array<double, 4>& sigma,
                                          const std::array<double, 2>& theta0,
                                          const FlipChannel& channel,
                                          std::size_t num_samples,
                                          uint64_t seed, double threshold) {
  Eigen::Matrix2d cov;
  cov << sigma[0], sigma[1], sigma[2], sigma[3];
  if (std::abs(sigma[1] - sigma[2]) > 1e-12 * (1.0 + std::abs(sigma[1]))) {
    throw InvalidArgument("covariance must be symmetric");
  }
  Eigen::LLT<Eigen::Matrix2d> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("covariance must be positive definite");
  }
  const Eigen::Matrix2d chol = llt.matrixL();
  const double norm0 = std::hypot(theta0[0], theta0[1]);
  if (!(norm0 > 0.0)) throw InvalidArgument("theta0 must be nonzero");
  if (num_samples < 2) throw InvalidArgument("need at least two samples");
  const double u[2] = {theta0[0] / norm0, theta0[1] / norm0};
  const double perp[2] = {-u[1], u[0]};

  // Components: g0, g1, g0 + g1 (for the covariance), tangential.
  const auto est = ChunkedMonteCarlo<4>(
      num_samples, seed, [&](SplitMix64& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double e1 = normal(rng);
        const double e2 = normal(rng);
        const double x0 = chol(0, 0) * e1;
        const double x1 = chol(1, 0) * e1 + chol(1, 1) * e2;
        const double p = Sigmoid(theta0[0] * x0 + theta0[1] * x1);
        const int clean = rng.Uniform() < p ? 1 : 0;
        const int noisy = channel.Sample(clean, rng);
        const double r = noisy - p;
        const double g0 = r * x0, g1 = r * x1;
        return std::array<double, 4>{g0, g1, g0 + g1,
                                     g0 * perp[0] + g1 * perp[1]};
      });

  AnisotropyResult out;
  out.gradient = {est[0].mean, est[1].mean};
  out.norm = std::hypot(out.gradient[0], out.gradient[1]);
  const double v0 = est[0].std_error * est[0].std_error;
  const double v1 = est[1].std_error * est[1].std_error;
  const double v01 =
      0.5 * (est[2].std_error * est[2].std_error - v0 - v1);
  if (out.norm > 0.0) {
    const double a = out.gradient[0] / out.norm, b = out.gradient[1] / out.norm;
    out.norm_se = std::sqrt(std::max(0.0, a * a * v0 + b * b * v1 +
                                              2.0 * a * b * v01));
  }
  out.tangential = est[3].mean;
  out.tangential_se = est[3].std_error;
  out.z_score = out.tangential_se > 0.0
                    ? std::abs(out.tangential) / out.tangential_se
                    : 0.0;
  out.exceeds = out.z_score > threshold;
  return out;
}

}  // namespace spreadlearn
