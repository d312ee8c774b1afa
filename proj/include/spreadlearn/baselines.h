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

// The two alternatives to spread training: fitting the standard model to the
// noisy data directly, and "reconstruction" (training on the posterior
// imputation of the clean data). Includes the large-sample analysis of
// logistic regression with flipped labels and Gaussian inputs.

#ifndef SPREADLEARN_BASELINES_H_
#define SPREADLEARN_BASELINES_H_

#include <array>
#include <cstdint>
#include <vector>

#include "spreadlearn/channels.h"
#include "spreadlearn/logreg.h"
#include "spreadlearn/quadrature.h"

namespace spreadlearn {

// Standard logistic log likelihood evaluated on corrupted data.
double NaiveLoglikNoisy(const LogregModel& model, const LabeledDataset& noisy);

// Standard logistic regression fit to corrupted data.
LogregFit TrainNaive(const LabeledDataset& noisy, const LogregConfig& config);

// Exact large-sample reconstruction objective for a Bernoulli(theta) model
// under a symmetric flip p_f with true parameter theta0:
//   J(theta) = sum_x~ p_theta0(x~) sum_x p_theta(x | x~) log p_theta(x),
// p_theta(x | x~) ∝ p(x~ | x) p_theta(x). theta must lie in (0,1).
double ReconObjectiveBernoulli(double theta, double theta0, double p_flip);

inline constexpr double kReconGridStep = 1e-4;
inline constexpr double kReconEndpointMargin = 1e-6;

// Grid argmax of ReconObjectiveBernoulli over theta on (0,1): interior points
// k * grid_step plus the two margin points 1e-6 and 1 - 1e-6.
double ReconArgmax(double theta0, double p_flip,
                   double grid_step = kReconGridStep);

struct ReconstructionCurve {
  double p_flip = 0.0;
  std::vector<double> theta0;
  std::vector<double> argmax_theta;

  // max_i |argmax_i - theta0_i|
  double MaxDeviation() const;
};

// theta0 runs over [0,1] in steps of theta0_step.
ReconstructionCurve ReconCurve(double p_flip, double grid_step = kReconGridStep,
                               double theta0_step = 0.01);

// Flipped-label logistic regression with isotropic Gaussian inputs
// x ~ N(0, s^2 I) and |theta| = |theta0| = 1 at angle alpha.
struct NoisyLabelAnalysis {
  double p_1to1 = 0.8;
  double p_0to1 = 0.2;
  double s = 1.0;
  double alpha = 0.0;
  std::size_t mc_samples = 1'000'000;
  uint64_t seed = 0;
  // Pairs (e1, e2) with (e1, -e2); at alpha = 0 the gradient integrand is odd
  // in e2, so the estimate is exactly zero.
  bool antithetic = false;
};

// gamma(z) = p_1to1 Sigmoid(z) + p_0to1 (1 - Sigmoid(z)).
double Gamma(double z, double p_1to1, double p_0to1);

// Monte Carlo estimate of
//   s E[(gamma(Z1) - Sigmoid(Z2)) (e2 cos a - e1 sin a)],
// Z1 = s e1, Z2 = s (e1 cos a + e2 sin a), the derivative of the large-sample
// noisy log likelihood with respect to the angle. Throws InvalidArgument for
// fewer than 1e5 samples.
McEstimate NoisyLabelGradientAtAlpha(const NoisyLabelAnalysis& analysis);

// One draw of the gradient integrand (an antithetic pair counts as one draw).
double NoisyLabelGradientDraw(const NoisyLabelAnalysis& analysis,
                              SplitMix64& rng);

struct HessianTerms {
  McEstimate first;   // s E[-e1 gamma(s e1)]
  McEstimate second;  // -s^2 E[Sigmoid(s e1)(1 - Sigmoid(s e1))]
  McEstimate total;
};

// Second derivative at alpha = 0, same draws for all three estimates.
HessianTerms NoisyLabelHessianAtZero(const NoisyLabelAnalysis& analysis);

struct HessianQuadrature {
  double first = 0.0;
  double second = 0.0;
  double total = 0.0;
};

// Gauss-Hermite evaluation of the same two expectations.
HessianQuadrature NoisyLabelHessianQuadrature(double p_1to1, double p_0to1,
                                              double s, int nodes = 32);

struct AnisotropyResult {
  std::array<double, 2> gradient{};  // mean naive gradient at theta0
  double norm = 0.0;                 // |gradient|
  double norm_se = 0.0;              // delta-method standard error of norm
  double tangential = 0.0;     // component orthogonal to theta0
  double tangential_se = 0.0;  // its standard error
  double z_score = 0.0;        // |tangential| / tangential_se
  bool exceeds = false;        // z_score > threshold
};

// Draws x ~ N(0, sigma), c ~ Bernoulli(Sigmoid(theta0 . x)), c~ from the
// label channel and evaluates the naive log-likelihood gradient at theta0.
// Label noise shrinks the fitted norm even for isotropic inputs, so the full
// gradient is nonzero there too; what breaks direction recovery is the
// component orthogonal to theta0, and that is what `exceeds` tests. An axis
// aligned theta0 is an eigenvector of a diagonal sigma and gives a zero
// orthogonal component by symmetry. sigma is row-major
// 2 x 2; throws InvalidArgument unless it is symmetric positive definite.
AnisotropyResult AnisotropyCounterexample(const std::array<double, 4>& sigma,
                                          const std::array<double, 2>& theta0,
                                          const FlipChannel& channel,
                                          std::size_t num_samples,
                                          uint64_t seed,
                                          double threshold = 5.0);

}  // namespace spreadlearn

#endif  // SPREADLEARN_BASELINES_H_
