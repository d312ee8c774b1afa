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

#ifndef SPREADLEARN_QUADRATURE_H_
#define SPREADLEARN_QUADRATURE_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "spreadlearn/parallel.h"
#include "spreadlearn/rng.h"

namespace spreadlearn {

// Nodes and weights with sum_i w_i f(x_i) ≈ E[f(Z)], Z ~ N(0, 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double Expectation(const std::function<double(double)>& f) const;
};

// n-point Gauss-Hermite rule for the standard normal (Golub-Welsch on the
// probabilists' Hermite recurrence).
QuadratureRule GaussHermiteNormal(int n);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMcChunk = 4096;

// Mean and standard error from running sums.
McEstimate McFromSums(double sum, double sum_sq, std::size_t n);

// M simultaneous Monte Carlo means over `samples` draws. Chunk c of kMcChunk
// draws uses RecordStream(seed, kMonteCarlo, c); chunk sums are reduced in
// chunk order, so the result does not depend on the thread count.
// draw(rng) returns one std::array<double, M> sample.
template <std::size_t M, typename F>
std::array<McEstimate, M> ChunkedMonteCarlo(std::size_t samples, uint64_t seed,
                                            F&& draw) {
  const std::size_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<std::array<double, 2 * M>> partial(chunks);
  ParallelFor(chunks, [&](std::size_t c) {
    SplitMix64 rng = RecordStream(seed, StreamTag::kMonteCarlo, c);
    const std::size_t count = std::min(kMcChunk, samples - c * kMcChunk);
    std::array<double, 2 * M> acc{};
    for (std::size_t i = 0; i < count; ++i) {
      const std::array<double, M> v = draw(rng);
      for (std::size_t m = 0; m < M; ++m) {
        acc[m] += v[m];
        acc[M + m] += v[m] * v[m];
      }
    }
    partial[c] = acc;
  });
  std::array<double, 2 * M> total{};
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < 2 * M; ++j) total[j] += p[j];
  }
  std::array<McEstimate, M> out;
  for (std::size_t m = 0; m < M; ++m) {
    out[m] = McFromSums(total[m], total[M + m], samples);
  }
  return out;
}

}  // namespace spreadlearn

#endif  // SPREADLEARN_QUADRATURE_H_
