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

// OpenMP helpers shared by the parallel kernels.
//
// Reductions are computed over fixed-size blocks of records and the block
// partials are combined serially in block order. The result therefore depends
// only on the block size, not on the number of threads or the schedule.

#ifndef SPREADLEARN_PARALLEL_H_
#define SPREADLEARN_PARALLEL_H_

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace spreadlearn {

inline constexpr std::size_t kReductionBlock = 256;

// Thread cap: SPREADLEARN_THREADS if set and positive, else the OpenMP
// default.
int MaxThreads();

// Overrides the cap for the rest of the process (0 restores the default).
void SetMaxThreads(int threads);

template <typename F>
void ParallelFor(std::size_t n, F&& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(MaxThreads())
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    body(static_cast<std::size_t>(i));
  }
}

// Sum of term(i) over [0, n), blocked for thread-count independence.
template <typename F>
double BlockedSum(std::size_t n, F&& term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  ParallelFor(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = b * kReductionBlock; i < end; ++i) acc += term(i);
    partial[b] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Vector-valued reduction: accumulate(i, acc) adds record i's contribution
// into acc (length dim). Returns the blocked total.
template <typename F>
std::vector<double> BlockedAccumulate(std::size_t n, std::size_t dim,
                                      F&& accumulate) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks * dim, 0.0);
  ParallelFor(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
    std::span<double> acc(partial.data() + b * dim, dim);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) accumulate(i, acc);
  });
  std::vector<double> total(dim, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < dim; ++j) total[j] += partial[b * dim + j];
  }
  return total;
}

}  // namespace spreadlearn

#endif  // SPREADLEARN_PARALLEL_H_
