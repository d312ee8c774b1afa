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

// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <cmath>

#include "spreadlearn/baselines.h"
#include "spreadlearn/reference.h"

namespace spreadlearn {
namespace {

const ChannelSet& Channels() {
  static const ChannelSet channels{FlipChannel::Symmetric(0.2),
                                   UniformStateChannel(16, 0.3)};
  return channels;
}

const LabeledDataset& Clean() {
  static const LabeledDataset data = [] {
    SyntheticImageSpec spec;
    spec.per_class = 2000;
    spec.seed = 1;
    return GenerateSyntheticImages(spec);
  }();
  return data;
}

const LabeledDataset& Noisy() {
  static const LabeledDataset data = CorruptDataset(Clean(), Channels(), 2);
  return data;
}

LogregModel Model() {
  LogregModel model = LogregModel::Zero(Noisy().dims(), 1.0 / 15);
  for (std::size_t j = 0; j < model.theta.size(); ++j) {
    model.theta[j] = 0.3 * std::sin(0.7 * j);
  }
  return model;
}

const ImportanceProposal& Proposal() {
  static const ImportanceProposal proposal(
      Channels(), DiscretePrior::Flat(Noisy().dims(), 16), Noisy().dims());
  return proposal;
}

const ImportanceBatch& Batch() {
  static const ImportanceBatch batch =
      SampleImportance(Noisy(), Model(), Proposal(), 4, 3, 0);
  return batch;
}

template <bool kParallel>
void BM_Corrupt(benchmark::State& state) {
  for (auto _ : state) {
    if constexpr (kParallel) {
      benchmark::DoNotOptimize(CorruptDataset(Clean(), Channels(), 2));
    } else {
      benchmark::DoNotOptimize(reference::CorruptDataset(Clean(), Channels(), 2));
    }
  }
  state.SetItemsProcessed(state.iterations() * Clean().size());
}

template <bool kParallel>
void BM_SampleImportance(benchmark::State& state) {
  const LogregModel model = Model();
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    if constexpr (kParallel) {
      benchmark::DoNotOptimize(
          SampleImportance(Noisy(), model, Proposal(), samples, 3, 0));
    } else {
      benchmark::DoNotOptimize(reference::SampleImportance(
          Noisy(), model, Proposal(), samples, 3, 0));
    }
  }
  state.SetItemsProcessed(state.iterations() * Noisy().size() * samples);
}

template <bool kParallel>
void BM_EnergyClass(benchmark::State& state) {
  const LogregModel model = Model();
  for (auto _ : state) {
    if constexpr (kParallel) {
      benchmark::DoNotOptimize(EnergyClass(Batch(), model.theta));
    } else {
      benchmark::DoNotOptimize(reference::EnergyClass(Batch(), model.theta));
    }
  }
  state.SetItemsProcessed(state.iterations() * Batch().records() *
                          Batch().samples());
}

template <bool kParallel>
void BM_LogisticLoglik(benchmark::State& state) {
  const LogregModel model = Model();
  for (auto _ : state) {
    if constexpr (kParallel) {
      benchmark::DoNotOptimize(LogisticLoglik(model, Clean()));
    } else {
      benchmark::DoNotOptimize(reference::LogisticLoglik(model, Clean()));
    }
  }
  state.SetItemsProcessed(state.iterations() * Clean().size());
}

template <bool kParallel>
void BM_NoisyLabelGradient(benchmark::State& state) {
  NoisyLabelAnalysis analysis;
  analysis.alpha = 0.3;
  analysis.mc_samples = 1 << 18;
  for (auto _ : state) {
    if constexpr (kParallel) {
      benchmark::DoNotOptimize(NoisyLabelGradientAtAlpha(analysis));
    } else {
      benchmark::DoNotOptimize(reference::NoisyLabelGradientAtAlpha(analysis));
    }
  }
  state.SetItemsProcessed(state.iterations() * analysis.mc_samples);
}

BENCHMARK(BM_Corrupt<false>)->Name("Corrupt/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Corrupt<true>)->Name("Corrupt/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleImportance<false>)
    ->Name("SampleImportance/serial")
    ->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleImportance<true>)
    ->Name("SampleImportance/openmp")
    ->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyClass<false>)->Name("EnergyClass/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyClass<true>)->Name("EnergyClass/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogisticLoglik<false>)->Name("LogisticLoglik/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LogisticLoglik<true>)->Name("LogisticLoglik/openmp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NoisyLabelGradient<false>)->Name("NoisyLabelGradient/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoisyLabelGradient<true>)->Name("NoisyLabelGradient/openmp")->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace spreadlearn

BENCHMARK_MAIN();
