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

// Single-threaded versions of the parallel kernels. They draw from the same
// per-record streams, so sampling kernels match bit for bit; reductions use a
// plain running sum and match to rounding. Used by tests and benchmarks.

#ifndef SPREADLEARN_REFERENCE_H_
#define SPREADLEARN_REFERENCE_H_

#include <cstdint>
#include <span>

#include "spreadlearn/baselines.h"
#include "spreadlearn/channels.h"
#include "spreadlearn/dataset.h"
#include "spreadlearn/logreg.h"

namespace spreadlearn::reference {

LabeledDataset CorruptDataset(const LabeledDataset& data,
                              const ChannelSet& channels, uint64_t seed);

ImportanceBatch SampleImportance(const LabeledDataset& noisy,
                                 const LogregModel& model,
                                 const ImportanceProposal& proposal,
                                 std::size_t samples, uint64_t seed,
                                 uint64_t iteration);

EnergyResult EnergyClass(const ImportanceBatch& batch,
                         std::span<const double> theta);

double LogisticLoglik(const LogregModel& model, const LabeledDataset& data);

LogregFit TrainLogreg(const LabeledDataset& data, const LogregConfig& config);

McEstimate NoisyLabelGradientAtAlpha(const NoisyLabelAnalysis& analysis);

}  // namespace spreadlearn::reference

#endif  // SPREADLEARN_REFERENCE_H_
