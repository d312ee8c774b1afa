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

// JSON forms of channels, priors and trained models.
//
//   {"kind": "flip", "p_flip": 0.2}            or "p_0to1"/"p_1to0"
//   {"kind": "uniform_state", "num_states": 256, "p_flip": 0.2}
//   {"kind": "gaussian", "variance": 0.1}      or "variances": [...]
//   {"kind": "discrete", "matrix": [[...], ...]}  rows = noisy state
//
// A channel set is {"label": <flip>, "input": <channel> | null}. Parse errors
// throw InvalidArgument.

#ifndef SPREADLEARN_CONFIG_JSON_H_
#define SPREADLEARN_CONFIG_JSON_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "spreadlearn/channels.h"
#include "spreadlearn/logreg.h"
#include "spreadlearn/priors.h"

namespace spreadlearn {

using Json = nlohmann::json;

Json ReadJsonFile(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void WriteJsonFile(const Json& json, const std::filesystem::path& path);

FlipChannel FlipChannelFromJson(const Json& json);
InputChannel InputChannelFromJson(const Json& json);
// Any channel kind as a dense discrete channel (flip becomes 2 x 2).
DiscreteChannel DiscreteChannelFromJson(const Json& json);
ChannelSet ChannelSetFromJson(const Json& json);

Json ToJson(const FlipChannel& channel);
Json ToJson(const InputChannel& channel);
Json ToJson(const ChannelSet& channels);

Json ToJson(const InputPrior& prior);
InputPrior InputPriorFromJson(const Json& json);

std::string ToString(PriorMode mode);
PriorMode PriorModeFromString(const std::string& name);

// Model file: theta_c (bias last), input_scale, prior, config echo, final
// energy and the full trace.
struct ModelFile {
  std::string kind;  // "logreg" or "spread"
  LogregModel model;
  InputPrior prior;
  Json config;
  double final_energy = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

Json ToJson(const ModelFile& file);
ModelFile ModelFileFromJson(const Json& json);

}  // namespace spreadlearn

#endif  // SPREADLEARN_CONFIG_JSON_H_
