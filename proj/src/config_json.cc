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

#include "spreadlearn/config_json.h"

#include <fstream>

#include "spreadlearn/error.h"

namespace spreadlearn {

namespace {

template <typename T>
T Get(const Json& json, const char* key) {
  if (!json.contains(key)) {
    throw InvalidArgument(std::string("missing field \"") + key + "\"");
  }
  try {
    return json.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("bad field \"") + key + "\": " + e.what());
  }
}

std::string Kind(const Json& json) {
  if (!json.is_object()) throw InvalidArgument("channel must be a JSON object");
  return Get<std::string>(json, "kind");
}

std::vector<double> Variances(const Json& json) {
  if (json.contains("variances")) return Get<std::vector<double>>(json, "variances");
  return {Get<double>(json, "variance")};
}

}  // namespace

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const Json& json, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << json.dump(2) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

FlipChannel FlipChannelFromJson(const Json& json) {
  if (Kind(json) != "flip") {
    throw InvalidArgument("label channel must have kind \"flip\"");
  }
  if (json.contains("p_flip")) {
    return FlipChannel::Symmetric(Get<double>(json, "p_flip"));
  }
  return {Get<double>(json, "p_0to1"), Get<double>(json, "p_1to0")};
}

InputChannel InputChannelFromJson(const Json& json) {
  if (json.is_null()) return std::monostate{};
  const std::string kind = Kind(json);
  if (kind == "uniform_state") {
    return UniformStateChannel(Get<int>(json, "num_states"),
                               Get<double>(json, "p_flip"));
  }
  if (kind == "gaussian") return GaussianChannel(Variances(json));
  if (kind == "discrete") return DiscreteChannelFromJson(json);
  throw InvalidArgument("unknown input channel kind \"" + kind + "\"");
}

DiscreteChannel DiscreteChannelFromJson(const Json& json) {
  const std::string kind = Kind(json);
  if (kind == "flip") return FlipChannelFromJson(json).ToDiscrete();
  if (kind == "uniform_state") {
    return std::get<UniformStateChannel>(InputChannelFromJson(json)).ToDiscrete();
  }
  if (kind != "discrete") {
    throw InvalidArgument("channel kind \"" + kind + "\" is not discrete");
  }
  const auto rows = Get<std::vector<std::vector<double>>>(json, "matrix");
  const int k = static_cast<int>(rows.size());
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != k) {
      throw InvalidArgument("discrete channel matrix must be square");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return DiscreteChannel(k, std::move(flat));
}

ChannelSet ChannelSetFromJson(const Json& json) {
  if (!json.is_object()) throw InvalidArgument("channels must be a JSON object");
  ChannelSet set;
  if (json.contains("label")) set.label = FlipChannelFromJson(json.at("label"));
  if (json.contains("input")) set.input = InputChannelFromJson(json.at("input"));
  return set;
}

Json ToJson(const FlipChannel& channel) {
  if (channel.p_0to1() == channel.p_1to0()) {
    return {{"kind", "flip"}, {"p_flip", channel.p_0to1()}};
  }
  return {{"kind", "flip"},
          {"p_0to1", channel.p_0to1()},
          {"p_1to0", channel.p_1to0()}};
}

Json ToJson(const InputChannel& channel) {
  return std::visit(
      [](const auto& ch) -> Json {
        using T = std::decay_t<decltype(ch)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, UniformStateChannel>) {
          return {{"kind", "uniform_state"},
                  {"num_states", ch.num_states()},
                  {"p_flip", ch.p_flip()}};
        } else if constexpr (std::is_same_v<T, GaussianChannel>) {
          if (ch.shared()) return {{"kind", "gaussian"}, {"variance", ch.variance(0)}};
          return {{"kind", "gaussian"},
                  {"variances", std::vector<double>(ch.variances().begin(),
                                                    ch.variances().end())}};
        } else {
          Json rows = Json::array();
          for (int i = 0; i < ch.num_states(); ++i) {
            Json row = Json::array();
            for (int j = 0; j < ch.num_states(); ++j) row.push_back(ch(i, j));
            rows.push_back(std::move(row));
          }
          return {{"kind", "discrete"}, {"matrix", std::move(rows)}};
        }
      },
      channel);
}

Json ToJson(const ChannelSet& channels) {
  return {{"label", ToJson(channels.label)}, {"input", ToJson(channels.input)}};
}

Json ToJson(const InputPrior& prior) {
  if (const auto* d = std::get_if<DiscretePrior>(&prior)) {
    Json tables = Json::array();
    for (std::size_t i = 0; i < d->dims(); ++i) {
      const auto t = d->table(i);
      tables.push_back(std::vector<double>(t.begin(), t.end()));
    }
    return {{"kind", "discrete"},
            {"num_states", d->num_states()},
            {"tables", std::move(tables)}};
  }
  if (const auto* g = std::get_if<GaussianPrior>(&prior)) {
    return {{"kind", "gaussian"}, {"mean", g->mean}, {"variance", g->variance}};
  }
  return nullptr;
}

InputPrior InputPriorFromJson(const Json& json) {
  if (json.is_null()) return std::monostate{};
  const std::string kind = Get<std::string>(json, "kind");
  if (kind == "gaussian") {
    GaussianPrior prior{Get<std::vector<double>>(json, "mean"),
                        Get<std::vector<double>>(json, "variance")};
    return prior;
  }
  if (kind != "discrete") {
    throw InvalidArgument("unknown prior kind \"" + kind + "\"");
  }
  const int k = Get<int>(json, "num_states");
  const auto tables = Get<std::vector<std::vector<double>>>(json, "tables");
  std::vector<double> flat;
  for (const auto& t : tables) {
    if (static_cast<int>(t.size()) != k) {
      throw InvalidArgument("prior table length must equal num_states");
    }
    flat.insert(flat.end(), t.begin(), t.end());
  }
  return DiscretePrior(tables.size(), k, std::move(flat));
}

std::string ToString(PriorMode mode) {
  switch (mode) {
    case PriorMode::kFlat: return "flat";
    case PriorMode::kLearned: return "learn";
    case PriorMode::kFixed: return "true";
    case PriorMode::kGaussian: return "gaussian";
  }
  return "flat";
}

PriorMode PriorModeFromString(const std::string& name) {
  if (name == "flat") return PriorMode::kFlat;
  if (name == "learn" || name == "learned") return PriorMode::kLearned;
  if (name == "true" || name == "fixed") return PriorMode::kFixed;
  if (name == "gaussian") return PriorMode::kGaussian;
  throw InvalidArgument("unknown prior mode \"" + name + "\"");
}

Json ToJson(const ModelFile& file) {
  return {{"kind", file.kind},
          {"theta_c", file.model.theta},
          {"input_scale", file.model.input_scale},
          {"prior", ToJson(file.prior)},
          {"config", file.config},
          {"final_energy", file.final_energy},
          {"iterations", file.iterations},
          {"converged", file.converged},
          {"trace", file.trace}};
}

ModelFile ModelFileFromJson(const Json& json) {
  if (!json.is_object()) throw InvalidArgument("model must be a JSON object");
  ModelFile file;
  file.kind = json.value("kind", "logreg");
  file.model.theta = Get<std::vector<double>>(json, "theta_c");
  if (file.model.theta.empty()) throw InvalidArgument("theta_c is empty");
  file.model.input_scale = json.value("input_scale", 1.0);
  if (json.contains("prior")) file.prior = InputPriorFromJson(json.at("prior"));
  file.config = json.value("config", Json::object());
  file.final_energy = json.value("final_energy", 0.0);
  file.iterations = json.value("iterations", 0);
  file.converged = json.value("converged", false);
  if (json.contains("trace")) file.trace = Get<std::vector<double>>(json, "trace");
  return file;
}

}  // namespace spreadlearn
