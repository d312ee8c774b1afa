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

// Corrupt -> train every arm -> evaluate on clean held-out data, repeated over
// a flip-probability sweep.
//
// A cell is one (p_f, repetition) pair. The training subset depends on
// (seed, repetition); the corruption on (seed, p_f, repetition); every arm in
// a cell trains on the same corrupted data. Cells run in parallel and rows are
// appended to <outdir>/report.csv as they finish; a rerun skips rows already
// present. On completion the report is rewritten in canonical order.

#ifndef SPREADLEARN_EXPERIMENTS_H_
#define SPREADLEARN_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spreadlearn/channels.h"
#include "spreadlearn/config_json.h"
#include "spreadlearn/dataset.h"
#include "spreadlearn/logreg.h"

namespace spreadlearn {

enum class Arm {
  kCleanLogreg,
  kNoisyLogreg,
  kSpreadFlat,
  kSpreadLearned,
  kSpreadTrue,
  kSpreadGaussian,
};

std::string ToString(Arm arm);
Arm ArmFromString(const std::string& name);

enum class DataSource { kSynthetic, kSyntheticImages, kIdx };

struct DataConfig {
  DataSource source = DataSource::kSyntheticImages;
  // kSynthetic
  SyntheticSpec synthetic;          // num_records is the training size
  std::size_t test_records = 10'000;
  // kSyntheticImages
  SyntheticImageSpec images;        // per_class is the training size
  std::size_t test_per_class = 900;
  // kIdx
  std::filesystem::path train_images, train_labels;
  std::filesystem::path test_images, test_labels;
  std::pair<int, int> classes = {7, 9};
  std::size_t per_class = 250;
};

// How p_f becomes channels. The label channel is always a symmetric flip with
// p_f. Inputs: "none", "uniform_state" (flip p_f over the K pixel states) or
// "gaussian" (fixed variance; discrete data is rescaled to [0,1] and centred
// on the training mean first).
struct NoiseConfig {
  std::string input = "uniform_state";
  double gaussian_variance = 0.1;
};

struct ExperimentConfig {
  DataConfig data;
  NoiseConfig noise;
  std::vector<Arm> arms;
  std::vector<double> p_flips;
  int repetitions = 1;
  uint64_t seed = 0;
  std::filesystem::path outdir;
  LogregConfig logreg;
  TrainConfig spread;  // seed and prior_mode are set per arm
  GaussianPrior gaussian_prior;
  // Writes wall_ms; turning it off makes report.csv byte-reproducible.
  bool record_timing = true;
  bool figures = true;

  // Throws InvalidArgument on an inconsistent configuration.
  void Validate() const;
};

ExperimentConfig ExperimentConfigFromJson(const Json& json);
Json ToJson(const ExperimentConfig& config);

struct ReportRow {
  Arm arm = Arm::kCleanLogreg;
  double p_flip = 0.0;
  int rep = 0;
  uint64_t seed = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double energy = 0.0;
  double wall_ms = 0.0;
  bool ok = true;
  std::string message;  // failure reason, not written to the CSV
  uint64_t data_hash = 0;
};

struct ArmSummary {
  Arm arm;
  double p_flip;
  int runs = 0;      // successful rows
  int failed = 0;
  double mean_test = 0.0;
  double std_test = 0.0;
  double mean_train = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;  // canonical order: arm, p_f, rep

  // Failed rows are counted but excluded from the means.
  std::vector<ArmSummary> Summaries(const std::vector<Arm>& arms,
                                    const std::vector<double>& p_flips) const;
};

struct EvalResult {
  double accuracy = 0.0;
  double loglik = 0.0;
};

// Threshold-0.5 accuracy and mean log likelihood.
EvalResult Evaluate(const LogregModel& model, const LabeledDataset& data);

// Everything one cell trains and evaluates on.
struct CellData {
  LabeledDataset train_clean;
  LabeledDataset train_noisy;
  LabeledDataset test_clean;
  ChannelSet channels;
  uint64_t corruption_seed = 0;
};

// Loads or generates the fixed clean test set and the training pool.
class ExperimentData {
 public:
  explicit ExperimentData(const ExperimentConfig& config);

  CellData Cell(double p_flip, int rep) const;
  const LabeledDataset& test() const { return test_; }

 private:
  LabeledDataset TrainingSet(int rep) const;

  const ExperimentConfig& config_;
  LabeledDataset test_;
  LabeledDataset pool_;  // kIdx only
};

uint64_t CorruptionSeed(uint64_t base, double p_flip, int rep);
uint64_t ArmSeed(uint64_t base, Arm arm, double p_flip, int rep);

// Trains and evaluates one arm on prepared cell data. Never throws for
// training failures; the row is marked failed instead.
ReportRow RunArm(const ExperimentConfig& config, const CellData& cell, Arm arm,
                 double p_flip, int rep);

// Runs every missing row, writes report.csv, cells.csv (data hashes),
// config-echo.json and, if enabled, figures/*.svg.
ExperimentReport RunExperiment(const ExperimentConfig& config);

void WriteReportCsv(const ExperimentReport& report, bool record_timing,
                    const std::filesystem::path& path);
// Rows from an existing report; missing file gives an empty list.
std::vector<ReportRow> ReadReportCsv(const std::filesystem::path& path);

}  // namespace spreadlearn

#endif  // SPREADLEARN_EXPERIMENTS_H_
