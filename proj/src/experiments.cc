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

#include "spreadlearn/experiments.h"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "spreadlearn/baselines.h"
#include "spreadlearn/error.h"
#include "spreadlearn/figures.h"
#include "spreadlearn/parallel.h"

namespace spreadlearn {

namespace {

constexpr Arm kAllArms[] = {Arm::kCleanLogreg,   Arm::kNoisyLogreg,
                            Arm::kSpreadFlat,    Arm::kSpreadLearned,
                            Arm::kSpreadTrue,    Arm::kSpreadGaussian};

constexpr uint64_t kTrainKey = 0x747261696eULL;  // "train"
constexpr uint64_t kTestKey = 0x74657374ULL;     // "test"

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("bad number \"" + s + "\" in report");
  }
  return v;
}

}  // namespace

std::string ToString(Arm arm) {
  switch (arm) {
    case Arm::kCleanLogreg: return "clean-logreg";
    case Arm::kNoisyLogreg: return "noisy-logreg";
    case Arm::kSpreadFlat: return "spread-flat";
    case Arm::kSpreadLearned: return "spread-learned";
    case Arm::kSpreadTrue: return "spread-true";
    case Arm::kSpreadGaussian: return "spread-gaussian";
  }
  return "?";
}

Arm ArmFromString(const std::string& name) {
  for (Arm arm : kAllArms) {
    if (ToString(arm) == name) return arm;
  }
  throw InvalidArgument("unknown arm \"" + name + "\"");
}

void ExperimentConfig::Validate() const {
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  if (arms.empty()) throw InvalidArgument("no arms to run");
  if (p_flips.empty()) throw InvalidArgument("empty p_f sweep");
  for (double p : p_flips) {
    if (!(p >= 0.0 && p < 0.5)) {
      throw InvalidArgument("sweep values must lie in [0, 0.5)");
    }
  }
  if (outdir.empty()) throw InvalidArgument("output directory not set");
  if (noise.input != "none" && noise.input != "uniform_state" &&
      noise.input != "gaussian") {
    throw InvalidArgument("noise.input must be none, uniform_state or gaussian");
  }
  if (noise.input == "gaussian" && !(noise.gaussian_variance > 0.0)) {
    throw InvalidArgument("gaussian noise variance must be > 0");
  }
  const bool discrete_input = noise.input == "uniform_state";
  if (noise.input == "uniform_state" && data.source == DataSource::kSynthetic) {
    throw InvalidArgument("uniform_state noise needs discrete data");
  }
  for (Arm arm : arms) {
    if ((arm == Arm::kSpreadFlat || arm == Arm::kSpreadLearned ||
         arm == Arm::kSpreadTrue) &&
        !discrete_input && noise.input != "none") {
      throw InvalidArgument(ToString(arm) +
                            " needs the uniform_state input channel");
    }
    if (arm == Arm::kSpreadGaussian && noise.input != "gaussian") {
      throw InvalidArgument("spread-gaussian needs the gaussian input channel");
    }
    if (arm == Arm::kSpreadTrue && data.source == DataSource::kSynthetic) {
      throw InvalidArgument("spread-true needs discrete data");
    }
  }
  gaussian_prior.Check(1);
}

ExperimentConfig ExperimentConfigFromJson(const Json& json) {
  if (!json.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig config;
  try {
    const Json& data = json.at("data");
    const std::string source = data.at("source").get<std::string>();
    DataConfig& dc = config.data;
    if (source == "synthetic") {
      dc.source = DataSource::kSynthetic;
      dc.synthetic.num_records = data.at("num_records").get<std::size_t>();
      dc.synthetic.dims = data.at("dims").get<std::size_t>();
      if (data.contains("variances")) {
        dc.synthetic.variances = data.at("variances").get<std::vector<double>>();
      }
      if (data.contains("mean")) {
        dc.synthetic.mean = data.at("mean").get<std::vector<double>>();
      }
      if (data.contains("theta0")) {
        dc.synthetic.theta0 = data.at("theta0").get<std::vector<double>>();
      }
      dc.test_records = data.value("test_records", dc.test_records);
    } else if (source == "synthetic_images") {
      dc.source = DataSource::kSyntheticImages;
      auto& im = dc.images;
      im.per_class = data.value("per_class", im.per_class);
      im.side = data.value("side", im.side);
      im.num_states = data.value("num_states", im.num_states);
      im.pixel_noise = data.value("pixel_noise", im.pixel_noise);
      im.stroke_jitter = data.value("stroke_jitter", im.stroke_jitter);
      dc.test_per_class = data.value("test_per_class", dc.test_per_class);
    } else if (source == "idx") {
      dc.source = DataSource::kIdx;
      dc.train_images = data.at("train_images").get<std::string>();
      dc.train_labels = data.at("train_labels").get<std::string>();
      dc.test_images = data.at("test_images").get<std::string>();
      dc.test_labels = data.at("test_labels").get<std::string>();
      if (data.contains("classes")) {
        const auto cls = data.at("classes").get<std::vector<int>>();
        if (cls.size() != 2) throw InvalidArgument("classes must be a pair");
        dc.classes = {cls[0], cls[1]};
      }
      dc.per_class = data.value("per_class", dc.per_class);
      dc.test_per_class = data.value("test_per_class", dc.test_per_class);
    } else {
      throw InvalidArgument("unknown data source \"" + source + "\"");
    }

    if (json.contains("noise")) {
      const Json& noise = json.at("noise");
      config.noise.input = noise.value("input", config.noise.input);
      config.noise.gaussian_variance =
          noise.value("variance", config.noise.gaussian_variance);
    }
    for (const auto& name : json.at("arms").get<std::vector<std::string>>()) {
      config.arms.push_back(ArmFromString(name));
    }
    config.p_flips = json.at("p_flip").get<std::vector<double>>();
    config.repetitions = json.value("repetitions", 1);
    config.seed = json.value("seed", uint64_t{0});
    config.outdir = json.value("outdir", std::string("experiment-out"));
    config.record_timing = json.value("record_timing", true);
    config.figures = json.value("figures", true);
    if (json.contains("train")) {
      const Json& t = json.at("train");
      config.logreg.learning_rate =
          t.value("learning_rate", config.logreg.learning_rate);
      config.logreg.iterations = t.value("iterations", config.logreg.iterations);
      config.spread.learning_rate =
          t.value("spread_learning_rate", config.logreg.learning_rate);
      config.spread.max_outer_iters =
          t.value("spread_iterations", config.logreg.iterations);
      config.spread.samples = t.value("samples", config.spread.samples);
      config.spread.tolerance = t.value("tolerance", config.spread.tolerance);
      config.spread.prior_floor =
          t.value("prior_floor", config.spread.prior_floor);
    }
    if (json.contains("gaussian_prior")) {
      const Json& g = json.at("gaussian_prior");
      config.gaussian_prior.mean = {g.value("mean", 0.0)};
      config.gaussian_prior.variance = {g.value("variance", 10.0)};
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
  auto& syn = config.data.synthetic;
  if (config.data.source == DataSource::kSynthetic && syn.theta0.empty()) {
    syn.theta0 = UnitDirection(syn.dims, MixSeed(config.seed, kTrainKey));
  }
  config.Validate();
  return config;
}

Json ToJson(const ExperimentConfig& config) {
  Json data;
  const DataConfig& dc = config.data;
  switch (dc.source) {
    case DataSource::kSynthetic:
      data = {{"source", "synthetic"},
              {"num_records", dc.synthetic.num_records},
              {"dims", dc.synthetic.dims},
              {"variances", dc.synthetic.variances},
              {"mean", dc.synthetic.mean},
              {"theta0", dc.synthetic.theta0},
              {"test_records", dc.test_records}};
      break;
    case DataSource::kSyntheticImages:
      data = {{"source", "synthetic_images"},
              {"per_class", dc.images.per_class},
              {"side", dc.images.side},
              {"num_states", dc.images.num_states},
              {"pixel_noise", dc.images.pixel_noise},
              {"stroke_jitter", dc.images.stroke_jitter},
              {"test_per_class", dc.test_per_class}};
      break;
    case DataSource::kIdx:
      data = {{"source", "idx"},
              {"train_images", dc.train_images.string()},
              {"train_labels", dc.train_labels.string()},
              {"test_images", dc.test_images.string()},
              {"test_labels", dc.test_labels.string()},
              {"classes", {dc.classes.first, dc.classes.second}},
              {"per_class", dc.per_class},
              {"test_per_class", dc.test_per_class}};
      break;
  }
  std::vector<std::string> arms;
  for (Arm arm : config.arms) arms.push_back(ToString(arm));
  return {{"data", data},
          {"noise",
           {{"input", config.noise.input},
            {"variance", config.noise.gaussian_variance}}},
          {"arms", arms},
          {"p_flip", config.p_flips},
          {"repetitions", config.repetitions},
          {"seed", config.seed},
          {"outdir", config.outdir.string()},
          {"record_timing", config.record_timing},
          {"figures", config.figures},
          {"train",
           {{"learning_rate", config.logreg.learning_rate},
            {"iterations", config.logreg.iterations},
            {"spread_learning_rate", config.spread.learning_rate},
            {"spread_iterations", config.spread.max_outer_iters},
            {"samples", config.spread.samples},
            {"tolerance", config.spread.tolerance},
            {"prior_floor", config.spread.prior_floor}}},
          {"gaussian_prior",
           {{"mean", config.gaussian_prior.mean_at(0)},
            {"variance", config.gaussian_prior.variance_at(0)}}}};
}

std::vector<ArmSummary> ExperimentReport::Summaries(
    const std::vector<Arm>& arms, const std::vector<double>& p_flips) const {
  std::vector<ArmSummary> out;
  for (Arm arm : arms) {
    for (double p : p_flips) {
      ArmSummary s{arm, p};
      std::vector<double> test, train;
      for (const auto& row : rows) {
        if (row.arm != arm || row.p_flip != p) continue;
        if (!row.ok) {
          ++s.failed;
          continue;
        }
        test.push_back(row.test_acc);
        train.push_back(row.train_acc);
      }
      s.runs = static_cast<int>(test.size());
      if (s.runs > 0) {
        for (std::size_t i = 0; i < test.size(); ++i) {
          s.mean_test += test[i];
          s.mean_train += train[i];
        }
        s.mean_test /= s.runs;
        s.mean_train /= s.runs;
        if (s.runs > 1) {
          double ss = 0.0;
          for (double v : test) ss += (v - s.mean_test) * (v - s.mean_test);
          s.std_test = std::sqrt(ss / (s.runs - 1));
        }
      }
      out.push_back(s);
    }
  }
  return out;
}

EvalResult Evaluate(const LogregModel& model, const LabeledDataset& data) {
  if (data.dims() != model.dims()) {
    throw InvalidArgument("feature dimension does not match the model");
  }
  if (data.size() == 0) throw InvalidArgument("cannot evaluate on empty data");
  const double correct = BlockedSum(data.size(), [&](std::size_t n) {
    const int predicted = Logit(model, data.x(n)) > 0.0 ? 1 : 0;
    return predicted == data.label(n) ? 1.0 : 0.0;
  });
  return {correct / static_cast<double>(data.size()),
          LogisticLoglik(model, data)};
}

uint64_t CorruptionSeed(uint64_t base, double p_flip, int rep) {
  return MixSeed(MixSeed(base, std::bit_cast<uint64_t>(p_flip)),
                 static_cast<uint64_t>(rep));
}

uint64_t ArmSeed(uint64_t base, Arm arm, double p_flip, int rep) {
  return MixSeed(CorruptionSeed(base, p_flip, rep),
                 static_cast<uint64_t>(arm) + 1);
}

ExperimentData::ExperimentData(const ExperimentConfig& config)
    : config_(config) {
  const DataConfig& dc = config.data;
  const uint64_t test_seed = MixSeed(config.seed, kTestKey);
  switch (dc.source) {
    case DataSource::kSynthetic: {
      SyntheticSpec spec = dc.synthetic;
      spec.num_records = dc.test_records;
      spec.seed = test_seed;
      test_ = GenerateSynthetic(spec);
      break;
    }
    case DataSource::kSyntheticImages: {
      SyntheticImageSpec spec = dc.images;
      spec.per_class = dc.test_per_class;
      spec.seed = test_seed;
      test_ = GenerateSyntheticImages(spec);
      break;
    }
    case DataSource::kIdx:
      pool_ = LoadIdx({dc.train_images, dc.train_labels, dc.classes, 0, 0});
      test_ = LoadIdx({dc.test_images, dc.test_labels, dc.classes,
                       dc.test_per_class, test_seed});
      break;
  }
}

LabeledDataset ExperimentData::TrainingSet(int rep) const {
  const DataConfig& dc = config_.data;
  const uint64_t seed =
      MixSeed(MixSeed(config_.seed, kTrainKey), static_cast<uint64_t>(rep));
  switch (dc.source) {
    case DataSource::kSynthetic: {
      SyntheticSpec spec = dc.synthetic;
      spec.seed = seed;
      return GenerateSynthetic(spec);
    }
    case DataSource::kSyntheticImages: {
      SyntheticImageSpec spec = dc.images;
      spec.seed = seed;
      return GenerateSyntheticImages(spec);
    }
    case DataSource::kIdx:
      return pool_.Subset(SampleBalanced(pool_, dc.per_class, seed));
  }
  return {};
}

CellData ExperimentData::Cell(double p_flip, int rep) const {
  CellData cell;
  cell.train_clean = TrainingSet(rep);
  cell.test_clean = test_;
  cell.channels.label = FlipChannel::Symmetric(p_flip);
  const std::string& input = config_.noise.input;
  if (input == "uniform_state") {
    cell.channels.input = UniformStateChannel(
        cell.train_clean.domain().num_states, p_flip);
  } else if (input == "gaussian") {
    if (cell.train_clean.domain().discrete()) {
      // Centre both sets on the clean training mean.
      const LabeledDataset reference = cell.train_clean;
      cell.train_clean = ToContinuous(reference, &reference);
      cell.test_clean = ToContinuous(test_, &reference);
    }
    cell.channels.input = GaussianChannel({config_.noise.gaussian_variance});
  }
  cell.corruption_seed = CorruptionSeed(config_.seed, p_flip, rep);
  cell.train_noisy =
      CorruptDataset(cell.train_clean, cell.channels, cell.corruption_seed);
  return cell;
}

ReportRow RunArm(const ExperimentConfig& config, const CellData& cell, Arm arm,
                 double p_flip, int rep) {
  ReportRow row;
  row.arm = arm;
  row.p_flip = p_flip;
  row.rep = rep;
  row.seed = ArmSeed(config.seed, arm, p_flip, rep);
  row.data_hash = cell.train_noisy.ContentHash();
  const auto start = std::chrono::steady_clock::now();
  try {
    LogregModel model;
    if (arm == Arm::kCleanLogreg || arm == Arm::kNoisyLogreg) {
      const LabeledDataset& data =
          arm == Arm::kCleanLogreg ? cell.train_clean : cell.train_noisy;
      LogregFit fit = arm == Arm::kCleanLogreg
                          ? TrainLogreg(data, config.logreg)
                          : TrainNaive(data, config.logreg);
      model = std::move(fit.model);
      row.energy = LogisticLoglik(model, data);
    } else {
      TrainConfig tc = config.spread;
      tc.seed = row.seed;
      switch (arm) {
        case Arm::kSpreadFlat: tc.prior_mode = PriorMode::kFlat; break;
        case Arm::kSpreadLearned: tc.prior_mode = PriorMode::kLearned; break;
        case Arm::kSpreadTrue:
          tc.prior_mode = PriorMode::kFixed;
          tc.fixed_prior = TrueMarginalPrior(cell.train_clean, tc.prior_floor);
          break;
        default:
          tc.prior_mode = PriorMode::kGaussian;
          tc.gaussian_prior = config.gaussian_prior;
          break;
      }
      SpreadFit fit = TrainSpreadLogreg(cell.train_noisy, cell.channels, tc);
      model = std::move(fit.model);
      row.energy = fit.energy_trace.empty() ? 0.0 : fit.energy_trace.back();
    }
    row.train_acc = Evaluate(model, cell.train_clean).accuracy;
    row.test_acc = Evaluate(model, cell.test_clean).accuracy;
  } catch (const Error& e) {
    row.ok = false;
    row.message = e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return row;
}

namespace {

constexpr const char* kReportHeader =
    "arm,p_f,rep,seed,train_acc,test_acc,energy,wall_ms,status";

std::string FormatRow(const ReportRow& row, bool record_timing) {
  std::ostringstream out;
  out << ToString(row.arm) << ',' << FormatDouble(row.p_flip) << ',' << row.rep
      << ',' << row.seed << ',' << FormatDouble(row.train_acc) << ','
      << FormatDouble(row.test_acc) << ',' << FormatDouble(row.energy) << ','
      << (record_timing ? FormatDouble(std::round(row.wall_ms * 1000.0) / 1000.0)
                        : std::string("0"))
      << ',' << (row.ok ? "ok" : "failed");
  return out.str();
}

using RowKey = std::tuple<int, double, int>;

RowKey KeyOf(const ReportRow& row) {
  return {static_cast<int>(row.arm), row.p_flip, row.rep};
}

// Serialized appender for report rows.
class ReportAppender {
 public:
  ReportAppender(const std::filesystem::path& path, bool record_timing)
      : record_timing_(record_timing) {
    const bool fresh = !std::filesystem::exists(path) ||
                       std::filesystem::file_size(path) == 0;
    out_.open(path, std::ios::app);
    if (!out_) throw DataError("cannot write " + path.string());
    if (fresh) out_ << kReportHeader << '\n' << std::flush;
  }

  void Append(const ReportRow& row) {
    std::lock_guard<std::mutex> lock(mu_);
    out_ << FormatRow(row, record_timing_) << '\n' << std::flush;
  }

 private:
  bool record_timing_;
  std::mutex mu_;
  std::ofstream out_;
};

void SortCanonical(std::vector<ReportRow>& rows, const ExperimentConfig& config) {
  auto arm_pos = [&](Arm arm) {
    return std::find(config.arms.begin(), config.arms.end(), arm) -
           config.arms.begin();
  };
  auto p_pos = [&](double p) {
    return std::find(config.p_flips.begin(), config.p_flips.end(), p) -
           config.p_flips.begin();
  };
  std::ranges::stable_sort(rows, [&](const ReportRow& a, const ReportRow& b) {
    return std::tuple(arm_pos(a.arm), p_pos(a.p_flip), a.rep) <
           std::tuple(arm_pos(b.arm), p_pos(b.p_flip), b.rep);
  });
}

void WriteFigures(const ExperimentConfig& config, const ExperimentReport& report,
                  const ExperimentData& data) {
  const auto dir = config.outdir / "figures";
  std::filesystem::create_directories(dir);
  std::vector<std::string> warnings;
  try {
    const LinePlot plot =
        AccuracyPlot(report, config.arms, config.p_flips, &warnings);
    WriteText(RenderSvg(plot), dir / "accuracy_vs_pf.svg");
  } catch (const InvalidArgument& e) {
    warnings.push_back(std::string("accuracy plot skipped: ") + e.what());
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  // Noisy-image grid for square image data.
  const std::size_t dims = data.test().dims();
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(dims)));
  if (config.data.source == DataSource::kSynthetic || side * side != dims) {
    return;
  }
  std::vector<CellData> cells;
  for (double p : config.p_flips) cells.push_back(data.Cell(p, 0));
  std::vector<std::size_t> picks;
  for (int cls = 0; cls < 2; ++cls) {
    int taken = 0;
    for (std::size_t n = 0; n < cells[0].train_clean.size() && taken < 3; ++n) {
      if (cells[0].train_clean.label(n) == cls) {
        picks.push_back(n);
        ++taken;
      }
    }
  }
  std::vector<ImageRow> rows;
  rows.push_back({"clean", &cells[0].train_clean, picks});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rows.push_back({"p_f=" + FormatDouble(config.p_flips[i]),
                    &cells[i].train_noisy, picks});
  }
  const bool continuous = !cells[0].train_clean.domain().discrete();
  WriteText(RenderImageGrid(rows, side, continuous ? -0.5 : 0.0,
                            continuous ? 0.5 : 1.0),
            dir / "noisy_images.svg");
}

}  // namespace

void WriteReportCsv(const ExperimentReport& report, bool record_timing,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << kReportHeader << '\n';
  for (const auto& row : report.rows) out << FormatRow(row, record_timing) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<ReportRow> ReadReportCsv(const std::filesystem::path& path) {
  std::vector<ReportRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != kReportHeader) throw DataError(path.string() + ": bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    // A partially written last line is dropped and rerun.
    if (f.size() != 9) continue;
    ReportRow row;
    row.arm = ArmFromString(f[0]);
    row.p_flip = ParseDouble(f[1]);
    row.rep = std::stoi(f[2]);
    row.seed = std::stoull(f[3]);
    row.train_acc = ParseDouble(f[4]);
    row.test_acc = ParseDouble(f[5]);
    row.energy = ParseDouble(f[6]);
    row.wall_ms = ParseDouble(f[7]);
    if (f[8] != "ok" && f[8] != "failed") continue;
    row.ok = f[8] == "ok";
    rows.push_back(row);
  }
  return rows;
}

ExperimentReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  std::filesystem::create_directories(config.outdir);
  WriteJsonFile(ToJson(config), config.outdir / "config-echo.json");
  const auto report_path = config.outdir / "report.csv";

  std::map<RowKey, ReportRow> done;
  for (auto& row : ReadReportCsv(report_path)) done[KeyOf(row)] = row;

  const ExperimentData data(config);
  struct CellTask {
    double p_flip;
    int rep;
  };
  std::vector<CellTask> tasks;
  for (double p : config.p_flips) {
    for (int rep = 0; rep < config.repetitions; ++rep) tasks.push_back({p, rep});
  }

  ReportAppender appender(report_path, config.record_timing);
  std::vector<std::vector<ReportRow>> results(tasks.size());
  std::vector<uint64_t> clean_hash(tasks.size()), noisy_hash(tasks.size());
  std::vector<std::string> errors(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  const int saved_levels = omp_get_max_active_levels();
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(MaxThreads())
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const CellTask& task = tasks[t];
    try {
      const CellData cell = data.Cell(task.p_flip, task.rep);
      clean_hash[t] = cell.train_clean.ContentHash();
      noisy_hash[t] = cell.train_noisy.ContentHash();
      for (Arm arm : config.arms) {
        const auto it = done.find({static_cast<int>(arm), task.p_flip, task.rep});
        if (it != done.end()) {
          ReportRow row = it->second;
          row.data_hash = noisy_hash[t];
          results[t].push_back(row);
          continue;
        }
        ReportRow row = RunArm(config, cell, arm, task.p_flip, task.rep);
        if (!row.ok) {
          std::cerr << "warning: " << ToString(arm) << " p_f=" << task.p_flip
                    << " rep=" << task.rep << " failed: " << row.message
                    << '\n';
        }
        appender.Append(row);
        results[t].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  }
  omp_set_max_active_levels(saved_levels);
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError("experiment cell failed: " + e);
  }

  ExperimentReport report;
  for (auto& cell_rows : results) {
    for (auto& row : cell_rows) report.rows.push_back(std::move(row));
  }
  SortCanonical(report.rows, config);
  WriteReportCsv(report, config.record_timing, report_path);

  std::ofstream cells(config.outdir / "cells.csv", std::ios::trunc);
  cells << "p_f,rep,corruption_seed,clean_hash,noisy_hash\n";
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    cells << FormatDouble(tasks[t].p_flip) << ',' << tasks[t].rep << ','
          << CorruptionSeed(config.seed, tasks[t].p_flip, tasks[t].rep) << ','
          << clean_hash[t] << ',' << noisy_hash[t] << '\n';
  }
  if (config.figures) WriteFigures(config, report, data);
  return report;
}

}  // namespace spreadlearn
