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

#include "spreadlearn/cli.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "spreadlearn/baselines.h"
#include "spreadlearn/config_json.h"
#include "spreadlearn/error.h"
#include "spreadlearn/estimators.h"
#include "spreadlearn/experiments.h"
#include "spreadlearn/figures.h"
#include "spreadlearn/parallel.h"

namespace spreadlearn {

namespace {

std::string Num(double v) {
  char buf[64];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

// Dataset flags shared by corrupt / train / eval.
struct DataFlags {
  std::string csv;
  std::string images, labels;
  std::vector<int> classes = {7, 9};
  std::size_t per_class = 0;
  uint64_t subsample_seed = 0;
  int states = 0;  // CSV domain: 0 continuous, else K discrete states

  void Add(CLI::App* cmd) {
    cmd->add_option("--data", csv, "Dataset CSV (header c,x0,...)");
    cmd->add_option("--images", images, "IDX image file");
    cmd->add_option("--labels", labels, "IDX label file");
    cmd->add_option("--classes", classes, "Two digits kept from IDX input")
        ->expected(2);
    cmd->add_option("--per-class", per_class,
                    "Records per class drawn from IDX input (0 keeps all)");
    cmd->add_option("--subsample-seed", subsample_seed,
                    "Seed of the IDX per-class draw");
    cmd->add_option("--states", states,
                    "Number of discrete states per CSV feature (0: real)");
  }

  LabeledDataset Load(std::optional<int> default_states = std::nullopt) const {
    if (!images.empty() || !labels.empty()) {
      if (images.empty() || labels.empty()) {
        throw InvalidArgument("--images and --labels go together");
      }
      return LoadIdx({images, labels, {classes[0], classes[1]}, per_class,
                      subsample_seed});
    }
    if (csv.empty()) throw InvalidArgument("--data or --images/--labels is required");
    const int k = states > 0 ? states : default_states.value_or(0);
    return ReadCsv(csv, k > 0 ? FeatureDomain::Discrete(k)
                              : FeatureDomain::Continuous());
  }
};

std::optional<int> ChannelStates(const ChannelSet& channels) {
  if (const auto* u = std::get_if<UniformStateChannel>(&channels.input)) {
    return u->num_states();
  }
  if (const auto* d = std::get_if<DiscreteChannel>(&channels.input)) {
    return d->num_states();
  }
  return std::nullopt;
}

void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteText(text, path);
  }
}

std::vector<double> ReadCounts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "state,count") {
    throw DataError(path + ": expected header \"state,count\"");
  }
  std::vector<std::pair<int, double>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    int state = 0;
    double count = 0.0;
    const char* b = line.data();
    if (comma == std::string::npos ||
        std::from_chars(b, b + comma, state).ec != std::errc() ||
        std::from_chars(b + comma + 1, b + line.size(), count).ec !=
            std::errc() ||
        state < 0) {
      throw DataError(path + ": bad row \"" + line + "\"");
    }
    entries.emplace_back(state, count);
  }
  int k = 0;
  for (const auto& [s, c] : entries) k = std::max(k, s + 1);
  std::vector<double> counts(k, 0.0);
  for (const auto& [s, c] : entries) counts[s] += c;
  return counts;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Learning from randomised-response data", "spreadlearn"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "Thread cap (overrides SPREADLEARN_THREADS)");

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "Release one corrupted copy");
  DataFlags corrupt_data;
  corrupt_data.Add(corrupt);
  std::string corrupt_channels, corrupt_out;
  uint64_t corrupt_seed = 0;
  corrupt->add_option("--channels", corrupt_channels, "Channel set JSON")
      ->required();
  corrupt->add_option("--seed", corrupt_seed, "Corruption seed")->required();
  corrupt->add_option("--out", corrupt_out, "Output CSV")->required();

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "Spread MLE of a state distribution from corrupted counts");
  std::string est_counts, est_channel, est_method = "auto", est_out;
  estimate->add_option("--counts", est_counts, "CSV with header state,count")
      ->required();
  estimate->add_option("--channel", est_channel, "Channel JSON")->required();
  estimate->add_option("--method", est_method, "auto|voting|em|grid")
      ->check(CLI::IsMember({"auto", "voting", "em", "grid"}));
  estimate->add_option("--out", est_out, "Output JSON (default stdout)");

  // train
  auto* train = app.add_subcommand("train", "Train logistic regression");
  DataFlags train_data;
  train_data.Add(train);
  std::string train_channels, train_prior = "flat", train_out, prior_data;
  bool plain = false;
  TrainConfig tc;
  LogregConfig lc;
  double prior_mean = 0.0, prior_var = 10.0;
  int iters = 400;
  double lr = 0.2;
  train->add_option("--channels", train_channels,
                    "Channel set JSON (required unless --plain)");
  train->add_flag("--plain", plain, "Standard logistic regression on the data");
  train->add_option("--prior", train_prior, "flat|learn|true|gaussian")
      ->check(CLI::IsMember({"flat", "learn", "true", "gaussian"}));
  train->add_option("--prior-data", prior_data,
                    "Clean CSV whose marginals form the true prior");
  train->add_option("--prior-mean", prior_mean, "Gaussian prior mean");
  train->add_option("--prior-var", prior_var, "Gaussian prior variance");
  train->add_option("--samples", tc.samples, "Importance samples per record");
  train->add_option("--lr", lr, "Learning rate");
  train->add_option("--iters", iters, "Iterations");
  train->add_option("--tolerance", tc.tolerance,
                    "Energy-gain stopping tolerance (<= 0 disables)");
  train->add_option("--seed", tc.seed, "Importance-sampling seed");
  train->add_option("--out", train_out, "Model JSON")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy and log likelihood");
  DataFlags eval_data;
  eval_data.Add(eval);
  std::string eval_model, eval_out;
  eval->add_option("--model", eval_model, "Model JSON")->required();
  eval->add_option("--out", eval_out, "Output JSON (default stdout)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Baseline analyses");
  std::string mode, an_out, an_svg;
  std::string an_pflips = "0,0.001,0.002,0.003,0.004";
  double grid_step = kReconGridStep, theta0_step = 0.01;
  NoisyLabelAnalysis nla;
  std::vector<double> sigma = {1, 0, 0, 25}, theta0 = {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2};
  double an_pflip = 0.2;
  int nodes = 32;
  analyze
      ->add_option("mode", mode,
                   "recon-curve|noisy-label-grad|noisy-label-hess|anisotropy")
      ->required()
      ->check(CLI::IsMember(
          {"recon-curve", "noisy-label-grad", "noisy-label-hess", "anisotropy"}));
  analyze->add_option("--p-flips", an_pflips, "recon-curve: comma list");
  analyze->add_option("--grid-step", grid_step, "recon-curve: theta grid");
  analyze->add_option("--theta0-step", theta0_step, "recon-curve: theta0 grid");
  analyze->add_option("--svg", an_svg, "recon-curve: panel SVG");
  analyze->add_option("--p-1to1", nla.p_1to1, "p(noisy=1|clean=1)");
  analyze->add_option("--p-0to1", nla.p_0to1, "p(noisy=1|clean=0)");
  analyze->add_option("--s", nla.s, "Input scale");
  analyze->add_option("--alpha", nla.alpha, "Angle to theta0 (radians)");
  analyze->add_option("--samples", nla.mc_samples, "Monte Carlo draws");
  analyze->add_option("--seed", nla.seed, "Monte Carlo seed");
  analyze->add_flag("--antithetic", nla.antithetic, "Antithetic e2 pairs");
  analyze->add_option("--nodes", nodes, "Gauss-Hermite nodes");
  analyze->add_option("--sigma", sigma, "anisotropy: 2x2 covariance, row-major")
      ->expected(4);
  analyze->add_option("--theta0", theta0, "anisotropy: true direction")
      ->expected(2);
  analyze->add_option("--p-flip", an_pflip, "anisotropy: label flip");
  analyze->add_option("--out", an_out, "Output CSV (default stdout)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run an experiment grid");
  std::string exp_config, exp_outdir;
  experiment->add_option("--config", exp_config, "Experiment JSON")->required();
  experiment->add_option("--outdir", exp_outdir, "Override the output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (threads > 0) SetMaxThreads(threads);

    if (corrupt->parsed()) {
      const ChannelSet channels =
          ChannelSetFromJson(ReadJsonFile(corrupt_channels));
      const LabeledDataset data = corrupt_data.Load(ChannelStates(channels));
      WriteCsv(CorruptDataset(data, channels, corrupt_seed), corrupt_out);
      return kExitOk;
    }

    if (estimate->parsed()) {
      const Json channel_json = ReadJsonFile(est_channel);
      const std::vector<double> counts = ReadCounts(est_counts);
      Json result;
      const bool flip = channel_json.value("kind", "") == "flip";
      std::string method = est_method;
      if (method == "auto") method = flip ? "voting" : "em";
      if (method == "voting") {
        if (!flip) throw InvalidArgument("voting needs a flip channel");
        if (counts.size() > 2) throw InvalidArgument("voting needs K = 2 counts");
        const double c0 = counts.size() > 0 ? counts[0] : 0.0;
        const double c1 = counts.size() > 1 ? counts[1] : 0.0;
        if (!(c0 + c1 > 0.0)) throw DataError("zero total count");
        const auto v = EstimateVoting(c1 / (c0 + c1), FlipChannelFromJson(channel_json));
        result = {{"method", "voting"},
                  {"theta", v.theta},
                  {"raw", v.raw},
                  {"clipped", v.clipped},
                  {"q", {1.0 - v.theta, v.theta}}};
      } else {
        const DiscreteChannel channel = DiscreteChannelFromJson(channel_json);
        std::vector<double> padded = counts;
        if (static_cast<int>(padded.size()) > channel.num_states()) {
          throw DataError("count state exceeds the channel's state count");
        }
        padded.resize(channel.num_states(), 0.0);
        const auto est = SpreadMleDiscrete(
            padded, channel,
            method == "grid" ? SimplexStrategy::kGrid : SimplexStrategy::kEm);
        result = {{"method", method},
                  {"q", est.q},
                  {"objective", est.objective},
                  {"iterations", est.iterations}};
        if (est.q.size() == 2) result["theta"] = est.q[1];
      }
      Emit(result.dump(2) + "\n", est_out, out);
      return kExitOk;
    }

    if (train->parsed()) {
      ModelFile file;
      if (plain) {
        lc.learning_rate = lr;
        lc.iterations = iters;
        const LabeledDataset data = train_data.Load();
        LogregFit fit = TrainLogreg(data, lc);
        file.kind = "logreg";
        file.model = std::move(fit.model);
        file.trace = std::move(fit.loglik_trace);
        file.final_energy = LogisticLoglik(file.model, data);
        file.iterations = iters;
        file.config = {{"learning_rate", lr}, {"iterations", iters}};
      } else {
        if (train_channels.empty()) {
          throw InvalidArgument("--channels is required unless --plain");
        }
        const ChannelSet channels =
            ChannelSetFromJson(ReadJsonFile(train_channels));
        const LabeledDataset data = train_data.Load(ChannelStates(channels));
        tc.learning_rate = lr;
        tc.max_outer_iters = iters;
        tc.prior_mode = PriorModeFromString(train_prior);
        if (tc.prior_mode == PriorMode::kFixed) {
          if (prior_data.empty()) {
            throw InvalidArgument("--prior true needs --prior-data");
          }
          tc.fixed_prior =
              TrueMarginalPrior(ReadCsv(prior_data, data.domain()), tc.prior_floor);
        }
        tc.gaussian_prior = {{prior_mean}, {prior_var}};
        SpreadFit fit = TrainSpreadLogreg(data, channels, tc);
        file.kind = "spread";
        file.model = std::move(fit.model);
        file.prior = std::move(fit.prior);
        file.trace = std::move(fit.energy_trace);
        file.final_energy = file.trace.empty() ? 0.0 : file.trace.back();
        file.iterations = fit.iterations;
        file.converged = fit.converged;
        file.config = {{"channels", ToJson(channels)},
                       {"prior", train_prior},
                       {"samples", tc.samples},
                       {"learning_rate", lr},
                       {"iterations", iters},
                       {"tolerance", tc.tolerance},
                       {"seed", tc.seed}};
      }
      WriteJsonFile(ToJson(file), train_out);
      return kExitOk;
    }

    if (eval->parsed()) {
      const ModelFile file = ModelFileFromJson(ReadJsonFile(eval_model));
      std::optional<int> states;
      if (file.model.input_scale != 1.0) {
        states = static_cast<int>(std::lround(1.0 / file.model.input_scale)) + 1;
      }
      const EvalResult r = Evaluate(file.model, eval_data.Load(states));
      const Json result = {{"accuracy", r.accuracy}, {"loglik", r.loglik}};
      Emit(result.dump(2) + "\n", eval_out, out);
      return kExitOk;
    }

    if (analyze->parsed()) {
      std::ostringstream csv;
      if (mode == "recon-curve") {
        std::vector<ReconstructionCurve> curves;
        for (const auto& p : SplitList(an_pflips)) {
          curves.push_back(ReconCurve(std::stod(p), grid_step, theta0_step));
        }
        csv << "p_f,theta0,argmax_theta\n";
        for (const auto& c : curves) {
          for (std::size_t i = 0; i < c.theta0.size(); ++i) {
            csv << Num(c.p_flip) << ',' << Num(c.theta0[i]) << ','
                << Num(c.argmax_theta[i]) << '\n';
          }
        }
        if (!an_svg.empty()) WriteText(RenderReconPanels(curves), an_svg);
      } else if (mode == "noisy-label-grad") {
        const McEstimate g = NoisyLabelGradientAtAlpha(nla);
        csv << "p_1to1,p_0to1,s,alpha,samples,gradient,std_error\n"
            << Num(nla.p_1to1) << ',' << Num(nla.p_0to1) << ',' << Num(nla.s)
            << ',' << Num(nla.alpha) << ',' << nla.mc_samples << ','
            << Num(g.mean) << ',' << Num(g.std_error) << '\n';
      } else if (mode == "noisy-label-hess") {
        const HessianTerms h = NoisyLabelHessianAtZero(nla);
        const HessianQuadrature q =
            NoisyLabelHessianQuadrature(nla.p_1to1, nla.p_0to1, nla.s, nodes);
        csv << "p_1to1,p_0to1,s,samples,hessian,std_error,first,second,"
               "quad_hessian,quad_first,quad_second\n"
            << Num(nla.p_1to1) << ',' << Num(nla.p_0to1) << ',' << Num(nla.s)
            << ',' << nla.mc_samples << ',' << Num(h.total.mean) << ','
            << Num(h.total.std_error) << ',' << Num(h.first.mean) << ','
            << Num(h.second.mean) << ',' << Num(q.total) << ','
            << Num(q.first) << ',' << Num(q.second) << '\n';
      } else {
        const AnisotropyResult r = AnisotropyCounterexample(
            {sigma[0], sigma[1], sigma[2], sigma[3]}, {theta0[0], theta0[1]},
            FlipChannel::Symmetric(an_pflip), nla.mc_samples, nla.seed);
        csv << "g0,g1,norm,norm_se,tangential,tangential_se,z_score,exceeds\n"
            << Num(r.gradient[0]) << ',' << Num(r.gradient[1]) << ','
            << Num(r.norm) << ',' << Num(r.norm_se) << ',' << Num(r.tangential)
            << ',' << Num(r.tangential_se) << ',' << Num(r.z_score) << ','
            << (r.exceeds ? 1 : 0) << '\n';
      }
      Emit(csv.str(), an_out, out);
      return kExitOk;
    }

    if (experiment->parsed()) {
      Json json = ReadJsonFile(exp_config);
      if (!exp_outdir.empty()) json["outdir"] = exp_outdir;
      const ExperimentConfig config = ExperimentConfigFromJson(json);
      const ExperimentReport report = RunExperiment(config);
      for (const auto& s : report.Summaries(config.arms, config.p_flips)) {
        err << ToString(s.arm) << " p_f=" << s.p_flip << " runs=" << s.runs
            << " failed=" << s.failed << " test_acc=" << s.mean_test << " +- "
            << s.std_test << '\n';
      }
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace spreadlearn
