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

#include "spreadlearn/dataset.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "spreadlearn/error.h"
#include "spreadlearn/parallel.h"
#include "spreadlearn/priors.h"
#include "spreadlearn/rng.h"

namespace spreadlearn {

LabeledDataset::LabeledDataset(Matrix features, std::vector<uint8_t> labels,
                               FeatureDomain domain, Provenance provenance)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      domain_(domain),
      provenance_(std::move(provenance)) {
  if (labels_.size() != features_.rows()) {
    throw InvalidArgument("dataset: label count differs from feature rows");
  }
  for (uint8_t c : labels_) {
    if (c > 1) throw InvalidArgument("dataset: labels must be 0 or 1");
  }
  if (domain_.discrete()) {
    if (domain_.num_states < 2) {
      throw InvalidArgument("dataset: discrete domain needs K >= 2");
    }
    for (double v : features_.values()) {
      if (!(v >= 0.0) || v >= domain_.num_states || v != std::floor(v)) {
        std::ostringstream msg;
        msg << "dataset: value " << v << " is not a state in [0, "
            << domain_.num_states << ")";
        throw InvalidArgument(msg.str());
      }
    }
  }
}

LabeledDataset LabeledDataset::WithCorruption(Matrix features,
                                              std::vector<uint8_t> labels,
                                              std::string channel_id,
                                              uint64_t seed) const {
  if (features.rows() != features_.rows() ||
      features.cols() != features_.cols()) {
    throw InvalidArgument("corruption must preserve the dataset shape");
  }
  return LabeledDataset(std::move(features), std::move(labels), domain_,
                        Provenance::Corrupted(std::move(channel_id), seed));
}

LabeledDataset LabeledDataset::Subset(std::span<const std::size_t> rows) const {
  Matrix features(rows.size(), dims());
  std::vector<uint8_t> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= size()) throw InvalidArgument("subset row out of range");
    std::ranges::copy(x(rows[i]), features.row(i).begin());
    labels[i] = labels_[rows[i]];
  }
  return LabeledDataset(std::move(features), std::move(labels), domain_,
                        provenance_);
}

uint64_t LabeledDataset::ContentHash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const uint64_t shape[2] = {size(), dims()};
  feed(shape, sizeof(shape));
  feed(labels_.data(), labels_.size());
  feed(features_.values().data(), features_.values().size() * sizeof(double));
  return h;
}

std::vector<double> UnitDirection(std::size_t dims,
                                  std::optional<uint64_t> seed) {
  std::vector<double> v(dims, 0.0);
  if (dims == 0) return v;
  if (!seed) {
    v[0] = 1.0;
    return v;
  }
  SplitMix64 rng = RecordStream(*seed, StreamTag::kSynthetic, ~0ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

LabeledDataset GenerateSynthetic(const SyntheticSpec& spec) {
  const std::size_t dims = spec.dims;
  if (dims == 0) throw InvalidArgument("synthetic: dims must be positive");
  if (spec.theta0.size() != dims) {
    throw InvalidArgument("synthetic: theta0 must have D entries");
  }
  if (spec.variances.size() != 1 && spec.variances.size() != dims) {
    throw InvalidArgument("synthetic: need 1 or D variances");
  }
  for (double v : spec.variances) {
    if (!(v > 0.0)) throw InvalidArgument("synthetic: variances must be > 0");
  }
  if (!spec.mean.empty() && spec.mean.size() != dims) {
    throw InvalidArgument("synthetic: mean must be empty or have D entries");
  }
  double norm = 0.0;
  for (double t : spec.theta0) norm += t * t;
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) {
    throw InvalidArgument("synthetic: theta0 must have unit norm");
  }

  Matrix features(spec.num_records, dims);
  std::vector<uint8_t> labels(spec.num_records);
  ParallelFor(spec.num_records, [&](std::size_t n) {
    SplitMix64 rng = RecordStream(spec.seed, StreamTag::kSynthetic, n);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto row = features.row(n);
    for (std::size_t d = 0; d < dims; ++d) {
      const double var =
          spec.variances.size() == 1 ? spec.variances[0] : spec.variances[d];
      const double mu = spec.mean.empty() ? 0.0 : spec.mean[d];
      row[d] = mu + std::sqrt(var) * normal(rng);
    }
    const double p1 = Sigmoid(Dot(spec.theta0, row));
    labels[n] = rng.Uniform() < p1 ? 1 : 0;
  });
  return LabeledDataset(std::move(features), std::move(labels),
                        FeatureDomain::Continuous(), Provenance::Clean());
}

namespace {

struct Segment {
  double x0, y0, x1, y1;
};

double DistanceToSegment(double px, double py, const Segment& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = s.x0 + t * dx - px;
  const double qy = s.y0 + t * dy - py;
  return std::sqrt(qx * qx + qy * qy);
}

// Stroke skeletons in unit-square image coordinates (y grows downwards).
std::vector<Segment> Prototype(int cls) {
  if (cls == 0) {  // a "7": top bar and a slanted stem
    return {{0.22, 0.22, 0.78, 0.22}, {0.78, 0.22, 0.42, 0.85}};
  }
  // A "9": closed loop on top with a stem on the right.
  std::vector<Segment> segs;
  constexpr int kArcs = 12;
  const double cx = 0.5, cy = 0.36, r = 0.19;
  for (int i = 0; i < kArcs; ++i) {
    const double a0 = 2 * std::numbers::pi * i / kArcs;
    const double a1 = 2 * std::numbers::pi * (i + 1) / kArcs;
    segs.push_back({cx + r * std::cos(a0), cy + r * std::sin(a0),
                    cx + r * std::cos(a1), cy + r * std::sin(a1)});
  }
  segs.push_back({cx + r, cy, 0.64, 0.86});
  return segs;
}

}  // namespace

LabeledDataset GenerateSyntheticImages(const SyntheticImageSpec& spec) {
  if (spec.side < 2 || spec.num_states < 2 || spec.per_class == 0) {
    throw InvalidArgument("synthetic images: bad spec");
  }
  const std::size_t side = spec.side;
  const std::size_t dims = side * side;
  const std::size_t total = 2 * spec.per_class;
  const double top_state = spec.num_states - 1;
  Matrix features(total, dims);
  std::vector<uint8_t> labels(total);
  const std::array<std::vector<Segment>, 2> prototypes = {Prototype(0),
                                                          Prototype(1)};
  ParallelFor(total, [&](std::size_t n) {
    SplitMix64 rng = RecordStream(spec.seed, StreamTag::kSynthetic, n);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int cls = static_cast<int>(n % 2);
    labels[n] = static_cast<uint8_t>(cls);
    const double shift_x = spec.stroke_jitter * normal(rng) / side;
    const double shift_y = spec.stroke_jitter * normal(rng) / side;
    const double scale = 1.0 + 0.08 * normal(rng);
    const double width = (0.55 + 0.1 * normal(rng)) / side;
    auto row = features.row(n);
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        // Pixel centre mapped back into prototype coordinates.
        const double px = ((j + 0.5) / side - 0.5 - shift_x) / scale + 0.5;
        const double py = ((i + 0.5) / side - 0.5 - shift_y) / scale + 0.5;
        double dist = 1e9;
        for (const auto& seg : prototypes[cls]) {
          dist = std::min(dist, DistanceToSegment(px, py, seg));
        }
        double intensity = std::exp(-dist * dist / (2 * width * width));
        intensity += spec.pixel_noise * normal(rng);
        if (intensity < 0.15) intensity = 0.0;
        intensity = std::min(intensity, 1.0);
        row[i * side + j] = std::round(intensity * top_state);
      }
    }
  });
  return LabeledDataset(std::move(features), std::move(labels),
                        FeatureDomain::Discrete(spec.num_states),
                        Provenance::Clean());
}

namespace {

void AppendDouble(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double ParseNumber(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
    field.remove_suffix(1);
  }
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    std::ostringstream msg;
    msg << "CSV line " << line_no << ": cannot parse '" << field << "'";
    throw DataError(msg.str());
  }
  return value;
}

}  // namespace

void WriteCsv(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  std::string buffer = "c";
  for (std::size_t d = 0; d < data.dims(); ++d) {
    buffer += ",x" + std::to_string(d);
  }
  buffer += '\n';
  for (std::size_t n = 0; n < data.size(); ++n) {
    buffer += static_cast<char>('0' + data.label(n));
    for (double v : data.x(n)) {
      buffer += ',';
      AppendDouble(buffer, v);
    }
    buffer += '\n';
  }
  out << buffer;
  if (!out) throw DataError("failed writing " + path.string());
}

LabeledDataset ReadCsv(const std::filesystem::path& path,
                       FeatureDomain domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitCsvLine(line);
  if (header.empty() || header[0] != "c") {
    throw DataError(path.string() + ": first column must be 'c'");
  }
  const std::size_t dims = header.size() - 1;
  for (std::size_t d = 0; d < dims; ++d) {
    if (header[d + 1] != "x" + std::to_string(d)) {
      throw DataError(path.string() + ": expected column x" +
                      std::to_string(d));
    }
  }
  std::vector<double> values;
  std::vector<uint8_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != dims + 1) {
      std::ostringstream msg;
      msg << path.string() << " line " << line_no << ": expected "
          << dims + 1 << " fields, got " << fields.size();
      throw DataError(msg.str());
    }
    const double c = ParseNumber(fields[0], line_no);
    if (c != 0.0 && c != 1.0) {
      throw DataError(path.string() + ": label must be 0 or 1");
    }
    labels.push_back(static_cast<uint8_t>(c));
    for (std::size_t d = 0; d < dims; ++d) {
      values.push_back(ParseNumber(fields[d + 1], line_no));
    }
  }
  const std::size_t rows = labels.size();
  try {
    return LabeledDataset(Matrix(rows, dims, std::move(values)),
                          std::move(labels), domain, Provenance::Clean());
  } catch (const InvalidArgument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

LabeledDataset ToContinuous(const LabeledDataset& data,
                            const LabeledDataset* center_reference) {
  auto rescale = [](const LabeledDataset& d) {
    Matrix m = d.features();
    if (d.domain().discrete()) {
      const double top = d.domain().num_states - 1;
      for (double& v : m.values()) v /= top;
    }
    return m;
  };
  Matrix features = rescale(data);
  if (center_reference != nullptr) {
    if (center_reference->dims() != data.dims()) {
      throw InvalidArgument("centering reference has a different dimension");
    }
    const Matrix ref = rescale(*center_reference);
    std::vector<double> mean(data.dims(), 0.0);
    for (std::size_t n = 0; n < ref.rows(); ++n) {
      for (std::size_t d = 0; d < ref.cols(); ++d) mean[d] += ref(n, d);
    }
    for (double& m : mean) m /= std::max<std::size_t>(1, ref.rows());
    for (std::size_t n = 0; n < features.rows(); ++n) {
      for (std::size_t d = 0; d < features.cols(); ++d) {
        features(n, d) -= mean[d];
      }
    }
  }
  std::vector<uint8_t> labels(data.labels().begin(), data.labels().end());
  return LabeledDataset(std::move(features), std::move(labels),
                        FeatureDomain::Continuous(), data.provenance());
}

std::vector<std::size_t> SampleBalanced(const LabeledDataset& data,
                                        std::size_t per_class, uint64_t seed) {
  std::vector<std::size_t> chosen;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t n = 0; n < data.size(); ++n) {
      if (data.label(n) == cls) members.push_back(n);
    }
    if (members.size() < per_class) {
      std::ostringstream msg;
      msg << "class " << cls << " has " << members.size()
          << " records, fewer than the " << per_class << " requested";
      throw DataError(msg.str());
    }
    SplitMix64 rng = RecordStream(seed, StreamTag::kSubsample,
                                  static_cast<uint64_t>(cls));
    // Partial Fisher-Yates: the first per_class entries are the draw.
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.Uniform() * (members.size() - i));
      std::swap(members[i], members[std::min(j, members.size() - 1)]);
    }
    chosen.insert(chosen.end(), members.begin(), members.begin() + per_class);
  }
  std::ranges::sort(chosen);
  return chosen;
}

DiscretePrior::DiscretePrior(std::size_t dims, int num_states,
                             std::vector<double> tables)
    : dims_(dims), num_states_(num_states), tables_(std::move(tables)) {
  if (num_states_ < 1 || tables_.size() != dims_ * num_states_) {
    throw InvalidArgument("discrete prior: tables must be D x K");
  }
  for (std::size_t d = 0; d < dims_; ++d) {
    double total = 0.0;
    for (double p : table(d)) {
      if (!(p >= 0.0)) throw InvalidArgument("discrete prior: negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) {
      throw InvalidArgument("discrete prior: table does not sum to 1");
    }
  }
}

DiscretePrior DiscretePrior::Flat(std::size_t dims, int num_states) {
  return DiscretePrior(dims, num_states,
                       std::vector<double>(dims * num_states, 1.0 / num_states));
}

DiscretePrior DiscretePrior::FromWeights(std::size_t dims, int num_states,
                                         std::vector<double> weights,
                                         double floor) {
  const auto k = static_cast<std::size_t>(num_states);
  if (weights.size() != dims * k) {
    throw InvalidArgument("prior weights must be D x K");
  }
  for (std::size_t d = 0; d < dims; ++d) {
    std::span<double> row(weights.data() + d * k, k);
    double total = 0.0;
    for (double w : row) total += w;
    if (!(total > 0.0)) {
      std::ranges::fill(row, 1.0 / num_states);
      continue;
    }
    double floored_total = 0.0;
    for (double& w : row) {
      w = std::max(w / total, floor);
      floored_total += w;
    }
    for (double& w : row) w /= floored_total;
  }
  return DiscretePrior(dims, num_states, std::move(weights));
}

void GaussianPrior::Check(std::size_t dims) const {
  if ((mean.size() != 1 && mean.size() != dims) ||
      (variance.size() != 1 && variance.size() != dims)) {
    throw InvalidArgument("gaussian prior: need 1 or D means and variances");
  }
  for (double v : variance) {
    if (!(v > 0.0)) throw InvalidArgument("gaussian prior: variance <= 0");
  }
}

DiscretePrior TrueMarginalPrior(const LabeledDataset& data, double floor) {
  if (!data.domain().discrete()) {
    throw InvalidArgument("true marginal prior needs discrete features");
  }
  const int k = data.domain().num_states;
  std::vector<double> counts(data.dims() * k, 0.0);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto row = data.x(n);
    for (std::size_t d = 0; d < row.size(); ++d) {
      counts[d * k + static_cast<std::size_t>(row[d])] += 1.0;
    }
  }
  return DiscretePrior::FromWeights(data.dims(), k, std::move(counts), floor);
}

}  // namespace spreadlearn
