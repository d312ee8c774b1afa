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

#ifndef SPREADLEARN_DATASET_H_
#define SPREADLEARN_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spreadlearn/numeric.h"

namespace spreadlearn {

enum class FeatureKind { kContinuous, kDiscrete };

// Value domain shared by every feature of a dataset. Discrete features hold
// integer state indices 0..num_states-1 stored as doubles.
struct FeatureDomain {
  FeatureKind kind = FeatureKind::kContinuous;
  int num_states = 0;

  static FeatureDomain Continuous() { return {}; }
  static FeatureDomain Discrete(int k) { return {FeatureKind::kDiscrete, k}; }
  bool discrete() const { return kind == FeatureKind::kDiscrete; }
  bool operator==(const FeatureDomain&) const = default;
};

struct Provenance {
  bool corrupted = false;
  std::string channel_id;  // empty for clean data
  uint64_t seed = 0;

  static Provenance Clean() { return {}; }
  static Provenance Corrupted(std::string channel_id, uint64_t seed) {
    return {true, std::move(channel_id), seed};
  }
  bool operator==(const Provenance&) const = default;
};

// N records of (feature vector, binary class).
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Throws InvalidArgument if the label count differs from the row count, a
  // label is not 0/1, or a discrete value is not an integer state < K.
  LabeledDataset(Matrix features, std::vector<uint8_t> labels,
                 FeatureDomain domain, Provenance provenance);

  std::size_t size() const { return labels_.size(); }
  std::size_t dims() const { return features_.cols(); }
  const Matrix& features() const { return features_; }
  std::span<const double> x(std::size_t n) const { return features_.row(n); }
  std::span<const uint8_t> labels() const { return labels_; }
  int label(std::size_t n) const { return labels_[n]; }
  const FeatureDomain& domain() const { return domain_; }
  const Provenance& provenance() const { return provenance_; }

  // Same domain; new values and a corrupted provenance tag.
  LabeledDataset WithCorruption(Matrix features, std::vector<uint8_t> labels,
                                std::string channel_id, uint64_t seed) const;

  LabeledDataset Subset(std::span<const std::size_t> rows) const;

  // FNV-1a over labels and feature bytes; identifies a dataset realization.
  uint64_t ContentHash() const;

 private:
  Matrix features_;
  std::vector<uint8_t> labels_;
  FeatureDomain domain_;
  Provenance provenance_;
};

// Clean synthetic data from a known logistic model:
// x ~ N(mean, diag(variances)), c ~ Bernoulli(Sigmoid(theta0 . x)).
struct SyntheticSpec {
  std::size_t num_records = 0;
  std::size_t dims = 0;
  // Either one shared variance or one per dimension.
  std::vector<double> variances = {1.0};
  std::vector<double> mean;  // empty means zero
  std::vector<double> theta0;  // must have unit norm
  uint64_t seed = 0;
};

LabeledDataset GenerateSynthetic(const SyntheticSpec& spec);

// Unit vector along the first axis, or a seeded random direction.
std::vector<double> UnitDirection(std::size_t dims, std::optional<uint64_t> seed);

// MNIST-like discrete surrogate: side x side images with num_states pixel
// intensities. Each class has a smooth stroke prototype; pixels are noisy,
// quantized renderings of the prototype with most mass on background state 0.
struct SyntheticImageSpec {
  std::size_t per_class = 250;
  std::size_t side = 8;
  int num_states = 16;
  double pixel_noise = 0.25;   // stddev of intensity jitter, in [0,1] units
  double stroke_jitter = 0.6;  // stddev of per-image stroke offset, pixels
  uint64_t seed = 0;
};

LabeledDataset GenerateSyntheticImages(const SyntheticImageSpec& spec);

// Reads an IDX image/label pair (big-endian, magic 0x803 / 0x801), keeps the
// two requested digits (first -> class 0, second -> class 1) and, when
// per_class > 0, draws that many records of each class with the seed.
struct IdxRequest {
  std::filesystem::path images;
  std::filesystem::path labels;
  std::pair<int, int> classes = {7, 9};
  std::size_t per_class = 0;  // 0 keeps everything
  uint64_t seed = 0;
};

LabeledDataset LoadIdx(const IdxRequest& request);

// Writes an IDX pair (used for fixtures and round trips). Pixel values must be
// integers in [0,255]; labels are written as given digit values.
void WriteIdx(const std::filesystem::path& images,
              const std::filesystem::path& labels, std::size_t rows,
              std::size_t cols, std::span<const uint8_t> pixels,
              std::span<const uint8_t> digits);

// CSV: header "c,x0,...,x{D-1}", one record per line.
void WriteCsv(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset ReadCsv(const std::filesystem::path& path, FeatureDomain domain);

// Rescales discrete states to [0,1] (divide by K-1) and, optionally, subtracts
// the per-feature means of `reference` (rescaled the same way).
LabeledDataset ToContinuous(const LabeledDataset& data,
                            const LabeledDataset* center_reference);

// Balanced per-class draw without replacement.
std::vector<std::size_t> SampleBalanced(const LabeledDataset& data,
                                        std::size_t per_class, uint64_t seed);

}  // namespace spreadlearn

#endif  // SPREADLEARN_DATASET_H_
