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

// IDX reader/writer (the MNIST distribution format).

#include <array>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include "spreadlearn/dataset.h"
#include "spreadlearn/error.h"

namespace spreadlearn {
namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

std::vector<unsigned char> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

uint32_t BigEndian32(const std::vector<unsigned char>& bytes, std::size_t at,
                     const std::filesystem::path& path) {
  if (bytes.size() < at + 4) {
    throw DataError(path.string() + ": truncated IDX header");
  }
  return (uint32_t{bytes[at]} << 24) | (uint32_t{bytes[at + 1]} << 16) |
         (uint32_t{bytes[at + 2]} << 8) | uint32_t{bytes[at + 3]};
}

void PutBigEndian32(std::ofstream& out, uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v >> 24),
                                 static_cast<char>(v >> 16),
                                 static_cast<char>(v >> 8),
                                 static_cast<char>(v)};
  out.write(b.data(), 4);
}

}  // namespace

LabeledDataset LoadIdx(const IdxRequest& request) {
  const auto images = ReadAll(request.images);
  const auto labels = ReadAll(request.labels);

  if (BigEndian32(images, 0, request.images) != kImagesMagic) {
    throw DataError(request.images.string() + ": bad IDX image magic");
  }
  if (BigEndian32(labels, 0, request.labels) != kLabelsMagic) {
    throw DataError(request.labels.string() + ": bad IDX label magic");
  }
  const std::size_t count = BigEndian32(images, 4, request.images);
  const std::size_t rows = BigEndian32(images, 8, request.images);
  const std::size_t cols = BigEndian32(images, 12, request.images);
  const std::size_t label_count = BigEndian32(labels, 4, request.labels);
  const std::size_t dims = rows * cols;
  if (images.size() < 16 + count * dims) {
    throw DataError(request.images.string() + ": truncated image data");
  }
  if (labels.size() < 8 + label_count) {
    throw DataError(request.labels.string() + ": truncated label data");
  }
  if (label_count != count) {
    throw DataError("IDX image and label counts differ");
  }

  const auto [first, second] = request.classes;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < count; ++i) {
    const int digit = labels[8 + i];
    if (digit == first || digit == second) keep.push_back(i);
  }
  Matrix features(keep.size(), dims);
  std::vector<uint8_t> classes(keep.size());
  bool seen_first = false, seen_second = false;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t i = keep[r];
    const unsigned char* pixels = images.data() + 16 + i * dims;
    auto row = features.row(r);
    for (std::size_t d = 0; d < dims; ++d) row[d] = pixels[d];
    const bool is_second = labels[8 + i] == second;
    classes[r] = is_second ? 1 : 0;
    (is_second ? seen_second : seen_first) = true;
  }
  if (!seen_first || !seen_second) {
    std::ostringstream msg;
    msg << "IDX data lacks digit " << (seen_first ? second : first);
    throw DataError(msg.str());
  }
  LabeledDataset all(std::move(features), std::move(classes),
                     FeatureDomain::Discrete(256), Provenance::Clean());
  if (request.per_class == 0) return all;
  const auto chosen = SampleBalanced(all, request.per_class, request.seed);
  return all.Subset(chosen);
}

void WriteIdx(const std::filesystem::path& images,
              const std::filesystem::path& labels, std::size_t rows,
              std::size_t cols, std::span<const uint8_t> pixels,
              std::span<const uint8_t> digits) {
  if (pixels.size() != digits.size() * rows * cols) {
    throw InvalidArgument("WriteIdx: pixel count does not match labels");
  }
  std::ofstream img(images, std::ios::binary);
  std::ofstream lab(labels, std::ios::binary);
  if (!img || !lab) throw DataError("cannot open IDX output files");
  PutBigEndian32(img, kImagesMagic);
  PutBigEndian32(img, static_cast<uint32_t>(digits.size()));
  PutBigEndian32(img, static_cast<uint32_t>(rows));
  PutBigEndian32(img, static_cast<uint32_t>(cols));
  img.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  PutBigEndian32(lab, kLabelsMagic);
  PutBigEndian32(lab, static_cast<uint32_t>(digits.size()));
  lab.write(reinterpret_cast<const char*>(digits.data()),
            static_cast<std::streamsize>(digits.size()));
}

}  // namespace spreadlearn
