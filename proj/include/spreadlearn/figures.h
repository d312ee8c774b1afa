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

// Plain SVG output for the experiment and analysis results.

#ifndef SPREADLEARN_FIGURES_H_
#define SPREADLEARN_FIGURES_H_

#include <filesystem>
#include <string>
#include <vector>

#include "spreadlearn/baselines.h"
#include "spreadlearn/dataset.h"
#include "spreadlearn/experiments.h"

namespace spreadlearn {

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

// [min, max] widened by `margin` of the span on each side (a zero span is
// widened by `margin` in absolute terms).
AxisRange PaddedRange(const std::vector<double>& values, double margin = 0.05);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y, err;  // err may be empty
};

struct LinePlot {
  std::string title, x_label, y_label;
  std::vector<PlotSeries> series;  // drawn and listed in this order
  AxisRange x_range, y_range;
};

// Series in arm order, one point per p_f with successful runs; mean test
// accuracy with across-repetition standard deviation. Arms without any
// successful row are dropped and named in `warnings`. Throws InvalidArgument
// if nothing is left to plot.
LinePlot AccuracyPlot(const ExperimentReport& report,
                      const std::vector<Arm>& arms,
                      const std::vector<double>& p_flips,
                      std::vector<std::string>* warnings);

std::string RenderSvg(const LinePlot& plot);

// One panel per curve: argmax theta against theta0, with the identity line.
std::string RenderReconPanels(const std::vector<ReconstructionCurve>& curves);

struct ImageRow {
  std::string label;
  const LabeledDataset* data;
  std::vector<std::size_t> records;
};

// Each record drawn as a side x side grey raster. Discrete values are scaled
// by 1/(K-1); continuous values are clamped to [lo, hi].
std::string RenderImageGrid(const std::vector<ImageRow>& rows, std::size_t side,
                            double lo = 0.0, double hi = 1.0);

void WriteText(const std::string& text, const std::filesystem::path& path);

}  // namespace spreadlearn

#endif  // SPREADLEARN_FIGURES_H_
