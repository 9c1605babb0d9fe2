// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/mlp.hpp"

namespace basinscope {

/// Axis-aligned input-space rectangle.
struct Domain {
  double x_lo = -1.25;
  double x_hi = 1.25;
  double y_lo = -1.25;
  double y_hi = 1.25;

  void validate() const;
};

/// Predicted class per cell. Row 0 is the top (y_hi) edge so the grid maps
/// directly onto image rows.
struct ClassGrid {
  Domain domain;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<int> cells;

  int at(std::size_t row, std::size_t col) const { return cells[row * width + col]; }
  double cell_x(std::size_t col) const;
  double cell_y(std::size_t row) const;
  double cell_width() const { return (domain.x_hi - domain.x_lo) / static_cast<double>(width); }
  double cell_height() const { return (domain.y_hi - domain.y_lo) / static_cast<double>(height); }
  std::size_t count(int cls) const;
};

/// Argmax class at every cell center; both resolutions must be >= 2.
ClassGrid decision_boundary(const MlpArch& arch, const ParamVector& params,
                            const Domain& domain, std::size_t width,
                            std::size_t height);

/// row,col,x,y,class
std::string grid_csv(const ClassGrid& grid);

/// Binary P6 image: one pixel per cell in a fixed palette, with the given
/// points drawn as 3x3 dark markers in their label's color.
std::string render_ppm(const ClassGrid& grid,
                       std::span<const LabeledDataset* const> overlay);

struct MarginEstimate {
  /// Infinite when the grid holds a single class.
  double margin = 0.0;
  double cell_size = 0.0;
};

/// Smallest distance from a training point to the center of a grid cell
/// whose predicted class differs from the point's own prediction.
MarginEstimate margin_estimate(const MlpArch& arch, const ParamVector& params,
                               const LabeledDataset& train, const Domain& domain,
                               std::size_t resolution);
MarginEstimate margin_estimate(const ClassGrid& grid, const Matrix& points,
                               std::span<const int> predicted);

}  // namespace basinscope
