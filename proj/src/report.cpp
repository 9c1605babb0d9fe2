// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "basinscope/error.hpp"
#include "basinscope/io.hpp"
#include "basinscope/objective.hpp"

namespace basinscope {

void Domain::validate() const {
  if (!std::isfinite(x_lo) || !std::isfinite(x_hi) || !std::isfinite(y_lo) ||
      !std::isfinite(y_hi) || !(x_lo < x_hi) || !(y_lo < y_hi)) {
    throw invalid_argument("domain must be a finite nonempty rectangle");
  }
}

double ClassGrid::cell_x(std::size_t col) const {
  return domain.x_lo + (static_cast<double>(col) + 0.5) * cell_width();
}

double ClassGrid::cell_y(std::size_t row) const {
  return domain.y_hi - (static_cast<double>(row) + 0.5) * cell_height();
}

std::size_t ClassGrid::count(int cls) const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), cls));
}

ClassGrid decision_boundary(const MlpArch& arch, const ParamVector& params,
                            const Domain& domain, std::size_t width,
                            std::size_t height) {
  domain.validate();
  if (width < 2 || height < 2) throw invalid_argument("grid resolution must be >= 2");
  if (arch.input_dim() != 2) throw invalid_argument("decision boundary needs 2-D inputs");
  ClassGrid grid{domain, width, height, {}};
  grid.cells.reserve(width * height);
  // One row of cells per forward pass keeps memory flat for large grids.
  Matrix row_inputs(width, 2);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      row_inputs(c, 0) = grid.cell_x(c);
      row_inputs(c, 1) = grid.cell_y(r);
    }
    const Matrix probs = forward(arch, params, row_inputs);
    for (std::size_t c = 0; c < width; ++c) grid.cells.push_back(argmax_class(probs.row(c)));
  }
  return grid;
}

std::string grid_csv(const ClassGrid& grid) {
  CsvWriter csv({"row", "col", "x", "y", "class"});
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) {
      csv.cell(std::uint64_t{r}).cell(std::uint64_t{c}).cell(grid.cell_x(c))
          .cell(grid.cell_y(r)).cell(static_cast<std::uint64_t>(grid.at(r, c)));
      csv.end_row();
    }
  }
  return csv.text();
}

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr std::array<Rgb, 2> kRegion = {{{158, 188, 236}, {238, 170, 160}}};
constexpr std::array<Rgb, 2> kMarker = {{{16, 40, 150}, {150, 16, 16}}};

Rgb color(std::span<const Rgb> palette, int cls) {
  return palette[static_cast<std::size_t>(cls) % palette.size()];
}

}  // namespace

std::string render_ppm(const ClassGrid& grid,
                       std::span<const LabeledDataset* const> overlay) {
  const std::size_t w = grid.width, h = grid.height;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + 3 * w * h);
  const auto paint = [&](std::size_t r, std::size_t c, const Rgb& rgb) {
    const std::size_t at = header + 3 * (r * w + c);
    for (std::size_t k = 0; k < 3; ++k) out[at + k] = static_cast<char>(rgb[k]);
  };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) paint(r, c, color(kRegion, grid.at(r, c)));
  }
  for (const LabeledDataset* ds : overlay) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const double fx = (ds->points(i, 0) - grid.domain.x_lo) / grid.cell_width();
      const double fy = (grid.domain.y_hi - ds->points(i, 1)) / grid.cell_height();
      if (!(fx >= 0.0 && fx < static_cast<double>(w) && fy >= 0.0 &&
            fy < static_cast<double>(h))) {
        continue;
      }
      const auto cx = static_cast<std::ptrdiff_t>(fx);
      const auto cy = static_cast<std::ptrdiff_t>(fy);
      for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
        for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
          const std::ptrdiff_t r = cy + dy, c = cx + dx;
          if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(h) ||
              c >= static_cast<std::ptrdiff_t>(w)) {
            continue;
          }
          paint(static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                color(kMarker, ds->labels[i]));
        }
      }
    }
  }
  return out;
}

MarginEstimate margin_estimate(const ClassGrid& grid, const Matrix& points,
                               std::span<const int> predicted) {
  if (points.rows() != predicted.size() || points.cols() != 2) {
    throw invalid_argument("margin needs one prediction per 2-D point");
  }
  MarginEstimate out{HUGE_VAL, std::max(grid.cell_width(), grid.cell_height())};
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const double px = points(i, 0), py = points(i, 1);
    double best = HUGE_VAL;
    for (std::size_t r = 0; r < grid.height; ++r) {
      const double dy = grid.cell_y(r) - py;
      if (dy * dy >= best) continue;
      for (std::size_t c = 0; c < grid.width; ++c) {
        if (grid.at(r, c) == predicted[i]) continue;
        const double dx = grid.cell_x(c) - px;
        best = std::min(best, dx * dx + dy * dy);
      }
    }
    out.margin = std::min(out.margin, std::sqrt(best));
  }
  return out;
}

MarginEstimate margin_estimate(const MlpArch& arch, const ParamVector& params,
                               const LabeledDataset& train, const Domain& domain,
                               std::size_t resolution) {
  const ClassGrid grid = decision_boundary(arch, params, domain, resolution, resolution);
  const std::vector<int> predicted = predict(arch, params, train.to_batch().inputs);
  return margin_estimate(grid, train.points, predicted);
}

}  // namespace basinscope
