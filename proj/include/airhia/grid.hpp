// Copyright (c) 2026 airhia contributors.
// All rights reserved.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airhia/geometry.hpp"

namespace airhia {

/// Rectilinear cell layout. (x_origin, y_origin) is the lower-left corner of
/// the extent; rows are stored north to south, so row 0 is the top row.
/// Coordinates are treated as planar in whatever units the caller supplies;
/// crs_tag is compared for equality only, never interpreted.
struct GridLayout {
    double x_origin = 0.0;
    double y_origin = 0.0;
    double cell_dx = 1.0;
    double cell_dy = 1.0;
    std::size_t n_cols = 0;
    std::size_t n_rows = 0;
    std::string crs_tag;

    std::size_t size() const { return n_cols * n_rows; }
    double cell_area() const { return cell_dx * cell_dy; }

    Rect extent() const {
        return {x_origin, y_origin,
                x_origin + cell_dx * static_cast<double>(n_cols),
                y_origin + cell_dy * static_cast<double>(n_rows)};
    }

    Rect cell_rect(std::size_t row, std::size_t col) const {
        const double x0 = x_origin + cell_dx * static_cast<double>(col);
        const double y1 =
            y_origin + cell_dy * static_cast<double>(n_rows - row);
        return {x0, y1 - cell_dy, x0 + cell_dx, y1};
    }

    std::size_t cell_index(std::size_t row, std::size_t col) const {
        return row * n_cols + col;
    }

    bool same_layout(const GridLayout& other) const;
};

/// Raster of real values in row-major order (row 0 = northernmost). A cell
/// holds either a finite value or the nodata sentinel.
struct Grid {
    GridLayout layout;
    double nodata = -9999.0;
    std::vector<double> values;

    bool is_nodata(std::size_t index) const { return values[index] == nodata; }
    double at(std::size_t row, std::size_t col) const {
        return values[layout.cell_index(row, col)];
    }

    /// Throws std::invalid_argument when value count or layout is invalid.
    void validate() const;
};

struct CoverageEntry {
    std::size_t cell = 0;
    double fraction = 0.0;  // in (0, 1]
};

/// Exact coverage fractions of one polygon over one layout, ascending by
/// cell index. Cells the polygon does not overlap are absent.
using CoverageVector = std::vector<CoverageEntry>;

/// fraction(cell) = area(cell ∩ polygon) / area(cell) by exact rectangle
/// clipping. A polygon wholly outside the extent yields an empty vector;
/// a zero-area polygon throws std::invalid_argument("empty geometry").
CoverageVector compute_coverage(const GridLayout& layout,
                                const Polygon& polygon);

/// Coverage- and area-weighted mean over non-nodata cells. Returns nullopt
/// when the coverage is empty or every covered cell is nodata ("no valid
/// overlap").
std::optional<double> zonal_mean(const Grid& grid,
                                 const CoverageVector& coverage);

/// Coverage-weighted sum over non-nodata cells, for count-like rasters
/// (population). Nodata cells contribute zero.
double zonal_sum(const Grid& grid, const CoverageVector& coverage);

/// Reverse assignment: cell value = coverage-weighted mean of the values of
/// the units overlapping it; untouched cells become nodata. Throws
/// std::runtime_error("overlapping geometries") when the fraction sum for a
/// cell exceeds 1 + 1e-6.
Grid assign_to_cells(const GridLayout& layout,
                     const std::map<std::string, double>& unit_values,
                     const std::map<std::string, CoverageVector>& coverages,
                     double nodata = -9999.0);

}  // namespace airhia
