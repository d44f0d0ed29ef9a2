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

#include "airhia/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace airhia {

bool GridLayout::same_layout(const GridLayout& other) const {
    return x_origin == other.x_origin && y_origin == other.y_origin &&
           cell_dx == other.cell_dx && cell_dy == other.cell_dy &&
           n_cols == other.n_cols && n_rows == other.n_rows &&
           crs_tag == other.crs_tag;
}

void Grid::validate() const {
    if (layout.cell_dx <= 0.0 || layout.cell_dy <= 0.0) {
        throw std::invalid_argument("cell size must be positive");
    }
    if (values.size() != layout.size()) {
        throw std::invalid_argument("value count does not match layout");
    }
    for (const double v : values) {
        if (v != nodata && !std::isfinite(v)) {
            throw std::invalid_argument("cell value is not finite");
        }
    }
}

CoverageVector compute_coverage(const GridLayout& layout,
                                const Polygon& polygon) {
    validate_polygon(polygon);
    if (polygon_area(polygon) == 0.0) {
        throw std::invalid_argument("empty geometry");
    }
    CoverageVector coverage;
    if (layout.n_cols == 0 || layout.n_rows == 0) return coverage;

    const Rect bbox = polygon_bbox(polygon);
    if (!bbox.intersects(layout.extent())) return coverage;

    // Candidate cell window from the bounding box.
    const auto col_of = [&](double x) {
        return std::floor((x - layout.x_origin) / layout.cell_dx);
    };
    const auto band_of = [&](double y) {
        return std::floor((y - layout.y_origin) / layout.cell_dy);
    };
    const auto clamp_idx = [](double v, std::size_t n) {
        if (v < 0.0) return std::size_t{0};
        if (v >= static_cast<double>(n)) return n - 1;
        return static_cast<std::size_t>(v);
    };
    const std::size_t col0 = clamp_idx(col_of(bbox.xmin), layout.n_cols);
    const std::size_t col1 = clamp_idx(col_of(bbox.xmax), layout.n_cols);
    // Bands count from the south; convert to north-first rows.
    const std::size_t band0 = clamp_idx(band_of(bbox.ymin), layout.n_rows);
    const std::size_t band1 = clamp_idx(band_of(bbox.ymax), layout.n_rows);
    const std::size_t row0 = layout.n_rows - 1 - band1;
    const std::size_t row1 = layout.n_rows - 1 - band0;

    std::vector<Rect> ring_boxes;
    ring_boxes.reserve(polygon.rings.size());
    for (const auto& ring : polygon.rings) {
        Polygon single;
        single.rings.push_back(ring);
        ring_boxes.push_back(polygon_bbox(single));
    }

    const double cell_area = layout.cell_area();
    for (std::size_t row = row0; row <= row1; ++row) {
        for (std::size_t col = col0; col <= col1; ++col) {
            const Rect cell = layout.cell_rect(row, col);
            double area = 0.0;
            for (std::size_t r = 0; r < polygon.rings.size(); ++r) {
                if (!ring_boxes[r].intersects(cell)) continue;
                area += clipped_ring_area(polygon.rings[r], cell);
            }
            if (area <= 0.0) continue;
            const double fraction = std::min(area / cell_area, 1.0);
            coverage.push_back({layout.cell_index(row, col), fraction});
        }
    }
    return coverage;
}

std::optional<double> zonal_mean(const Grid& grid,
                                 const CoverageVector& coverage) {
    double numerator = 0.0;
    double denominator = 0.0;
    double vmin = 0.0;
    double vmax = 0.0;
    bool any = false;
    for (const auto& entry : coverage) {
        if (grid.is_nodata(entry.cell)) continue;
        const double value = grid.values[entry.cell];
        numerator += entry.fraction * value;
        denominator += entry.fraction;
        vmin = any ? std::min(vmin, value) : value;
        vmax = any ? std::max(vmax, value) : value;
        any = true;
    }
    if (!any || denominator <= 0.0) return std::nullopt;  // no valid overlap
    return std::clamp(numerator / denominator, vmin, vmax);
}

double zonal_sum(const Grid& grid, const CoverageVector& coverage) {
    double total = 0.0;
    for (const auto& entry : coverage) {
        if (grid.is_nodata(entry.cell)) continue;
        total += entry.fraction * grid.values[entry.cell];
    }
    return total;
}

Grid assign_to_cells(const GridLayout& layout,
                     const std::map<std::string, double>& unit_values,
                     const std::map<std::string, CoverageVector>& coverages,
                     double nodata) {
    std::vector<double> numerator(layout.size(), 0.0);
    std::vector<double> denominator(layout.size(), 0.0);
    for (const auto& [unit, value] : unit_values) {
        const auto found = coverages.find(unit);
        if (found == coverages.end()) {
            throw std::invalid_argument("missing coverage for unit " + unit);
        }
        for (const auto& entry : found->second) {
            if (entry.cell >= layout.size()) {
                throw std::invalid_argument("coverage cell out of bounds");
            }
            numerator[entry.cell] += entry.fraction * value;
            denominator[entry.cell] += entry.fraction;
        }
    }
    Grid out;
    out.layout = layout;
    out.nodata = nodata;
    out.values.resize(layout.size(), nodata);
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (denominator[i] > 1.0 + 1e-6) {
            throw std::runtime_error("overlapping geometries");
        }
        if (denominator[i] > 0.0) out.values[i] = numerator[i] / denominator[i];
    }
    return out;
}

}  // namespace airhia
