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

#include <map>
#include <string>
#include <vector>

#include "airhia/geo.hpp"
#include "airhia/grid.hpp"
#include "airhia/ingest.hpp"
#include "airhia/types.hpp"

namespace airhia {

/// Time shares of the home–work exposure blend (8 h × 5 d × 45 w out of
/// 8760 h, as published).
inline constexpr double kHomeTimeShare = 0.794;
inline constexpr double kWorkTimeShare = 0.206;

/// NO2 at 298 K, sea level.
inline constexpr double kNo2UgM3PerPpbv = 1.88;

/// Per-unit concentrations at one analysis level. Keys are GeoId strings,
/// or decimal cell indices when level == Cell.
struct ExposureSurface {
    Pollutant pollutant = Pollutant::PM25;
    ConcentrationUnits units = ConcentrationUnits::UgM3;
    int year = 0;
    UnitLevel level = UnitLevel::Tract;
    std::map<std::string, double> values;
};

struct SurfaceBuild {
    ExposureSurface surface;
    std::vector<std::string> omitted_units;  // no valid overlap
};

/// Per-unit coverage-weighted means of the grid over the registry polygons.
/// Units with no valid overlap are omitted and tallied. Throws on an empty
/// registry or a crs_tag mismatch between grid and intent (callers supply
/// co-registered inputs).
SurfaceBuild build_surface(const Grid& grid, const UnitRegistry& registry,
                           Pollutant pollutant, ConcentrationUnits units,
                           int year, unsigned threads = 1);

/// Native-resolution surface: one entry per non-nodata cell, keyed by cell
/// index.
ExposureSurface surface_from_grid(const Grid& grid, Pollutant pollutant,
                                  ConcentrationUnits units, int year);

/// NO2 ppbv ↔ µg/m³ by the fixed 1.88 factor; PM2.5 exists only in µg/m³
/// and any other pairing throws std::invalid_argument("unit mismatch").
ExposureSurface convert_units(const ExposureSurface& surface,
                              ConcentrationUnits target);

struct WeightedMean {
    double value = 0.0;
    double total_weight = 0.0;
};

/// Σ C_h·p_h / Σ p_h. Weight keys must be a subset of surface keys and the
/// weight total positive ("no population" otherwise).
WeightedMean population_weighted_mean(
    const ExposureSurface& surface,
    const std::map<std::string, double>& weights);

struct WorkplaceComponent {
    std::map<std::string, double> values;   // home tract → W_h
    std::vector<std::string> omitted;       // home tracts with no workers
};

/// W_h = Σ_w OD(h,w)·C_w / Σ_w OD(h,w). The surface must be tract-level and
/// every OD tract present in it.
WorkplaceComponent workplace_component(const ExposureSurface& surface,
                                       const OdMatrix& od);

struct HomeWorkBuild {
    ExposureSurface surface;
    std::vector<std::string> omitted;  // tracts absent from the OD data
};

/// HW_h = 0.794·C_h + 0.206·W_h per home tract. Tracts without OD rows are
/// omitted from the result.
HomeWorkBuild home_work_surface(const ExposureSurface& surface,
                                const OdMatrix& od);

}  // namespace airhia
