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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "airhia/geo.hpp"
#include "airhia/grid.hpp"
#include "airhia/ingest.hpp"
#include "airhia/types.hpp"

namespace airhia {

/// Deterministic synthetic test state: a square grid, a perfectly nested
/// block → block-group → tract → county geography, a smooth regional
/// pollutant field, a high-variance pollutant field co-located with the
/// population hotspots, anchored population grids, block-level mortality,
/// and commute flows.
struct SynthOptions {
    std::uint64_t seed = 42;
    std::vector<int> years = {2000, 2005};
    std::size_t grid_n = 100;            // grid_n × grid_n cells
    std::size_t counties_side = 2;       // counties_side² counties
    std::size_t tracts_side = 8;
    std::size_t block_groups_side = 16;
    std::size_t blocks_side = 32;
    std::string state_prefix = "08";
    double unknown_location_share = 0.0;  // share of mortality rows w/o geoid
};

struct SyntheticState {
    SynthOptions options;
    GridLayout layout;
    std::map<int, Grid> smooth_field;   // PM2.5-like, µg/m³
    std::map<int, Grid> hotspot_field;  // NO2-like, ppbv
    std::map<int, Grid> population;     // anchor grids
    std::map<UnitLevel, UnitRegistry> geographies;
    std::vector<MortalityRecord> mortality;       // block-level, with All rows
    std::size_t unknown_location_rows = 0;
    std::map<std::string, PopulationSeries> block_population;
    std::map<int, OdMatrix> od;
};

SyntheticState build_synthetic_state(const SynthOptions& options);

/// Writes grids, GeoJSON geographies, mortality/population/OD CSVs, and two
/// ready-to-run configuration files (a single scenario and a sweep) into
/// `dir`.
void write_synthetic_state(const SyntheticState& state, const std::string& dir);

}  // namespace airhia
