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

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "airhia/geo.hpp"
#include "airhia/grid.hpp"
#include "airhia/types.hpp"

namespace airhia {

// --- ESRI ASCII grid ---------------------------------------------------
//
// Header keys ncols, nrows, xllcorner, yllcorner, cellsize and optional
// NODATA_value (case-insensitive, whitespace-separated), followed by
// n_rows × n_cols values with the first data row northernmost. A missing
// NODATA header defaults the sentinel to -9999.

Grid read_ascii_grid(std::istream& in);

/// Writes values with shortest round-trip formatting so that
/// read(write(read(f))) is bit-identical to read(f).
void write_ascii_grid(const Grid& grid, std::ostream& out);

// --- GeoJSON -----------------------------------------------------------

/// FeatureCollection with a `GEOID` property per feature and
/// Polygon/MultiPolygon geometry; MultiPolygon parts become independent
/// exterior rings of one unit polygon. Numeric extra properties are kept as
/// unit attributes. An optional top-level "vintage" member tags the
/// registry. Features without GEOID are rejected with a diagnostic; a GEOID
/// whose length does not match `level` or a duplicate GEOID is an error.
UnitRegistry read_geojson_units(std::istream& in, UnitLevel level,
                                std::vector<std::string>* diagnostics = nullptr);

// --- Mortality CSV -----------------------------------------------------

struct MortalityRecord {
    int year = 0;
    std::string geoid;  // block-level
    Subgroup subgroup = Subgroup::Unknown;
    long long count = 0;
};

struct SubgroupTally {
    std::size_t kept = 0;
    std::size_t excluded = 0;
};

/// Rows with an empty geoid (unknown location of death) are excluded from
/// `records` but tallied here; kept + excluded + rejected == input_rows.
struct MortalityIngest {
    std::vector<MortalityRecord> records;
    std::size_t input_rows = 0;
    std::size_t kept = 0;
    std::size_t excluded_unknown_location = 0;
    std::size_t rejected = 0;
    double excluded_share_pct = 0.0;
    std::map<Subgroup, SubgroupTally> by_subgroup;
    std::vector<std::string> diagnostics;  // rejected rows
    std::vector<std::string> warnings;     // unknown race labels
};

/// Columns: year,geoid,race,count. Negative counts reject the row; unknown
/// race labels degrade to Subgroup::Unknown with a warning.
MortalityIngest read_mortality_csv(std::istream& in);

// --- Population --------------------------------------------------------

/// Anchor year → population. Anchors strictly increasing, values >= 0.
using PopulationSeries = std::map<int, double>;

/// Exact at anchors, linear between adjacent anchors. Throws
/// std::out_of_range("extrapolation not supported") outside the anchor span.
double interpolate_population(const PopulationSeries& series, int year);

/// Columns: geoid,year,population.
std::map<std::string, PopulationSeries> read_population_csv(std::istream& in);

// --- LODES origin–destination -------------------------------------------

struct OdMatrix {
    int year = 0;
    // (home tract, work tract) → workers
    std::map<std::pair<std::string, std::string>, double> flows;
    std::size_t dropped_out_of_state = 0;
    std::vector<std::string> rejected;
};

/// Columns: w_geocode,h_geocode,S000[,...] with 15-digit block geocodes.
/// Rows whose geocodes are not all in `state_prefix` are dropped (tallied);
/// block pairs are truncated to tract pairs and S000 summed.
OdMatrix read_lodes_od(std::istream& in, std::string_view state_prefix);

// --- Source comparison ---------------------------------------------------

struct SourceComparison {
    std::size_t n = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of b on a over the key intersection;
/// r_squared is the squared Pearson correlation. Throws on fewer than two
/// shared keys or zero variance in a ("degenerate regressor").
SourceComparison compare_sources(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b);

}  // namespace airhia
