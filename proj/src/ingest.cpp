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

#include "airhia/ingest.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "airhia/util.hpp"

namespace airhia {

namespace {

std::optional<double> parse_number(std::string_view token) {
    const std::string_view t = trim(token);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
    if (result.ec != std::errc{} || result.ptr != t.data() + t.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view token) {
    const std::string_view t = trim(token);
    if (t.empty()) return std::nullopt;
    long long value = 0;
    const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
    if (result.ec != std::errc{} || result.ptr != t.data() + t.size()) {
        return std::nullopt;
    }
    return value;
}

// Reads one CSV header line and checks the leading column names.
void expect_header(std::istream& in, const std::vector<std::string>& columns,
                   const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(std::string(what) + ": missing header");
    }
    const auto fields = split(trim(line), ',');
    if (fields.size() < columns.size()) {
        throw std::runtime_error(std::string(what) + ": malformed header");
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (!iequals(trim(fields[i]), columns[i])) {
            throw std::runtime_error(std::string(what) +
                                     ": expected column '" + columns[i] +
                                     "', found '" + std::string(trim(fields[i])) + "'");
        }
    }
}

}  // namespace

// --- ESRI ASCII grid -----------------------------------------------------

Grid read_ascii_grid(std::istream& in) {
    Grid grid;
    long long n_cols = -1;
    long long n_rows = -1;
    double xll = 0.0;
    double yll = 0.0;
    double cellsize = 1.0;
    double nodata = -9999.0;
    bool saw_xll = false;
    bool saw_yll = false;
    bool saw_cellsize = false;

    std::string token;
    // Header entries are key/value token pairs; the first numeric-looking
    // token starts the data block.
    while (in >> token) {
        const std::string key = to_lower(token);
        if (key == "ncols" || key == "nrows" || key == "xllcorner" ||
            key == "yllcorner" || key == "cellsize" || key == "nodata_value") {
            std::string value_token;
            if (!(in >> value_token)) {
                throw std::runtime_error("truncated grid");
            }
            const auto value = parse_number(value_token);
            if (!value.has_value()) {
                throw std::runtime_error("parse error in header " + key);
            }
            if (key == "ncols") n_cols = static_cast<long long>(*value);
            else if (key == "nrows") n_rows = static_cast<long long>(*value);
            else if (key == "xllcorner") { xll = *value; saw_xll = true; }
            else if (key == "yllcorner") { yll = *value; saw_yll = true; }
            else if (key == "cellsize") { cellsize = *value; saw_cellsize = true; }
            else nodata = *value;
        } else {
            break;  // first data token
        }
    }
    if (n_cols <= 0 || n_rows <= 0 || !saw_xll || !saw_yll || !saw_cellsize) {
        throw std::runtime_error("incomplete ascii grid header");
    }
    if (cellsize <= 0.0) {
        throw std::runtime_error("cellsize must be positive");
    }

    grid.layout.x_origin = xll;
    grid.layout.y_origin = yll;
    grid.layout.cell_dx = cellsize;
    grid.layout.cell_dy = cellsize;
    grid.layout.n_cols = static_cast<std::size_t>(n_cols);
    grid.layout.n_rows = static_cast<std::size_t>(n_rows);
    grid.nodata = nodata;

    const std::size_t expected = grid.layout.size();
    grid.values.reserve(expected);
    std::size_t count = 0;
    while (count < expected) {
        if (count > 0 || token.empty()) {
            if (!(in >> token)) break;
        }
        const auto value = parse_number(token);
        if (!value.has_value()) {
            const std::size_t row = count / grid.layout.n_cols;
            const std::size_t col = count % grid.layout.n_cols;
            throw std::runtime_error("parse error at row " +
                                     std::to_string(row + 1) + ", col " +
                                     std::to_string(col + 1));
        }
        if (*value != nodata && !std::isfinite(*value)) {
            const std::size_t row = count / grid.layout.n_cols;
            const std::size_t col = count % grid.layout.n_cols;
            throw std::runtime_error("parse error at row " +
                                     std::to_string(row + 1) + ", col " +
                                     std::to_string(col + 1));
        }
        grid.values.push_back(*value);
        ++count;
        token.clear();
    }
    if (count != expected) {
        throw std::runtime_error("truncated grid");
    }
    return grid;
}

void write_ascii_grid(const Grid& grid, std::ostream& out) {
    out << "ncols " << grid.layout.n_cols << '\n';
    out << "nrows " << grid.layout.n_rows << '\n';
    out << "xllcorner " << format_double(grid.layout.x_origin) << '\n';
    out << "yllcorner " << format_double(grid.layout.y_origin) << '\n';
    out << "cellsize " << format_double(grid.layout.cell_dx) << '\n';
    out << "NODATA_value " << format_double(grid.nodata) << '\n';
    for (std::size_t row = 0; row < grid.layout.n_rows; ++row) {
        for (std::size_t col = 0; col < grid.layout.n_cols; ++col) {
            if (col > 0) out << ' ';
            out << format_double(grid.at(row, col));
        }
        out << '\n';
    }
}

// --- GeoJSON ---------------------------------------------------------------

namespace {

Ring ring_from_json(const nlohmann::json& coordinates) {
    Ring ring;
    ring.reserve(coordinates.size());
    for (const auto& pair : coordinates) {
        if (!pair.is_array() || pair.size() < 2) {
            throw std::runtime_error("malformed ring coordinate");
        }
        ring.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return ring;
}

Polygon polygon_from_geometry(const nlohmann::json& geometry) {
    const std::string type = geometry.at("type").get<std::string>();
    Polygon polygon;
    if (type == "Polygon") {
        const auto& rings = geometry.at("coordinates");
        if (rings.empty()) throw std::runtime_error("polygon without rings");
        Ring exterior = ring_from_json(rings[0]);
        std::vector<Ring> holes;
        for (std::size_t i = 1; i < rings.size(); ++i) {
            holes.push_back(ring_from_json(rings[i]));
        }
        polygon = make_polygon(std::move(exterior), std::move(holes));
    } else if (type == "MultiPolygon") {
        for (const auto& part : geometry.at("coordinates")) {
            if (part.empty()) throw std::runtime_error("polygon without rings");
            Ring exterior = ring_from_json(part[0]);
            std::vector<Ring> holes;
            for (std::size_t i = 1; i < part.size(); ++i) {
                holes.push_back(ring_from_json(part[i]));
            }
            add_polygon_part(polygon, std::move(exterior), std::move(holes));
        }
    } else {
        throw std::runtime_error("unsupported geometry type " + type);
    }
    return polygon;
}

}  // namespace

UnitRegistry read_geojson_units(std::istream& in, UnitLevel level,
                                std::vector<std::string>* diagnostics) {
    const auto expected_length = level_digit_length(level);
    if (!expected_length.has_value()) {
        throw std::invalid_argument("cell level has no unit geography");
    }
    nlohmann::json doc;
    in >> doc;
    if (doc.value("type", "") != "FeatureCollection") {
        throw std::runtime_error("expected a FeatureCollection");
    }
    UnitRegistry registry;
    registry.level = level;
    registry.vintage = doc.value("vintage", "");
    for (const auto& feature : doc.at("features")) {
        const auto& properties = feature.value("properties", nlohmann::json::object());
        if (!properties.contains("GEOID")) {
            if (diagnostics) diagnostics->push_back("feature without GEOID rejected");
            continue;
        }
        std::string geoid = properties.at("GEOID").is_string()
                                ? properties.at("GEOID").get<std::string>()
                                : properties.at("GEOID").dump();
        if (geoid.size() != *expected_length || !all_digits(geoid)) {
            throw std::runtime_error("GEOID '" + geoid +
                                     "' does not match level " +
                                     std::string(to_string(level)));
        }
        if (registry.units.count(geoid) != 0) {
            throw std::runtime_error("duplicate unit " + geoid);
        }
        UnitRecord record;
        record.polygon = polygon_from_geometry(feature.at("geometry"));
        validate_polygon(record.polygon);
        record.geometry_json = feature.at("geometry").dump();
        for (const auto& [key, value] : properties.items()) {
            if (key == "GEOID") continue;
            if (value.is_number()) {
                if (key == "POPULATION") {
                    record.population = value.get<double>();
                } else {
                    record.attrs[key] = value.get<double>();
                }
            }
        }
        registry.units.emplace(std::move(geoid), std::move(record));
    }
    return registry;
}

// --- Mortality CSV ----------------------------------------------------------

MortalityIngest read_mortality_csv(std::istream& in) {
    expect_header(in, {"year", "geoid", "race", "count"}, "mortality csv");
    MortalityIngest ingest;
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        ++ingest.input_rows;
        const auto fields = split(line, ',');
        if (fields.size() < 4) {
            ++ingest.rejected;
            ingest.diagnostics.push_back("line " + std::to_string(line_number) +
                                         ": expected 4 fields");
            continue;
        }
        const auto year = parse_integer(fields[0]);
        const auto count = parse_integer(fields[3]);
        if (!year.has_value() || !count.has_value()) {
            ++ingest.rejected;
            ingest.diagnostics.push_back("line " + std::to_string(line_number) +
                                         ": unparseable year or count");
            continue;
        }
        if (*count < 0) {
            ++ingest.rejected;
            ingest.diagnostics.push_back("line " + std::to_string(line_number) +
                                         ": negative count");
            continue;
        }
        bool recognized = true;
        const Subgroup subgroup = parse_subgroup(fields[2], &recognized);
        if (!recognized) {
            ingest.warnings.push_back("line " + std::to_string(line_number) +
                                      ": unknown race label '" +
                                      std::string(trim(fields[2])) +
                                      "' mapped to unknown");
        }
        const std::string geoid(trim(fields[1]));
        if (geoid.empty()) {
            // Unknown location of death: excluded, tallied.
            ++ingest.excluded_unknown_location;
            ++ingest.by_subgroup[subgroup].excluded;
            continue;
        }
        ++ingest.kept;
        ++ingest.by_subgroup[subgroup].kept;
        ingest.records.push_back({static_cast<int>(*year), geoid, subgroup, *count});
    }
    ingest.excluded_share_pct =
        ingest.input_rows == 0
            ? 0.0
            : 100.0 * static_cast<double>(ingest.excluded_unknown_location) /
                  static_cast<double>(ingest.input_rows);
    return ingest;
}

// --- Population --------------------------------------------------------------

double interpolate_population(const PopulationSeries& series, int year) {
    if (series.empty()) {
        throw std::invalid_argument("population series is empty");
    }
    if (year < series.begin()->first || year > series.rbegin()->first) {
        throw std::out_of_range("extrapolation not supported");
    }
    const auto upper = series.lower_bound(year);
    if (upper->first == year) return upper->second;
    const auto lower = std::prev(upper);
    const double span = static_cast<double>(upper->first - lower->first);
    const double t = static_cast<double>(year - lower->first) / span;
    return lower->second + t * (upper->second - lower->second);
}

std::map<std::string, PopulationSeries> read_population_csv(std::istream& in) {
    expect_header(in, {"geoid", "year", "population"}, "population csv");
    std::map<std::string, PopulationSeries> series;
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 3) {
            throw std::runtime_error("population csv line " +
                                     std::to_string(line_number) +
                                     ": expected 3 fields");
        }
        const auto year = parse_integer(fields[1]);
        const auto population = parse_number(fields[2]);
        if (!year.has_value() || !population.has_value() || *population < 0.0) {
            throw std::runtime_error("population csv line " +
                                     std::to_string(line_number) +
                                     ": unparseable row");
        }
        series[std::string(trim(fields[0]))][static_cast<int>(*year)] = *population;
    }
    return series;
}

// --- LODES origin–destination -------------------------------------------------

OdMatrix read_lodes_od(std::istream& in, std::string_view state_prefix) {
    expect_header(in, {"w_geocode", "h_geocode", "S000"}, "lodes od csv");
    OdMatrix od;
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 3) {
            od.rejected.push_back("line " + std::to_string(line_number) +
                                  ": expected at least 3 fields");
            continue;
        }
        const std::string work(trim(fields[0]));
        const std::string home(trim(fields[1]));
        if (work.size() != 15 || home.size() != 15 || !all_digits(work) ||
            !all_digits(home)) {
            od.rejected.push_back("line " + std::to_string(line_number) +
                                  ": geocode is not a 15-digit block id");
            continue;
        }
        const auto jobs = parse_number(fields[2]);
        if (!jobs.has_value() || *jobs < 0.0) {
            od.rejected.push_back("line " + std::to_string(line_number) +
                                  ": unparseable S000");
            continue;
        }
        if (work.compare(0, state_prefix.size(), state_prefix) != 0 ||
            home.compare(0, state_prefix.size(), state_prefix) != 0) {
            ++od.dropped_out_of_state;
            continue;
        }
        od.flows[{home.substr(0, 11), work.substr(0, 11)}] += *jobs;
    }
    return od;
}

// --- Source comparison ----------------------------------------------------------

SourceComparison compare_sources(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b) {
    std::vector<std::pair<double, double>> points;
    for (const auto& [key, value_a] : a) {
        const auto found = b.find(key);
        if (found != b.end()) points.emplace_back(value_a, found->second);
    }
    if (points.size() < 2) {
        throw std::invalid_argument("fewer than 2 shared keys");
    }
    const double n = static_cast<double>(points.size());
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (const auto& [x, y] : points) {
        mean_a += x;
        mean_b += y;
    }
    mean_a /= n;
    mean_b /= n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_a) * (x - mean_a);
        syy += (y - mean_b) * (y - mean_b);
        sxy += (x - mean_a) * (y - mean_b);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("degenerate regressor");
    }
    SourceComparison cmp;
    cmp.n = points.size();
    cmp.slope = sxy / sxx;
    cmp.intercept = mean_b - cmp.slope * mean_a;
    // Constant b: the horizontal fit is exact, define r² = 1.
    cmp.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return cmp;
}

}  // namespace airhia
