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

#include "airhia/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "airhia/util.hpp"

namespace airhia {

namespace {

struct Center {
    double x;
    double y;
};

// Fixed urban centers as fractions of the domain side.
const std::array<Center, 3> kCenterFractions = {
    Center{0.28, 0.32}, Center{0.68, 0.58}, Center{0.47, 0.81}};

double gaussian_bump(double x, double y, const Center& c, double sigma) {
    const double dx = x - c.x;
    const double dy = y - c.y;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

std::string zero_padded(std::size_t value, int width) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%0*zu", width, value);
    return buffer;
}

Ring square_ring(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
}

std::string square_geometry_json(double x0, double y0, double x1, double y1) {
    nlohmann::ordered_json geometry;
    geometry["type"] = "Polygon";
    geometry["coordinates"] = nlohmann::ordered_json::array();
    nlohmann::ordered_json ring = nlohmann::ordered_json::array();
    for (const auto& [x, y] : std::array<std::pair<double, double>, 5>{
             {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}}) {
        ring.push_back({x, y});
    }
    geometry["coordinates"].push_back(ring);
    return geometry.dump();
}

}  // namespace

SyntheticState build_synthetic_state(const SynthOptions& options) {
    if (options.blocks_side % options.block_groups_side != 0 ||
        options.block_groups_side % options.tracts_side != 0 ||
        options.tracts_side % options.counties_side != 0) {
        throw std::invalid_argument("synthetic levels must nest evenly");
    }
    SyntheticState state;
    state.options = options;
    const double n = static_cast<double>(options.grid_n);
    state.layout.x_origin = 0.0;
    state.layout.y_origin = 0.0;
    state.layout.cell_dx = 1.0;
    state.layout.cell_dy = 1.0;
    state.layout.n_cols = options.grid_n;
    state.layout.n_rows = options.grid_n;
    state.layout.crs_tag = "synthetic-planar";

    std::array<Center, 3> centers;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        centers[i] = {kCenterFractions[i].x * n, kCenterFractions[i].y * n};
    }
    const double sigma_sharp = n / 30.0;  // hotspot pollutant
    const double sigma_wide = n / 16.0;   // population

    const int base_year = options.years.empty() ? 2000 : options.years.front();
    const auto cell_center = [&](std::size_t row, std::size_t col) {
        const Rect rect = state.layout.cell_rect(row, col);
        return Center{0.5 * (rect.xmin + rect.xmax), 0.5 * (rect.ymin + rect.ymax)};
    };

    for (const int year : options.years) {
        const double drift = static_cast<double>(year - base_year);
        Grid smooth;
        Grid hotspot;
        Grid population;
        smooth.layout = hotspot.layout = population.layout = state.layout;
        smooth.values.resize(state.layout.size());
        hotspot.values.resize(state.layout.size());
        population.values.resize(state.layout.size());
        for (std::size_t row = 0; row < state.layout.n_rows; ++row) {
            for (std::size_t col = 0; col < state.layout.n_cols; ++col) {
                const auto [x, y] = cell_center(row, col);
                const std::size_t i = state.layout.cell_index(row, col);
                // Regional field: broad gradient, no local structure.
                smooth.values[i] = (5.5 - 0.03 * drift) + 1.2 * (x / n) +
                                   0.8 * (y / n) +
                                   0.6 * std::sin(3.14159265358979 * x / n) *
                                       std::cos(3.14159265358979 * y / n);
                double peaks = 0.0;
                double pop = 0.0;
                for (const auto& c : centers) {
                    peaks += gaussian_bump(x, y, c, sigma_sharp);
                    pop += gaussian_bump(x, y, c, sigma_wide);
                }
                hotspot.values[i] = (1.2 - 0.02 * drift) + 22.0 * peaks;
                population.values[i] =
                    (2.0 + 420.0 * pop) * (1.0 + 0.01 * drift);
            }
        }
        state.smooth_field.emplace(year, std::move(smooth));
        state.hotspot_field.emplace(year, std::move(hotspot));
        state.population.emplace(year, std::move(population));
    }

    // Nested rectangular geographies.
    const auto build_level = [&](UnitLevel level, std::size_t side) {
        UnitRegistry registry;
        registry.level = level;
        registry.vintage = "2010";
        const double width = n / static_cast<double>(side);
        for (std::size_t iy = 0; iy < side; ++iy) {
            for (std::size_t ix = 0; ix < side; ++ix) {
                const double x0 = width * static_cast<double>(ix);
                const double y0 = width * static_cast<double>(iy);
                const double x1 = x0 + width;
                const double y1 = y0 + width;

                // County index and per-parent local indices derive from the
                // cell position, so the FIPS prefixes nest exactly.
                const std::size_t per_county = side / options.counties_side;
                const std::size_t cx = ix / per_county;
                const std::size_t cy = iy / per_county;
                std::string id = options.state_prefix +
                                 zero_padded(cy * options.counties_side + cx + 1, 3);
                if (level != UnitLevel::County) {
                    const std::size_t per_tract = side / options.tracts_side;
                    const std::size_t tx = ix / per_tract;
                    const std::size_t ty = iy / per_tract;
                    const std::size_t tracts_per_county =
                        options.tracts_side / options.counties_side;
                    const std::size_t local =
                        (ty % tracts_per_county) * tracts_per_county +
                        (tx % tracts_per_county) + 1;
                    id += zero_padded(local, 6);
                    if (level != UnitLevel::Tract) {
                        const std::size_t per_bg = side / options.block_groups_side;
                        const std::size_t gx = ix / per_bg;
                        const std::size_t gy = iy / per_bg;
                        const std::size_t bgs_per_tract =
                            options.block_groups_side / options.tracts_side;
                        const std::size_t bg_local =
                            (gy % bgs_per_tract) * bgs_per_tract +
                            (gx % bgs_per_tract) + 1;
                        id += std::to_string(bg_local);
                        if (level == UnitLevel::Block) {
                            const std::size_t blocks_per_bg =
                                options.blocks_side / options.block_groups_side;
                            const std::size_t block_local =
                                (iy % blocks_per_bg) * blocks_per_bg +
                                (ix % blocks_per_bg) + 1;
                            id += zero_padded(block_local, 3);
                        }
                    }
                }
                UnitRecord record;
                record.polygon = make_polygon(square_ring(x0, y0, x1, y1));
                record.geometry_json = square_geometry_json(x0, y0, x1, y1);
                registry.units.emplace(std::move(id), std::move(record));
            }
        }
        return registry;
    };
    state.geographies.emplace(UnitLevel::County,
                              build_level(UnitLevel::County, options.counties_side));
    state.geographies.emplace(UnitLevel::Tract,
                              build_level(UnitLevel::Tract, options.tracts_side));
    state.geographies.emplace(
        UnitLevel::BlockGroup,
        build_level(UnitLevel::BlockGroup, options.block_groups_side));
    state.geographies.emplace(UnitLevel::Block,
                              build_level(UnitLevel::Block, options.blocks_side));

    // Block populations by exact zonal sums of the population grid.
    const auto& blocks = state.geographies.at(UnitLevel::Block);
    std::map<std::string, CoverageVector> block_coverage;
    for (const auto& [id, record] : blocks.units) {
        block_coverage.emplace(id, compute_coverage(state.layout, record.polygon));
    }
    for (const auto& [year, grid] : state.population) {
        for (const auto& [id, coverage] : block_coverage) {
            state.block_population[id][year] = zonal_sum(grid, coverage);
        }
    }

    // Block-level mortality: race-specific baseline rates with mild spatial
    // variation, an All row equal to the race sum, and optionally a slice of
    // unknown-location rows.
    std::mt19937_64 rng(options.seed);
    const std::array<std::pair<Subgroup, double>, 3> rates = {
        std::pair{Subgroup::WhiteNH, 0.0048},
        std::pair{Subgroup::HispanicAll, 0.0021},
        std::pair{Subgroup::BlackNH, 0.0011},
    };
    for (const int year : options.years) {
        for (const auto& [id, coverage] : block_coverage) {
            const double pop = state.block_population.at(id).at(year);
            const Rect box = polygon_bbox(blocks.units.at(id).polygon);
            const double wiggle =
                1.0 + 0.25 * std::sin(0.13 * box.xmin) * std::cos(0.11 * box.ymin);
            long long all = 0;
            for (const auto& [subgroup, rate] : rates) {
                std::poisson_distribution<long long> draw(rate * wiggle * pop);
                const long long count = pop > 0.0 ? draw(rng) : 0;
                all += count;
                state.mortality.push_back({year, id, subgroup, count});
            }
            state.mortality.push_back({year, id, Subgroup::All, all});
        }
        if (options.unknown_location_share > 0.0) {
            const std::size_t rows = static_cast<std::size_t>(
                options.unknown_location_share *
                static_cast<double>(block_coverage.size() * 4));
            for (std::size_t i = 0; i < rows; ++i) {
                state.mortality.push_back({year, "", Subgroup::All, 2});
                ++state.unknown_location_rows;
            }
        }
    }

    // Commute flows: per home tract, 70% of workers stay, 30% commute to the
    // tract containing the nearest urban center.
    const auto& tracts = state.geographies.at(UnitLevel::Tract);
    const auto tract_of_point = [&](double x, double y) -> std::string {
        for (const auto& [id, record] : tracts.units) {
            const Rect box = polygon_bbox(record.polygon);
            if (x >= box.xmin && x < box.xmax && y >= box.ymin && y < box.ymax) {
                return id;
            }
        }
        return tracts.units.begin()->first;
    };
    std::array<std::string, 3> center_tracts;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        center_tracts[i] = tract_of_point(centers[i].x, centers[i].y);
    }
    for (const int year : options.years) {
        OdMatrix od;
        od.year = year;
        for (const auto& [id, record] : tracts.units) {
            const Rect box = polygon_bbox(record.polygon);
            const double cx = 0.5 * (box.xmin + box.xmax);
            const double cy = 0.5 * (box.ymin + box.ymax);
            double workers = 0.0;
            for (const auto& [block_id, series] : state.block_population) {
                if (block_id.compare(0, id.size(), id) == 0) {
                    workers += 0.4 * series.at(year);
                }
            }
            workers = std::floor(workers);
            if (workers <= 0.0) continue;
            std::size_t nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < centers.size(); ++i) {
                const double d = (centers[i].x - cx) * (centers[i].x - cx) +
                                 (centers[i].y - cy) * (centers[i].y - cy);
                if (d < best) {
                    best = d;
                    nearest = i;
                }
            }
            const double commute = std::floor(0.3 * workers);
            od.flows[{id, id}] += workers - commute;
            if (commute > 0.0) {
                od.flows[{id, center_tracts[nearest]}] += commute;
            }
        }
        state.od.emplace(year, std::move(od));
    }
    return state;
}

namespace {

void write_registry_geojson(const UnitRegistry& registry,
                            const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["vintage"] = registry.vintage;
    doc["features"] = nlohmann::ordered_json::array();
    for (const auto& [id, record] : registry.units) {
        nlohmann::ordered_json feature;
        feature["type"] = "Feature";
        feature["properties"] = {{"GEOID", id}};
        feature["geometry"] = nlohmann::ordered_json::parse(record.geometry_json);
        doc["features"].push_back(std::move(feature));
    }
    std::ofstream out(path);
    out << doc.dump() << '\n';
}

// First block id of a tract, used to emit block-level OD geocodes.
std::string first_block_of(const std::string& tract) { return tract + "1001"; }

}  // namespace

void write_synthetic_state(const SyntheticState& state, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path base = dir;
    fs::create_directories(base);

    for (const auto& [year, grid] : state.smooth_field) {
        std::ofstream out(base / ("pm25_" + std::to_string(year) + ".asc"));
        write_ascii_grid(grid, out);
    }
    for (const auto& [year, grid] : state.hotspot_field) {
        std::ofstream out(base / ("no2_" + std::to_string(year) + ".asc"));
        write_ascii_grid(grid, out);
    }
    for (const auto& [year, grid] : state.population) {
        std::ofstream out(base / ("pop_" + std::to_string(year) + ".asc"));
        write_ascii_grid(grid, out);
    }
    const std::map<UnitLevel, std::string> names = {
        {UnitLevel::Block, "blocks"},
        {UnitLevel::BlockGroup, "blockgroups"},
        {UnitLevel::Tract, "tracts"},
        {UnitLevel::County, "counties"},
    };
    for (const auto& [level, registry] : state.geographies) {
        write_registry_geojson(registry, base / (names.at(level) + ".geojson"));
    }
    {
        std::ofstream out(base / "mortality.csv");
        out << "year,geoid,race,count\n";
        for (const auto& record : state.mortality) {
            out << record.year << ',' << record.geoid << ','
                << to_string(record.subgroup) << ',' << record.count << '\n';
        }
    }
    {
        std::ofstream out(base / "population.csv");
        out << "geoid,year,population\n";
        for (const auto& [id, series] : state.block_population) {
            for (const auto& [year, value] : series) {
                out << id << ',' << year << ',' << format_double(value) << '\n';
            }
        }
    }
    for (const auto& [year, od] : state.od) {
        std::ofstream out(base / ("od_" + std::to_string(year) + ".csv"));
        out << "w_geocode,h_geocode,S000\n";
        for (const auto& [pair, workers] : od.flows) {
            out << first_block_of(pair.second) << ',' << first_block_of(pair.first)
                << ',' << format_double(workers) << '\n';
        }
    }

    // Ready-to-run configuration files.
    const auto input_block = [&](std::ostream& out, Pollutant pollutant) {
        const char* stem = pollutant == Pollutant::PM25 ? "pm25" : "no2";
        for (const auto& [year, grid] : state.smooth_field) {
            out << "inputs.grid." << year << " = \""
                << (base / (std::string(stem) + "_" + std::to_string(year) + ".asc")).string()
                << "\"\n";
        }
        for (const auto& [level, name] : names) {
            out << "inputs.geography." << to_string(level) << " = \""
                << (base / (name + ".geojson")).string() << "\"\n";
        }
        out << "inputs.mortality = \"" << (base / "mortality.csv").string() << "\"\n";
        out << "inputs.population = \"" << (base / "population.csv").string() << "\"\n";
        for (const auto& [year, grid] : state.population) {
            out << "inputs.population_grid." << year << " = \""
                << (base / ("pop_" + std::to_string(year) + ".asc")).string()
                << "\"\n";
        }
        for (const auto& [year, od] : state.od) {
            out << "inputs.od." << year << " = \""
                << (base / ("od_" + std::to_string(year) + ".csv")).string()
                << "\"\n";
        }
    };
    {
        std::ofstream out(base / "scenario.cfg");
        out << "scenario.pollutant = \"no2\"\n";
        out << "scenario.years = [";
        for (std::size_t i = 0; i < state.options.years.size(); ++i) {
            if (i > 0) out << ", ";
            out << state.options.years[i];
        }
        out << "]\n";
        out << "scenario.exposure_scale = \"tract\"\n";
        out << "scenario.bmc_scale = \"tract\"\n";
        out << "scenario.crf_mode = \"single\"\n";
        out << "scenario.exposure_metric = \"home\"\n";
        out << "scenario.subgroups = [\"all\"]\n";
        out << "scenario.state_prefix = \"" << state.options.state_prefix << "\"\n";
        input_block(out, Pollutant::NO2);
        out << "output.dir = \"" << (base / "out" / "scenario").string() << "\"\n";
        out << "output.geojson_field = \"deaths\"\n";
    }
    {
        std::ofstream out(base / "sweep.cfg");
        out << "scenario.pollutant = \"no2\"\n";
        out << "scenario.years = [";
        for (std::size_t i = 0; i < state.options.years.size(); ++i) {
            if (i > 0) out << ", ";
            out << state.options.years[i];
        }
        out << "]\n";
        out << "scenario.exposure_scale = \"tract\"\n";
        out << "scenario.bmc_scale = \"tract\"\n";
        out << "scenario.crf_mode = \"single\"\n";
        out << "scenario.exposure_metric = \"home\"\n";
        out << "scenario.subgroups = [\"all\"]\n";
        out << "scenario.state_prefix = \"" << state.options.state_prefix << "\"\n";
        input_block(out, Pollutant::NO2);
        out << "sweep.bmc_scales = [\"blockgroup\", \"tract\", \"county\"]\n";
        out << "sweep.exposure_scales = [\"same\", \"cell\"]\n";
        out << "sweep.crf_modes = [\"single\"]\n";
        out << "sweep.exposure_metrics = [\"home\"]\n";
        out << "output.dir = \"" << (base / "out" / "sweep").string() << "\"\n";
    }
}

}  // namespace airhia
