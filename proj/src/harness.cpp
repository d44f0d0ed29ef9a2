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

#include "airhia/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "airhia/ingest.hpp"
#include "airhia/parallel.hpp"
#include "airhia/util.hpp"

namespace airhia {

namespace {

std::string unquote(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
        return std::string(t.substr(1, t.size() - 2));
    }
    return std::string(t);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return in;
}

std::optional<double> to_number(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
    if (result.ec != std::errc{} || result.ptr != t.data() + t.size()) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

// --- ConfigFile -----------------------------------------------------------

ConfigFile ConfigFile::parse(std::istream& in) {
    ConfigFile config;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": expected key = value");
        }
        const std::string key(trim(stripped.substr(0, eq)));
        const std::string value(trim(stripped.substr(eq + 1)));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": empty key");
        }
        config.entries_[key] = value;
    }
    return config;
}

ConfigFile ConfigFile::load(const std::string& path) {
    auto in = open_input(path);
    return parse(in);
}

bool ConfigFile::has(const std::string& key) const {
    return entries_.count(key) != 0;
}

std::string ConfigFile::require_string(const std::string& key) const {
    const auto found = entries_.find(key);
    if (found == entries_.end()) {
        throw std::runtime_error("missing config key " + key);
    }
    return unquote(found->second);
}

std::optional<std::string> ConfigFile::get_string(const std::string& key) const {
    const auto found = entries_.find(key);
    if (found == entries_.end()) return std::nullopt;
    return unquote(found->second);
}

std::optional<double> ConfigFile::get_number(const std::string& key) const {
    const auto found = entries_.find(key);
    if (found == entries_.end()) return std::nullopt;
    const auto value = to_number(found->second);
    if (!value.has_value()) {
        throw std::runtime_error("config key " + key + " is not a number");
    }
    return value;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    const auto found = entries_.find(key);
    if (found == entries_.end()) return fallback;
    const std::string v = to_lower(unquote(found->second));
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw std::runtime_error("config key " + key + " is not a boolean");
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
    const auto found = entries_.find(key);
    if (found == entries_.end()) return {};
    std::string_view raw = trim(found->second);
    if (!raw.empty() && raw.front() == '[' && raw.back() == ']') {
        raw = raw.substr(1, raw.size() - 2);
    }
    std::vector<std::string> items;
    for (const auto& piece : split(raw, ',')) {
        const std::string item = unquote(piece);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<int> ConfigFile::get_int_list(const std::string& key) const {
    std::vector<int> values;
    for (const auto& item : get_list(key)) {
        const auto value = to_number(item);
        if (!value.has_value()) {
            throw std::runtime_error("config key " + key +
                                     " holds a non-integer item '" + item + "'");
        }
        values.push_back(static_cast<int>(*value));
    }
    return values;
}

std::map<std::string, std::string> ConfigFile::with_prefix(
    const std::string& prefix) const {
    std::map<std::string, std::string> out;
    const std::string full = prefix + ".";
    for (const auto& [key, value] : entries_) {
        if (key.size() > full.size() && key.compare(0, full.size(), full) == 0) {
            out.emplace(key.substr(full.size()), unquote(value));
        }
    }
    return out;
}

// --- ScenarioConfig ---------------------------------------------------------

ScenarioConfig ScenarioConfig::from_config(const ConfigFile& config) {
    ScenarioConfig scenario;
    const auto pollutant = parse_pollutant(config.require_string("scenario.pollutant"));
    if (!pollutant.has_value()) {
        throw std::runtime_error("unknown scenario.pollutant");
    }
    scenario.pollutant = *pollutant;
    scenario.years = config.get_int_list("scenario.years");

    const auto exposure = parse_unit_level(config.require_string("scenario.exposure_scale"));
    const auto bmc = parse_unit_level(config.require_string("scenario.bmc_scale"));
    if (!exposure.has_value() || !bmc.has_value()) {
        throw std::runtime_error("unknown analysis scale");
    }
    scenario.exposure_scale = *exposure;
    scenario.bmc_scale = *bmc;

    if (const auto mode = config.get_string("scenario.crf_mode")) {
        const auto parsed = parse_crf_mode(*mode);
        if (!parsed.has_value()) throw std::runtime_error("unknown scenario.crf_mode");
        scenario.crf_mode = *parsed;
    }
    scenario.cohort_single = config.get_bool("scenario.cohort_single", false);
    if (const auto metric = config.get_string("scenario.exposure_metric")) {
        const auto parsed = parse_exposure_metric(*metric);
        if (!parsed.has_value()) {
            throw std::runtime_error("unknown scenario.exposure_metric");
        }
        scenario.exposure_metric = *parsed;
    }
    if (config.has("scenario.subgroups")) {
        scenario.subgroups.clear();
        for (const auto& label : config.get_list("scenario.subgroups")) {
            bool recognized = true;
            const Subgroup subgroup = parse_subgroup(label, &recognized);
            if (!recognized) {
                throw std::runtime_error("unknown subgroup '" + label + "'");
            }
            scenario.subgroups.push_back(subgroup);
        }
    }
    if (const auto prefix = config.get_string("scenario.state_prefix")) {
        scenario.state_prefix = *prefix;
    }
    scenario.expected_vintage = config.get_string("scenario.vintage").value_or("");
    if (const auto units = config.get_string("scenario.grid_units")) {
        const auto parsed = parse_units(*units);
        if (!parsed.has_value()) throw std::runtime_error("unknown scenario.grid_units");
        scenario.grid_units = *parsed;
    } else {
        scenario.grid_units = scenario.pollutant == Pollutant::NO2
                                  ? ConcentrationUnits::Ppbv
                                  : ConcentrationUnits::UgM3;
    }

    for (const auto& [year, path] : config.with_prefix("inputs.grid")) {
        const auto parsed = to_number(year);
        if (!parsed.has_value()) {
            throw std::runtime_error("inputs.grid key must be a year, got " + year);
        }
        scenario.grid_paths[static_cast<int>(*parsed)] = path;
    }
    for (const auto& [level, path] : config.with_prefix("inputs.geography")) {
        const auto parsed = parse_unit_level(level);
        if (!parsed.has_value()) {
            throw std::runtime_error("inputs.geography key must be a level, got " + level);
        }
        scenario.geography_paths[*parsed] = path;
    }
    scenario.mortality_path = config.require_string("inputs.mortality");
    scenario.population_path = config.get_string("inputs.population").value_or("");
    for (const auto& [year, path] : config.with_prefix("inputs.population_grid")) {
        const auto parsed = to_number(year);
        if (!parsed.has_value()) {
            throw std::runtime_error("inputs.population_grid key must be a year");
        }
        scenario.population_grid_paths[static_cast<int>(*parsed)] = path;
    }
    for (const auto& [year, path] : config.with_prefix("inputs.od")) {
        const auto parsed = to_number(year);
        if (!parsed.has_value()) {
            throw std::runtime_error("inputs.od key must be a year");
        }
        scenario.od_paths[static_cast<int>(*parsed)] = path;
    }
    scenario.output_dir = config.get_string("output.dir").value_or("");
    scenario.geojson_field = config.get_string("output.geojson_field").value_or("");
    return scenario;
}

void ScenarioConfig::validate() const {
    if (years.empty()) throw std::invalid_argument("no analysis years configured");
    if (subgroups.empty()) throw std::invalid_argument("no subgroups configured");
    switch (bmc_scale) {
        case UnitLevel::Block:
        case UnitLevel::BlockGroup:
        case UnitLevel::Tract:
        case UnitLevel::County:
            break;
        default:
            throw std::invalid_argument("bmc scale must be block..county");
    }
    if (exposure_scale != UnitLevel::Cell && exposure_scale != bmc_scale) {
        throw std::invalid_argument(
            "exposure scale must equal the bmc scale or be cell");
    }
    if (exposure_metric == ExposureMetric::HomeWork) {
        if (exposure_scale != UnitLevel::Tract) {
            throw std::invalid_argument(
                "the home-work metric requires tract-scale exposure");
        }
        if (od_paths.empty()) {
            throw std::invalid_argument("the home-work metric requires OD inputs");
        }
    }
    if (exposure_scale == UnitLevel::Cell && population_grid_paths.empty()) {
        throw std::invalid_argument("cell-scale runs require population grids");
    }
    if (mortality_path.empty()) {
        throw std::invalid_argument("no mortality input configured");
    }
    const UnitLevel geo_level =
        exposure_scale == UnitLevel::Cell ? bmc_scale : exposure_scale;
    if (geography_paths.count(geo_level) == 0) {
        throw std::invalid_argument("no geography input for level " +
                                    std::string(to_string(geo_level)));
    }
}

std::string ScenarioConfig::tag() const {
    std::string tag = "bmc-" + std::string(to_string(bmc_scale));
    tag += exposure_scale == UnitLevel::Cell ? "_exp-cell" : "_exp-same";
    tag += "_crf-" + std::string(to_string(crf_mode));
    tag += "_" + std::string(to_string(exposure_metric));
    return tag;
}

namespace {

std::vector<std::string> echo_config(const ScenarioConfig& config) {
    std::vector<std::string> lines;
    const auto add = [&](const std::string& key, const std::string& value) {
        lines.push_back(key + " = " + value);
    };
    add("scenario.pollutant", std::string(to_string(config.pollutant)));
    {
        std::string years = "[";
        for (std::size_t i = 0; i < config.years.size(); ++i) {
            if (i > 0) years += ", ";
            years += std::to_string(config.years[i]);
        }
        add("scenario.years", years + "]");
    }
    add("scenario.exposure_scale", std::string(to_string(config.exposure_scale)));
    add("scenario.bmc_scale", std::string(to_string(config.bmc_scale)));
    add("scenario.crf_mode", std::string(to_string(config.crf_mode)));
    add("scenario.cohort_single", config.cohort_single ? "true" : "false");
    add("scenario.exposure_metric", std::string(to_string(config.exposure_metric)));
    {
        std::string groups = "[";
        for (std::size_t i = 0; i < config.subgroups.size(); ++i) {
            if (i > 0) groups += ", ";
            groups += std::string(to_string(config.subgroups[i]));
        }
        add("scenario.subgroups", groups + "]");
    }
    add("scenario.state_prefix", config.state_prefix);
    if (!config.expected_vintage.empty()) {
        add("scenario.vintage", config.expected_vintage);
    }
    add("scenario.grid_units", std::string(to_string(config.grid_units)));
    for (const auto& [year, path] : config.grid_paths) {
        add("inputs.grid." + std::to_string(year), path);
    }
    for (const auto& [level, path] : config.geography_paths) {
        add("inputs.geography." + std::string(to_string(level)), path);
    }
    add("inputs.mortality", config.mortality_path);
    if (!config.population_path.empty()) {
        add("inputs.population", config.population_path);
    }
    for (const auto& [year, path] : config.population_grid_paths) {
        add("inputs.population_grid." + std::to_string(year), path);
    }
    for (const auto& [year, path] : config.od_paths) {
        add("inputs.od." + std::to_string(year), path);
    }
    if (!config.output_dir.empty()) add("output.dir", config.output_dir);
    if (!config.geojson_field.empty()) {
        add("output.geojson_field", config.geojson_field);
    }
    return lines;
}

Grid interpolate_grid_series(const std::map<int, Grid>& anchors, int year) {
    if (anchors.empty()) {
        throw std::invalid_argument("no anchor grids");
    }
    if (year < anchors.begin()->first || year > anchors.rbegin()->first) {
        throw std::out_of_range("extrapolation not supported");
    }
    const auto upper = anchors.lower_bound(year);
    if (upper->first == year) return upper->second;
    const auto lower = std::prev(upper);
    const Grid& g0 = lower->second;
    const Grid& g1 = upper->second;
    if (!g0.layout.same_layout(g1.layout)) {
        throw std::runtime_error("population grid layout mismatch across years");
    }
    const double t = static_cast<double>(year - lower->first) /
                     static_cast<double>(upper->first - lower->first);
    Grid out = g0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (g0.is_nodata(i) || g1.is_nodata(i)) {
            out.values[i] = out.nodata;
        } else {
            out.values[i] = g0.values[i] + t * (g1.values[i] - g0.values[i]);
        }
    }
    return out;
}

// Decile by ascending rank with GeoId tie-break: rank r of n → ⌈10r/n⌉.
std::map<std::string, int> rank_deciles(
    const std::map<std::string, double>& values) {
    std::vector<std::pair<double, std::string>> order;
    order.reserve(values.size());
    for (const auto& [id, value] : values) order.emplace_back(value, id);
    std::sort(order.begin(), order.end());
    std::map<std::string, int> deciles;
    const std::size_t n = order.size();
    for (std::size_t r = 1; r <= n; ++r) {
        deciles[order[r - 1].second] =
            static_cast<int>((10 * r + n - 1) / n);
    }
    return deciles;
}

struct LoadedInputs {
    UnitRegistry registry;  // at the unit analysis level
    MortalityIngest mortality;
    std::map<int, BmcTable> bmc_by_year;
    std::map<std::string, PopulationSeries> population_csv;
    std::map<int, Grid> population_grids;
};

std::string field_or_empty(const std::optional<double>& value) {
    return value.has_value() ? format_double(*value) : std::string();
}

}  // namespace

// --- run_scenario -----------------------------------------------------------

ScenarioResult run_scenario(const ScenarioConfig& config, unsigned threads) {
    config.validate();
    ScenarioResult result;
    result.config = config;
    result.config_echo = echo_config(config);

    LoadedInputs inputs;
    const UnitLevel geo_level = config.exposure_scale == UnitLevel::Cell
                                    ? config.bmc_scale
                                    : config.exposure_scale;
    {
        auto in = open_input(config.geography_paths.at(geo_level));
        std::vector<std::string> diagnostics;
        inputs.registry = read_geojson_units(in, geo_level, &diagnostics);
        for (const auto& d : diagnostics) result.notices.push_back(d);
        if (inputs.registry.units.empty()) {
            throw std::runtime_error("geography at level " +
                                     std::string(to_string(geo_level)) +
                                     " has no units");
        }
        if (!config.expected_vintage.empty() && !inputs.registry.vintage.empty() &&
            config.expected_vintage != inputs.registry.vintage) {
            throw std::runtime_error("geography vintage mismatch: expected " +
                                     config.expected_vintage + ", file carries " +
                                     inputs.registry.vintage);
        }
    }

    {
        auto in = open_input(config.mortality_path);
        inputs.mortality = read_mortality_csv(in);
        result.mortality_input_rows = inputs.mortality.input_rows;
        result.mortality_kept = inputs.mortality.kept;
        result.mortality_excluded = inputs.mortality.excluded_unknown_location;
        result.mortality_rejected = inputs.mortality.rejected;
        if (!inputs.mortality.warnings.empty()) {
            result.notices.push_back(
                "mortality: " + std::to_string(inputs.mortality.warnings.size()) +
                " unknown race labels mapped to unknown");
        }
        for (const auto& [subgroup, tally] : inputs.mortality.by_subgroup) {
            if (tally.excluded == 0) continue;
            const std::size_t rows = tally.kept + tally.excluded;
            result.notices.push_back(
                "mortality: subgroup " + std::string(to_string(subgroup)) +
                " excluded " + std::to_string(tally.excluded) + " of " +
                std::to_string(rows) + " rows for unknown location");
        }
    }

    const std::set<int> year_set(config.years.begin(), config.years.end());
    const std::set<Subgroup> subgroup_set(config.subgroups.begin(),
                                          config.subgroups.end());
    {
        std::vector<CountRecord> records;
        for (const auto& record : inputs.mortality.records) {
            if (year_set.count(record.year) == 0) continue;
            if (subgroup_set.count(record.subgroup) == 0) continue;
            records.push_back(
                {record.geoid, record.subgroup, record.year, record.count});
        }
        const AggregatedCounts aggregated =
            aggregate_counts(records, config.bmc_scale);
        if (!aggregated.rejected.empty()) {
            result.notices.push_back(
                "mortality: " + std::to_string(aggregated.rejected.size()) +
                " records with malformed geoids rejected");
        }
        for (const auto& [key, count] : aggregated.counts) {
            const auto& [geoid, subgroup, year] = key;
            inputs.bmc_by_year[year][geoid][subgroup] =
                static_cast<double>(count);
        }
    }

    if (!config.population_path.empty()) {
        auto in = open_input(config.population_path);
        inputs.population_csv = read_population_csv(in);
    }
    for (const auto& [year, path] : config.population_grid_paths) {
        auto in = open_input(path);
        inputs.population_grids.emplace(year, read_ascii_grid(in));
    }

    // Coverage of the unit polygons over the grid layout, built lazily and
    // reused across years (cell-scale BMR assignment and grid-based unit
    // populations).
    std::map<std::string, CoverageVector> unit_coverage;
    std::optional<GridLayout> coverage_layout;
    const auto ensure_coverage = [&](const GridLayout& layout) {
        if (coverage_layout.has_value()) {
            if (!coverage_layout->same_layout(layout)) {
                throw std::runtime_error("grid layout mismatch across inputs");
            }
            return;
        }
        std::vector<const std::string*> ids;
        std::vector<const Polygon*> polygons;
        for (const auto& [id, record] : inputs.registry.units) {
            ids.push_back(&id);
            polygons.push_back(&record.polygon);
        }
        std::vector<CoverageVector> coverages(ids.size());
        parallel_for(ids.size(), threads, [&](std::size_t i) {
            coverages[i] = compute_coverage(layout, *polygons[i]);
        });
        coverage_layout = layout;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            unit_coverage.emplace(*ids[i], std::move(coverages[i]));
        }
    };

    // Unit populations at the analysis level for one year; nullopt when no
    // population source is configured.
    const auto unit_population_at =
        [&](int year,
            const GridLayout* layout) -> std::optional<std::map<std::string, double>> {
        if (!inputs.population_csv.empty()) {
            std::map<std::string, double> totals;
            for (const auto& [unit, series] : inputs.population_csv) {
                const auto id = GeoId::try_parse(unit);
                if (!id.has_value()) {
                    throw std::runtime_error("population csv geoid '" + unit +
                                             "' is malformed");
                }
                totals[id->parent(config.bmc_scale).str()] +=
                    interpolate_population(series, year);
            }
            return totals;
        }
        if (!inputs.population_grids.empty() && layout != nullptr) {
            const Grid pop = interpolate_grid_series(inputs.population_grids, year);
            if (!pop.layout.same_layout(*layout)) {
                throw std::runtime_error(
                    "population grid layout differs from the pollutant grid");
            }
            ensure_coverage(*layout);
            std::map<std::string, double> totals;
            for (const auto& [unit, coverage] : unit_coverage) {
                totals[unit] = zonal_sum(pop, coverage);
            }
            return totals;
        }
        return std::nullopt;
    };

    // CRF selection. Subgroup and cohort-single runs draw from the cohort
    // table; plain single runs use the systematic-review risk.
    CrfSet crfs;
    crfs.by_subgroup = cohort_crfs(config.pollutant);
    if (config.crf_mode == CrfMode::Subgroup || config.cohort_single) {
        crfs.single = crfs.by_subgroup.at(Subgroup::All);
    } else {
        crfs.single = review_single_crf(config.pollutant);
    }
    for (const auto& [subgroup, crf] : crfs.by_subgroup) {
        for (const auto& warning : crf.validate()) {
            result.notices.push_back("crf: " + warning);
        }
    }
    const ConcentrationUnits required_units =
        config.crf_mode == CrfMode::Subgroup
            ? crfs.by_subgroup.begin()->second.required_units
            : crfs.single.required_units;

    const bool want_per_10k = config.exposure_scale != UnitLevel::Cell &&
                              config.bmc_scale != UnitLevel::Block;

    std::vector<int> years = config.years;
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());

    for (const int year : years) {
        const auto grid_path = config.grid_paths.find(year);
        if (grid_path == config.grid_paths.end()) {
            result.notices.push_back("year " + std::to_string(year) +
                                     " skipped: no grid input");
            continue;
        }
        if (config.exposure_metric == ExposureMetric::HomeWork &&
            config.od_paths.count(year) == 0) {
            result.notices.push_back("year " + std::to_string(year) +
                                     " skipped: no OD input");
            continue;
        }
        const auto bmc_year = inputs.bmc_by_year.find(year);
        if (bmc_year == inputs.bmc_by_year.end()) {
            result.notices.push_back("year " + std::to_string(year) +
                                     " skipped: no mortality records");
            continue;
        }

        Grid grid;
        {
            auto in = open_input(grid_path->second);
            grid = read_ascii_grid(in);
        }

        ExposureSurface surface;
        if (config.exposure_scale == UnitLevel::Cell) {
            surface = surface_from_grid(grid, config.pollutant,
                                        config.grid_units, year);
        } else {
            SurfaceBuild build =
                build_surface(grid, inputs.registry, config.pollutant,
                              config.grid_units, year, threads);
            if (!build.omitted_units.empty()) {
                result.notices.push_back(
                    "year " + std::to_string(year) + ": " +
                    std::to_string(build.omitted_units.size()) +
                    " units without valid overlap omitted");
            }
            surface = std::move(build.surface);
        }

        if (config.exposure_metric == ExposureMetric::HomeWork) {
            auto in = open_input(config.od_paths.at(year));
            OdMatrix od = read_lodes_od(in, config.state_prefix);
            if (!od.rejected.empty()) {
                result.notices.push_back("year " + std::to_string(year) + ": " +
                                         std::to_string(od.rejected.size()) +
                                         " OD rows rejected");
            }
            OdMatrix filtered;
            filtered.year = od.year;
            std::size_t dropped = 0;
            for (const auto& [pair, workers] : od.flows) {
                if (surface.values.count(pair.first) != 0 &&
                    surface.values.count(pair.second) != 0) {
                    filtered.flows.emplace(pair, workers);
                } else {
                    ++dropped;
                }
            }
            if (dropped > 0) {
                result.notices.push_back(
                    "year " + std::to_string(year) + ": " + std::to_string(dropped) +
                    " OD pairs referencing unknown tracts dropped");
            }
            HomeWorkBuild hw = home_work_surface(surface, filtered);
            if (!hw.omitted.empty()) {
                result.notices.push_back("year " + std::to_string(year) + ": " +
                                         std::to_string(hw.omitted.size()) +
                                         " tracts without OD coverage omitted");
            }
            surface = std::move(hw.surface);
        }

        if (surface.units != required_units) {
            surface = convert_units(surface, required_units);
        }

        AttributionOptions options;
        options.crf_mode = config.crf_mode;
        options.exposure_level = config.exposure_scale;
        options.bmc_level = config.bmc_scale;
        options.year = year;
        options.metric = config.exposure_metric;

        BmcTable bmc;
        std::optional<std::map<std::string, double>> populations;
        if (config.exposure_scale == UnitLevel::Cell) {
            ensure_coverage(grid.layout);
            populations = unit_population_at(year, &grid.layout);
            if (!populations.has_value()) {
                throw std::runtime_error(
                    "cell-scale runs need a population source");
            }
            const Grid pop_grid =
                interpolate_grid_series(inputs.population_grids, year);
            if (!pop_grid.layout.same_layout(grid.layout)) {
                throw std::runtime_error(
                    "population grid layout differs from the pollutant grid");
            }
            for (const Subgroup subgroup : config.subgroups) {
                std::map<std::string, double> unit_bmr;
                std::size_t skipped = 0;
                for (const auto& [unit, by_subgroup] : bmc_year->second) {
                    const auto count = by_subgroup.find(subgroup);
                    if (count == by_subgroup.end()) continue;
                    if (unit_coverage.count(unit) == 0) {
                        ++skipped;
                        continue;
                    }
                    const auto pop = populations->find(unit);
                    if (pop == populations->end() || pop->second <= 0.0) {
                        ++skipped;
                        continue;
                    }
                    unit_bmr[unit] = count->second / pop->second;
                }
                if (skipped > 0) {
                    result.notices.push_back(
                        "year " + std::to_string(year) + " " +
                        std::string(to_string(subgroup)) + ": " +
                        std::to_string(skipped) +
                        " units without population or geometry skipped");
                }
                const Grid bmr_grid = assign_to_cells(
                    grid.layout, unit_bmr, unit_coverage, grid.nodata);
                for (std::size_t i = 0; i < bmr_grid.values.size(); ++i) {
                    if (bmr_grid.is_nodata(i) || pop_grid.is_nodata(i)) continue;
                    bmc[std::to_string(i)][subgroup] =
                        bmr_grid.values[i] * pop_grid.values[i];
                }
            }
            options.population = nullptr;
        } else {
            bmc = bmc_year->second;
            if (want_per_10k) {
                populations = unit_population_at(year, nullptr);
                if (populations.has_value()) {
                    options.population = &*populations;
                }
            }
        }

        AttributionRun run = attribute_surface(surface, bmc, crfs, options);
        if (!run.skipped_units.empty()) {
            result.notices.push_back("year " + std::to_string(year) + ": " +
                                     std::to_string(run.skipped_units.size()) +
                                     " BMC units without exposure skipped");
        }

        YearTotals totals;
        for (const auto& row : run.results) {
            totals.central += row.deaths_central;
            totals.low += row.deaths_low;
            totals.high += row.deaths_high;
        }
        result.totals[year] = totals;
        result.results.insert(result.results.end(),
                              std::make_move_iterator(run.results.begin()),
                              std::make_move_iterator(run.results.end()));
    }

    if (!config.output_dir.empty()) {
        write_scenario_outputs(result);
        if (!config.geojson_field.empty() &&
            config.exposure_scale != UnitLevel::Cell) {
            for (const int year : years) {
                std::map<std::string, double> values;
                for (const auto& row : result.results) {
                    if (row.year != year) continue;
                    double field = row.deaths_central;
                    if (config.geojson_field == "per_10k") {
                        if (!row.per_10k.has_value()) continue;
                        field = *row.per_10k;
                    } else if (config.geojson_field == "pct_all_cause") {
                        if (!row.pct_of_all_cause.has_value()) continue;
                        field = *row.pct_of_all_cause;
                    }
                    values[row.geoid] += field;
                }
                if (values.empty()) continue;
                const auto doc =
                    emit_geojson(values, inputs.registry, &result.notices);
                std::ofstream out(std::filesystem::path(config.output_dir) /
                                  (config.geojson_field + "_" +
                                   std::to_string(year) + ".geojson"));
                out << doc.dump(2) << '\n';
            }
        }
    }
    return result;
}

// --- compare ---------------------------------------------------------------

ScenarioComparison compare_scenarios(const ScenarioResult& a,
                                     const ScenarioResult& b) {
    if (a.config.pollutant != b.config.pollutant) {
        throw std::invalid_argument("scenarios analyze different pollutants");
    }
    ScenarioComparison comparison;
    for (const auto& [year, totals_a] : a.totals) {
        const auto found = b.totals.find(year);
        if (found == b.totals.end()) continue;
        ScenarioComparison::YearRow row;
        row.year = year;
        row.total_a = totals_a.central;
        row.total_b = found->second.central;
        row.ratio = row.total_a == 0.0
                        ? std::numeric_limits<double>::quiet_NaN()
                        : row.total_b / row.total_a;
        row.pct_diff = row.total_a == 0.0
                           ? std::numeric_limits<double>::quiet_NaN()
                           : 100.0 * (row.total_b - row.total_a) / row.total_a;
        comparison.by_year.push_back(row);
    }
    if (comparison.by_year.empty()) {
        throw std::invalid_argument("scenarios share no years");
    }

    const bool same_scale =
        !a.results.empty() && !b.results.empty() &&
        a.results.front().exposure_level == b.results.front().exposure_level &&
        a.results.front().bmc_level == b.results.front().bmc_level;
    if (same_scale) {
        std::map<std::pair<std::string, int>, double> sums_a;
        std::map<std::pair<std::string, int>, double> sums_b;
        for (const auto& row : a.results) {
            sums_a[{row.geoid, row.year}] += row.deaths_central;
        }
        for (const auto& row : b.results) {
            sums_b[{row.geoid, row.year}] += row.deaths_central;
        }
        for (const auto& [key, value_a] : sums_a) {
            const auto found = sums_b.find(key);
            if (found == sums_b.end()) continue;
            comparison.unit_join.push_back(
                {key.first, key.second, value_a, found->second});
        }
    }
    return comparison;
}

std::map<std::string, int> classify_deciles(
    const std::map<std::string, double>& values) {
    if (values.size() < 10) {
        throw std::invalid_argument("too few units");
    }
    for (const auto& [id, value] : values) {
        if (!std::isfinite(value)) {
            throw std::invalid_argument("non-finite value for " + id);
        }
    }
    return rank_deciles(values);
}

nlohmann::ordered_json emit_geojson(const std::map<std::string, double>& values,
                                    const UnitRegistry& registry,
                                    std::vector<std::string>* notices) {
    std::map<std::string, double> usable;
    for (const auto& [geoid, value] : values) {
        if (!std::isfinite(value)) {
            if (notices) notices->push_back("geojson: non-finite value for " + geoid + " skipped");
            continue;
        }
        if (registry.units.count(geoid) == 0) {
            if (notices) notices->push_back("geojson: no geometry for " + geoid + ", feature skipped");
            continue;
        }
        usable.emplace(geoid, value);
    }
    const auto deciles = rank_deciles(usable);
    nlohmann::ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = nlohmann::ordered_json::array();
    for (const auto& [geoid, value] : usable) {
        nlohmann::ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"] = nlohmann::ordered_json::parse(
            registry.units.at(geoid).geometry_json);
        feature["properties"] = {{"geoid", geoid},
                                 {"value", value},
                                 {"decile", deciles.at(geoid)}};
        doc["features"].push_back(std::move(feature));
    }
    return doc;
}

// --- serialization ------------------------------------------------------------

void write_results_csv(std::span<const AttributionResult> results,
                       std::ostream& out) {
    out << "year,geoid,level,pollutant,subgroup,crf_mode,exposure_metric,"
           "deaths,deaths_lo,deaths_hi,attr_fraction,per_10k,pct_all_cause\n";
    for (const auto& row : results) {
        const UnitLevel level = row.exposure_level == UnitLevel::Cell
                                    ? UnitLevel::Cell
                                    : row.bmc_level;
        out << row.year << ',' << row.geoid << ',' << to_string(level) << ','
            << to_string(row.pollutant) << ',' << to_string(row.subgroup) << ','
            << to_string(row.crf_mode) << ',' << to_string(row.metric) << ','
            << format_double(row.deaths_central) << ','
            << format_double(row.deaths_low) << ','
            << format_double(row.deaths_high) << ','
            << format_double(row.attr_fraction) << ','
            << field_or_empty(row.per_10k) << ','
            << field_or_empty(row.pct_of_all_cause) << '\n';
    }
}

std::vector<AttributionResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("results csv: missing header");
    }
    std::vector<AttributionResult> rows;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 13) {
            throw std::runtime_error("results csv line " +
                                     std::to_string(line_number) +
                                     ": expected 13 fields");
        }
        AttributionResult row;
        const auto year = to_number(fields[0]);
        if (!year.has_value()) {
            throw std::runtime_error("results csv line " +
                                     std::to_string(line_number) + ": bad year");
        }
        row.year = static_cast<int>(*year);
        row.geoid = std::string(trim(fields[1]));
        const auto level = parse_unit_level(fields[2]);
        const auto pollutant = parse_pollutant(fields[3]);
        const auto crf_mode = parse_crf_mode(fields[5]);
        const auto metric = parse_exposure_metric(fields[6]);
        if (!level.has_value() || !pollutant.has_value() ||
            !crf_mode.has_value() || !metric.has_value()) {
            throw std::runtime_error("results csv line " +
                                     std::to_string(line_number) +
                                     ": unparseable enum field");
        }
        row.exposure_level = *level;
        row.bmc_level = *level == UnitLevel::Cell ? UnitLevel::County : *level;
        row.pollutant = *pollutant;
        row.subgroup = parse_subgroup(fields[4]);
        row.crf_mode = *crf_mode;
        row.metric = *metric;
        const auto deaths = to_number(fields[7]);
        const auto lo = to_number(fields[8]);
        const auto hi = to_number(fields[9]);
        const auto fraction = to_number(fields[10]);
        if (!deaths || !lo || !hi || !fraction) {
            throw std::runtime_error("results csv line " +
                                     std::to_string(line_number) +
                                     ": unparseable numeric field");
        }
        row.deaths_central = *deaths;
        row.deaths_low = *lo;
        row.deaths_high = *hi;
        row.attr_fraction = *fraction;
        if (const auto v = to_number(fields[11])) row.per_10k = *v;
        if (const auto v = to_number(fields[12])) row.pct_of_all_cause = *v;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_totals_csv(const ScenarioResult& result, std::ostream& out) {
    out << "scenario,year,deaths,deaths_lo,deaths_hi\n";
    const std::string tag = result.config.tag();
    for (const auto& [year, totals] : result.totals) {
        out << tag << ',' << year << ',' << format_double(totals.central) << ','
            << format_double(totals.low) << ',' << format_double(totals.high)
            << '\n';
    }
}

void write_comparison_csv(const ScenarioComparison& comparison,
                          std::ostream& out) {
    out << "year,total_a,total_b,ratio,pct_diff\n";
    for (const auto& row : comparison.by_year) {
        out << row.year << ',' << format_double(row.total_a) << ','
            << format_double(row.total_b) << ',' << format_double(row.ratio)
            << ',' << format_double(row.pct_diff) << '\n';
    }
}

void write_report(const ScenarioResult& result, std::ostream& out) {
    out << "scenario " << result.config.tag() << ", pollutant "
        << to_string(result.config.pollutant) << '\n';
    out << "state totals, deaths attributable (central (low, high))\n";
    for (const auto& [year, totals] : result.totals) {
        out << year << ": " << std::llround(totals.central) << " ("
            << std::llround(totals.low) << ", " << std::llround(totals.high)
            << ")\n";
    }
}

void write_run_metadata(const ScenarioResult& result, std::ostream& out) {
    out << "config:\n";
    for (const auto& line : result.config_echo) out << "  " << line << '\n';
    out << "mortality: input_rows=" << result.mortality_input_rows
        << " kept=" << result.mortality_kept
        << " excluded_unknown_location=" << result.mortality_excluded
        << " rejected=" << result.mortality_rejected << '\n';
    out << "notices:\n";
    for (const auto& notice : result.notices) out << "  " << notice << '\n';
}

void write_scenario_outputs(const ScenarioResult& result) {
    const std::filesystem::path dir = result.config.output_dir;
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "results.csv");
        write_results_csv(result.results, out);
    }
    {
        std::ofstream out(dir / "totals.csv");
        write_totals_csv(result, out);
    }
    {
        std::ofstream out(dir / "report.txt");
        write_report(result, out);
    }
    {
        std::ofstream out(dir / "metadata.txt");
        write_run_metadata(result, out);
    }
}

ScenarioResult result_from_rows(std::vector<AttributionResult> rows) {
    ScenarioResult result;
    if (!rows.empty()) {
        result.config.pollutant = rows.front().pollutant;
        result.config.exposure_scale = rows.front().exposure_level;
        result.config.bmc_scale = rows.front().bmc_level;
        result.config.crf_mode = rows.front().crf_mode;
        result.config.exposure_metric = rows.front().metric;
    }
    std::set<int> years;
    for (const auto& row : rows) {
        auto& totals = result.totals[row.year];
        totals.central += row.deaths_central;
        totals.low += row.deaths_low;
        totals.high += row.deaths_high;
        years.insert(row.year);
    }
    result.config.years.assign(years.begin(), years.end());
    result.results = std::move(rows);
    return result;
}

// --- sweep -------------------------------------------------------------------

std::vector<ScenarioConfig> enumerate_scenarios(const ScenarioConfig& base,
                                                const SweepAxes& axes) {
    std::vector<ScenarioConfig> scenarios;
    for (const UnitLevel bmc : axes.bmc_scales) {
        for (const std::string& exposure : axes.exposure_scales) {
            for (const CrfMode mode : axes.crf_modes) {
                for (const ExposureMetric metric : axes.exposure_metrics) {
                    ScenarioConfig scenario = base;
                    scenario.bmc_scale = bmc;
                    scenario.exposure_scale =
                        exposure == "cell" ? UnitLevel::Cell : bmc;
                    scenario.crf_mode = mode;
                    scenario.exposure_metric = metric;
                    if (metric == ExposureMetric::HomeWork &&
                        (scenario.exposure_scale != UnitLevel::Tract ||
                         scenario.od_paths.empty())) {
                        continue;  // home-work is defined for tract exposure
                    }
                    if (scenario.exposure_scale == UnitLevel::Cell &&
                        scenario.population_grid_paths.empty()) {
                        continue;
                    }
                    if (!base.output_dir.empty()) {
                        scenario.output_dir =
                            (std::filesystem::path(base.output_dir) /
                             scenario.tag())
                                .string();
                    }
                    scenarios.push_back(std::move(scenario));
                }
            }
        }
    }
    return scenarios;
}

SweepAxes sweep_axes_from_config(const ConfigFile& config) {
    SweepAxes axes;
    const auto scales = config.get_list("sweep.bmc_scales");
    if (scales.empty()) {
        axes.bmc_scales = {UnitLevel::Block, UnitLevel::BlockGroup,
                           UnitLevel::Tract, UnitLevel::County};
    } else {
        for (const auto& scale : scales) {
            const auto parsed = parse_unit_level(scale);
            if (!parsed.has_value()) {
                throw std::runtime_error("unknown sweep scale '" + scale + "'");
            }
            axes.bmc_scales.push_back(*parsed);
        }
    }
    axes.exposure_scales = config.get_list("sweep.exposure_scales");
    if (axes.exposure_scales.empty()) axes.exposure_scales = {"same"};
    for (const auto& mode : config.get_list("sweep.crf_modes")) {
        const auto parsed = parse_crf_mode(mode);
        if (!parsed.has_value()) {
            throw std::runtime_error("unknown sweep crf mode '" + mode + "'");
        }
        axes.crf_modes.push_back(*parsed);
    }
    if (axes.crf_modes.empty()) axes.crf_modes = {CrfMode::Single};
    for (const auto& metric : config.get_list("sweep.exposure_metrics")) {
        const auto parsed = parse_exposure_metric(metric);
        if (!parsed.has_value()) {
            throw std::runtime_error("unknown sweep metric '" + metric + "'");
        }
        axes.exposure_metrics.push_back(*parsed);
    }
    if (axes.exposure_metrics.empty()) {
        axes.exposure_metrics = {ExposureMetric::Home};
    }
    return axes;
}

}  // namespace airhia
