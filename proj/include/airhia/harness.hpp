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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "airhia/health.hpp"
#include "airhia/types.hpp"

namespace airhia {

/// Flat dotted-key configuration file: one `key = value` pair per line,
/// `#` comments, values are quoted strings, numbers, booleans, or
/// [comma, separated, lists].
class ConfigFile {
public:
    static ConfigFile parse(std::istream& in);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& key) const;
    std::string require_string(const std::string& key) const;
    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_number(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;

    /// Entries whose key starts with `prefix + "."`, keyed by the suffix.
    std::map<std::string, std::string> with_prefix(const std::string& prefix) const;

private:
    std::map<std::string, std::string> entries_;
};

struct ScenarioConfig {
    Pollutant pollutant = Pollutant::PM25;
    std::vector<int> years;
    UnitLevel exposure_scale = UnitLevel::Tract;  // UnitLevel or Cell
    UnitLevel bmc_scale = UnitLevel::Tract;
    CrfMode crf_mode = CrfMode::Single;
    /// Single-CRF runs normally use the systematic-review risk; comparison
    /// runs swap in the cohort table's All row for internal consistency.
    bool cohort_single = false;
    ExposureMetric exposure_metric = ExposureMetric::Home;
    std::vector<Subgroup> subgroups = {Subgroup::All};
    std::string state_prefix = "08";
    ConcentrationUnits grid_units = ConcentrationUnits::UgM3;
    /// Expected geography vintage; when set, a registry carrying a different
    /// non-empty vintage tag is rejected.
    std::string expected_vintage;

    std::map<int, std::string> grid_paths;            // pollutant grid per year
    std::map<UnitLevel, std::string> geography_paths; // GeoJSON per level
    std::string mortality_path;
    std::string population_path;                      // per-unit anchor CSV
    std::map<int, std::string> population_grid_paths; // anchor grids
    std::map<int, std::string> od_paths;              // LODES OD per year
    std::string output_dir;                           // empty: no files written
    std::string geojson_field;  // deaths | per_10k | pct_all_cause | empty

    static ScenarioConfig from_config(const ConfigFile& config);

    /// Enforces the structural invariants: non-empty years/subgroups,
    /// exposure scale equal to the BMC scale or Cell, HomeWork only with
    /// tract-scale exposure and OD inputs, Cell runs only with population
    /// grids.
    void validate() const;

    /// Compact identifier, e.g. "bmc-tract_exp-cell_crf-single_home".
    std::string tag() const;
};

struct YearTotals {
    double central = 0.0;
    double low = 0.0;
    double high = 0.0;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::map<int, YearTotals> totals;  // fixed-order sums of `results`
    std::vector<AttributionResult> results;
    std::vector<std::string> notices;  // skipped years, dropped OD pairs, ...
    std::size_t mortality_input_rows = 0;
    std::size_t mortality_kept = 0;
    std::size_t mortality_excluded = 0;
    std::size_t mortality_rejected = 0;
    std::vector<std::string> config_echo;
};

/// Deterministic pipeline: ingest → surfaces → optional home–work blend →
/// attribution → totals. Missing per-year inputs skip the year with a
/// notice; ingest errors abort with the originating diagnostic.
ScenarioResult run_scenario(const ScenarioConfig& config, unsigned threads = 1);

struct ScenarioComparison {
    struct YearRow {
        int year = 0;
        double total_a = 0.0;
        double total_b = 0.0;
        double ratio = 0.0;     // b / a
        double pct_diff = 0.0;  // 100 × (b − a) / a
    };
    std::vector<YearRow> by_year;

    struct UnitRow {
        std::string geoid;
        int year = 0;
        double a = 0.0;
        double b = 0.0;
    };
    std::vector<UnitRow> unit_join;  // populated when result scales match
};

/// Per-year ratio and percent difference of state totals (b relative to a),
/// plus a per-unit join when both scenarios resolved to the same scale.
/// Throws when the scenarios share no year or differ in pollutant.
ScenarioComparison compare_scenarios(const ScenarioResult& a,
                                     const ScenarioResult& b);

/// Rank-based deciles, ascending, ties broken by GeoId lexicographic order:
/// rank r of n gets decile ⌈10r/n⌉. Throws "too few units" below 10 values.
std::map<std::string, int> classify_deciles(
    const std::map<std::string, double>& values);

/// FeatureCollection echoing registry geometry with properties
/// {geoid, value, decile}. NaN values and units without geometry are
/// skipped with a notice.
nlohmann::ordered_json emit_geojson(const std::map<std::string, double>& values,
                                    const UnitRegistry& registry,
                                    std::vector<std::string>* notices = nullptr);

// --- result and report serialization -------------------------------------

void write_results_csv(std::span<const AttributionResult> results,
                       std::ostream& out);
std::vector<AttributionResult> read_results_csv(std::istream& in);

void write_totals_csv(const ScenarioResult& result, std::ostream& out);
void write_comparison_csv(const ScenarioComparison& comparison,
                          std::ostream& out);

/// Death counts rounded to integers, CIs as "c (lo, hi)".
void write_report(const ScenarioResult& result, std::ostream& out);

void write_run_metadata(const ScenarioResult& result, std::ostream& out);

/// results.csv, totals.csv, report.txt, metadata.txt and the optional
/// GeoJSON under config.output_dir.
void write_scenario_outputs(const ScenarioResult& result);

/// Rebuild a comparable result from a results CSV (totals recomputed in
/// fixed order); used by the compare subcommand.
ScenarioResult result_from_rows(std::vector<AttributionResult> rows);

// --- sensitivity sweep ----------------------------------------------------

struct SweepAxes {
    std::vector<UnitLevel> bmc_scales;
    std::vector<std::string> exposure_scales;  // "same" and/or "cell"
    std::vector<CrfMode> crf_modes;
    std::vector<ExposureMetric> exposure_metrics;
};

/// Cartesian product of the axes over the base scenario. Covers the full
/// published grid: 4 BMC scales × {native-cell, same-scale} exposure ×
/// 2 CRF modes × 2 exposure metrics.
std::vector<ScenarioConfig> enumerate_scenarios(const ScenarioConfig& base,
                                                const SweepAxes& axes);

SweepAxes sweep_axes_from_config(const ConfigFile& config);

}  // namespace airhia
