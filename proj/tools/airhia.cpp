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

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "airhia/exposure.hpp"
#include "airhia/harness.hpp"
#include "airhia/health.hpp"
#include "airhia/ingest.hpp"
#include "airhia/synth.hpp"
#include "airhia/util.hpp"
#include "airhia/variance.hpp"

namespace {

using namespace airhia;

std::ifstream open_or_die(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

UnitLevel level_or_die(const std::string& text) {
    const auto level = parse_unit_level(text);
    if (!level.has_value()) throw std::runtime_error("unknown level " + text);
    return *level;
}

int run_aggregate(const std::string& grid_path, const std::string& units_path,
                  const std::string& level_text, const std::string& stat,
                  const std::string& out_path, unsigned threads) {
    auto grid_in = open_or_die(grid_path);
    const Grid grid = read_ascii_grid(grid_in);
    auto units_in = open_or_die(units_path);
    const UnitLevel level = level_or_die(level_text);
    const UnitRegistry registry = read_geojson_units(units_in, level);

    std::ofstream out(out_path);
    out << "geoid,value\n";
    if (stat == "mean") {
        const SurfaceBuild build = build_surface(
            grid, registry, Pollutant::PM25, ConcentrationUnits::UgM3, 0, threads);
        for (const auto& [id, value] : build.surface.values) {
            out << id << ',' << format_double(value) << '\n';
        }
        if (!build.omitted_units.empty()) {
            std::cerr << build.omitted_units.size()
                      << " units without valid overlap omitted\n";
        }
    } else if (stat == "sum") {
        for (const auto& [id, record] : registry.units) {
            const auto coverage = compute_coverage(grid.layout, record.polygon);
            out << id << ',' << format_double(zonal_sum(grid, coverage)) << '\n';
        }
    } else {
        throw std::runtime_error("unknown stat " + stat);
    }
    return 0;
}

int run_exposure(const std::string& grid_path, const std::string& units_path,
                 const std::string& level_text, const std::string& pollutant_text,
                 const std::string& units_in_text, const std::string& convert_text,
                 bool home_work, const std::string& od_path,
                 const std::string& state_prefix, const std::string& out_path,
                 const std::string& geojson_path, unsigned threads) {
    auto grid_in = open_or_die(grid_path);
    const Grid grid = read_ascii_grid(grid_in);
    auto units_in_stream = open_or_die(units_path);
    const UnitLevel level = level_or_die(level_text);
    const UnitRegistry registry = read_geojson_units(units_in_stream, level);

    const auto pollutant = parse_pollutant(pollutant_text);
    if (!pollutant.has_value()) {
        throw std::runtime_error("unknown pollutant " + pollutant_text);
    }
    const auto units = parse_units(units_in_text);
    if (!units.has_value()) {
        throw std::runtime_error("unknown units " + units_in_text);
    }

    SurfaceBuild build =
        build_surface(grid, registry, *pollutant, *units, 0, threads);
    ExposureSurface surface = std::move(build.surface);
    if (home_work) {
        if (od_path.empty()) {
            throw std::runtime_error("--home-work requires --od");
        }
        auto od_in = open_or_die(od_path);
        OdMatrix od = read_lodes_od(od_in, state_prefix);
        OdMatrix filtered;
        filtered.year = od.year;
        for (const auto& [pair, workers] : od.flows) {
            if (surface.values.count(pair.first) != 0 &&
                surface.values.count(pair.second) != 0) {
                filtered.flows.emplace(pair, workers);
            }
        }
        surface = home_work_surface(surface, filtered).surface;
    }
    if (!convert_text.empty()) {
        const auto target = parse_units(convert_text);
        if (!target.has_value()) {
            throw std::runtime_error("unknown units " + convert_text);
        }
        surface = convert_units(surface, *target);
    }

    std::ofstream out(out_path);
    out << "geoid,value\n";
    for (const auto& [id, value] : surface.values) {
        out << id << ',' << format_double(value) << '\n';
    }
    if (!geojson_path.empty()) {
        std::vector<std::string> notices;
        const auto doc = emit_geojson(surface.values, registry, &notices);
        std::ofstream geo(geojson_path);
        geo << doc.dump(2) << '\n';
        for (const auto& notice : notices) std::cerr << notice << '\n';
    }
    return 0;
}

int run_attribute(const std::string& config_path, unsigned threads) {
    const ConfigFile config = ConfigFile::load(config_path);
    const ScenarioConfig scenario = ScenarioConfig::from_config(config);
    const ScenarioResult result = run_scenario(scenario, threads);
    if (scenario.output_dir.empty()) {
        write_report(result, std::cout);
    } else {
        std::cout << "outputs written to " << scenario.output_dir << '\n';
    }
    return 0;
}

int run_sensitivity(const std::string& config_path, unsigned threads) {
    const ConfigFile config = ConfigFile::load(config_path);
    const ScenarioConfig base = ScenarioConfig::from_config(config);
    const SweepAxes axes = sweep_axes_from_config(config);
    const auto scenarios = enumerate_scenarios(base, axes);
    if (scenarios.empty()) {
        throw std::runtime_error("sweep enumerates no valid scenarios");
    }
    std::vector<ScenarioResult> results;
    results.reserve(scenarios.size());
    for (const auto& scenario : scenarios) {
        results.push_back(run_scenario(scenario, threads));
    }
    if (!base.output_dir.empty()) {
        std::filesystem::create_directories(base.output_dir);
        std::ofstream out(std::filesystem::path(base.output_dir) /
                          "sweep_totals.csv");
        out << "scenario,year,deaths,deaths_lo,deaths_hi\n";
        for (const auto& result : results) {
            for (const auto& [year, totals] : result.totals) {
                out << result.config.tag() << ',' << year << ','
                    << format_double(totals.central) << ','
                    << format_double(totals.low) << ','
                    << format_double(totals.high) << '\n';
            }
        }
    }
    for (const auto& result : results) {
        std::cout << result.config.tag() << ": " << result.results.size()
                  << " unit results\n";
    }
    return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path,
                const std::string& out_path, const std::string& units_out) {
    auto a_in = open_or_die(a_path);
    auto b_in = open_or_die(b_path);
    const ScenarioResult a = result_from_rows(read_results_csv(a_in));
    const ScenarioResult b = result_from_rows(read_results_csv(b_in));
    const ScenarioComparison comparison = compare_scenarios(a, b);
    std::ofstream out(out_path);
    write_comparison_csv(comparison, out);
    if (!units_out.empty()) {
        std::ofstream units(units_out);
        units << "geoid,year,deaths_a,deaths_b\n";
        for (const auto& row : comparison.unit_join) {
            units << row.geoid << ',' << row.year << ','
                  << format_double(row.a) << ',' << format_double(row.b) << '\n';
        }
    }
    return 0;
}

int run_variance(const std::string& input_path, const std::string& out_path) {
    auto in = open_or_die(input_path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("variance csv: missing header");
    }
    std::vector<BmrObservation> observations;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 3) {
            throw std::runtime_error("variance csv: expected year,geoid,bmr");
        }
        observations.push_back({std::stoi(fields[0]),
                                GeoId(std::string(trim(fields[1]))),
                                std::stod(fields[2])});
    }
    const VarianceDecomposition decomposition = decompose(observations);
    std::ofstream out(out_path);
    out << "var_year,var_county,var_tract,var_block_group,var_block,"
           "var_residual,pct_year,pct_county,pct_tract,pct_block_group,"
           "pct_block,iterations,converged\n";
    for (const double v : decomposition.components) out << format_double(v) << ',';
    out << format_double(decomposition.residual_variance);
    if (decomposition.proportions_pct.has_value()) {
        for (const double p : *decomposition.proportions_pct) {
            out << ',' << format_double(p);
        }
    } else {
        out << ",,,,,";
    }
    out << ',' << decomposition.iterations << ','
        << (decomposition.converged ? "true" : "false") << '\n';
    if (decomposition.zero_total_variance) {
        std::cerr << "zero total variance; proportions undefined\n";
    }
    return 0;
}

int run_synth(const std::string& out_dir, std::uint64_t seed,
              const std::vector<int>& years, std::size_t grid_n,
              double unknown_share) {
    SynthOptions options;
    options.seed = seed;
    if (!years.empty()) options.years = years;
    options.grid_n = grid_n;
    options.unknown_location_share = unknown_share;
    const SyntheticState state = build_synthetic_state(options);
    write_synthetic_state(state, out_dir);
    std::cout << "synthetic state written to " << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-scale air pollution health impact assessment"};
    app.require_subcommand(1);
    app.fallthrough(true);

    unsigned threads = 1;
    std::uint64_t seed = 42;
    app.add_option("--threads", threads, "worker threads (results identical)");
    app.add_option("--seed", seed, "seed for synthetic data generation");

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "zonal grid → unit table");
    std::string agg_grid, agg_units, agg_level, agg_stat = "mean", agg_out;
    aggregate->add_option("--grid", agg_grid)->required();
    aggregate->add_option("--units", agg_units)->required();
    aggregate->add_option("--level", agg_level)->required();
    aggregate->add_option("--stat", agg_stat, "mean or sum");
    aggregate->add_option("--out", agg_out)->required();

    // exposure
    auto* exposure = app.add_subcommand("exposure", "per-unit exposure surface");
    std::string exp_grid, exp_units, exp_level, exp_pollutant = "pm25";
    std::string exp_units_in = "ug_m3", exp_convert, exp_od, exp_prefix = "08";
    std::string exp_out, exp_geojson;
    bool exp_home_work = false;
    exposure->add_option("--grid", exp_grid)->required();
    exposure->add_option("--units", exp_units)->required();
    exposure->add_option("--level", exp_level)->required();
    exposure->add_option("--pollutant", exp_pollutant);
    exposure->add_option("--units-in", exp_units_in);
    exposure->add_option("--convert-to", exp_convert);
    exposure->add_flag("--home-work", exp_home_work,
                       "blend home and workplace exposure (tract scale)");
    exposure->add_option("--od", exp_od, "LODES OD csv");
    exposure->add_option("--state-prefix", exp_prefix);
    exposure->add_option("--out", exp_out)->required();
    exposure->add_option("--geojson", exp_geojson);

    // attribute
    auto* attribute = app.add_subcommand("attribute", "run one scenario");
    std::string attr_config;
    attribute->add_option("--config", attr_config)->required();

    // sensitivity
    auto* sensitivity =
        app.add_subcommand("sensitivity", "run the scenario sweep");
    std::string sens_config;
    sensitivity->add_option("--config", sens_config)->required();

    // compare
    auto* compare = app.add_subcommand("compare", "compare two results tables");
    std::string cmp_a, cmp_b, cmp_out, cmp_units;
    compare->add_option("--a", cmp_a)->required();
    compare->add_option("--b", cmp_b)->required();
    compare->add_option("--out", cmp_out)->required();
    compare->add_option("--units-out", cmp_units);

    // variance
    auto* variance =
        app.add_subcommand("variance", "variance decomposition of BMR");
    std::string var_in, var_out;
    variance->add_option("--input", var_in, "csv year,geoid,bmr")->required();
    variance->add_option("--out", var_out)->required();

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic test state");
    std::string synth_out;
    std::vector<int> synth_years;
    std::size_t synth_grid_n = 100;
    double synth_unknown = 0.0;
    synth->add_option("--out", synth_out)->required();
    synth->add_option("--years", synth_years);
    synth->add_option("--grid-n", synth_grid_n);
    synth->add_option("--unknown-share", synth_unknown);

    CLI11_PARSE(app, argc, argv);

    try {
        if (aggregate->parsed()) {
            return run_aggregate(agg_grid, agg_units, agg_level, agg_stat,
                                 agg_out, threads);
        }
        if (exposure->parsed()) {
            return run_exposure(exp_grid, exp_units, exp_level, exp_pollutant,
                                exp_units_in, exp_convert, exp_home_work, exp_od,
                                exp_prefix, exp_out, exp_geojson, threads);
        }
        if (attribute->parsed()) return run_attribute(attr_config, threads);
        if (sensitivity->parsed()) return run_sensitivity(sens_config, threads);
        if (compare->parsed()) return run_compare(cmp_a, cmp_b, cmp_out, cmp_units);
        if (variance->parsed()) return run_variance(var_in, var_out);
        if (synth->parsed()) {
            return run_synth(synth_out, seed, synth_years, synth_grid_n,
                             synth_unknown);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
