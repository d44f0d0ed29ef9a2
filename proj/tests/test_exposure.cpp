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

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "airhia/exposure.hpp"

using namespace airhia;

namespace {

Ring square_ring(double x0, double y0, double w, double h) {
    return {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}, {x0, y0}};
}

ExposureSurface tract_surface(std::map<std::string, double> values) {
    ExposureSurface surface;
    surface.pollutant = Pollutant::NO2;
    surface.units = ConcentrationUnits::Ppbv;
    surface.level = UnitLevel::Tract;
    surface.values = std::move(values);
    return surface;
}

OdMatrix od_matrix(
    std::map<std::pair<std::string, std::string>, double> flows) {
    OdMatrix od;
    od.flows = std::move(flows);
    return od;
}

const std::string kTractA = "08001000001";
const std::string kTractB = "08001000002";
const std::string kTractC = "08001000003";

}  // namespace

TEST_CASE("build_surface") {
    Grid grid;
    grid.layout.n_cols = 4;
    grid.layout.n_rows = 4;

    UnitRegistry registry;
    registry.level = UnitLevel::Tract;
    registry.units[kTractA].polygon = make_polygon(square_ring(0, 0, 2, 2));
    registry.units[kTractB].polygon = make_polygon(square_ring(2, 2, 2, 2));

    SUBCASE("constant grid assigns the constant everywhere") {
        grid.values.assign(16, 3.25);
        const SurfaceBuild build = build_surface(
            grid, registry, Pollutant::PM25, ConcentrationUnits::UgM3, 2000);
        CHECK(build.surface.values.at(kTractA) == 3.25);
        CHECK(build.surface.values.at(kTractB) == 3.25);
        CHECK(build.omitted_units.empty());
        CHECK(build.surface.level == UnitLevel::Tract);
    }
    SUBCASE("unit outside the extent is omitted and tallied") {
        grid.values.assign(16, 1.0);
        registry.units["08001000099"].polygon =
            make_polygon(square_ring(50, 50, 2, 2));
        const SurfaceBuild build = build_surface(
            grid, registry, Pollutant::PM25, ConcentrationUnits::UgM3, 2000);
        CHECK(build.surface.values.size() == 2);
        REQUIRE(build.omitted_units.size() == 1);
        CHECK(build.omitted_units[0] == "08001000099");
    }
    SUBCASE("empty registry is an error") {
        grid.values.assign(16, 1.0);
        UnitRegistry empty;
        CHECK_THROWS_AS(build_surface(grid, empty, Pollutant::PM25,
                                      ConcentrationUnits::UgM3, 2000),
                        std::invalid_argument);
    }
}

TEST_CASE("surface_from_grid keys non-nodata cells by index") {
    Grid grid;
    grid.layout.n_cols = 2;
    grid.layout.n_rows = 2;
    grid.values = {1.5, -9999.0, 2.5, 3.5};
    const ExposureSurface surface =
        surface_from_grid(grid, Pollutant::NO2, ConcentrationUnits::Ppbv, 2015);
    CHECK(surface.level == UnitLevel::Cell);
    CHECK(surface.values.size() == 3);
    CHECK(surface.values.at("0") == 1.5);
    CHECK(surface.values.count("1") == 0);
    CHECK(surface.values.at("3") == 3.5);
}

TEST_CASE("convert_units") {
    ExposureSurface surface = tract_surface({{kTractA, 10.0}, {kTractB, 0.0}});

    SUBCASE("ppbv to µg/m³ is exactly the 1.88 factor") {
        const ExposureSurface mass =
            convert_units(surface, ConcentrationUnits::UgM3);
        CHECK(mass.values.at(kTractA) == 18.8);
        CHECK(mass.values.at(kTractB) == 0.0);
        CHECK(mass.units == ConcentrationUnits::UgM3);
    }
    SUBCASE("published table value") {
        surface.values[kTractA] = 17.2;
        const ExposureSurface mass =
            convert_units(surface, ConcentrationUnits::UgM3);
        CHECK(mass.values.at(kTractA) == doctest::Approx(32.336).epsilon(1e-15));
    }
    SUBCASE("round trip is identity within 1e-12") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uv(0.0, 60.0);
        std::map<std::string, double> values;
        for (int i = 0; i < 50; ++i) {
            values["0800100" + std::to_string(1000 + i)] = uv(rng);
        }
        const ExposureSurface original = tract_surface(values);
        const ExposureSurface round_tripped = convert_units(
            convert_units(original, ConcentrationUnits::UgM3),
            ConcentrationUnits::Ppbv);
        for (const auto& [id, value] : original.values) {
            CHECK(round_tripped.values.at(id) ==
                  doctest::Approx(value).epsilon(1e-12));
        }
    }
    SUBCASE("PM2.5 cannot be expressed in ppbv") {
        ExposureSurface pm;
        pm.pollutant = Pollutant::PM25;
        pm.units = ConcentrationUnits::UgM3;
        pm.values[kTractA] = 5.0;
        CHECK_THROWS_WITH_AS(convert_units(pm, ConcentrationUnits::Ppbv),
                             "unit mismatch", std::invalid_argument);
    }
}

TEST_CASE("population_weighted_mean") {
    const ExposureSurface surface =
        tract_surface({{kTractA, 5.0}, {kTractB, 10.0}, {kTractC, 9.0}});

    SUBCASE("hand-computed weighting") {
        const WeightedMean mean = population_weighted_mean(
            surface, {{kTractA, 1.0}, {kTractB, 3.0}});
        CHECK(mean.value == doctest::Approx(8.75));
        CHECK(mean.total_weight == 4.0);
    }
    SUBCASE("equal weights give the arithmetic mean") {
        ExposureSurface two = tract_surface({{kTractA, 4.0}, {kTractB, 6.0}});
        const WeightedMean mean = population_weighted_mean(
            two, {{kTractA, 2.5}, {kTractB, 2.5}});
        CHECK(mean.value == doctest::Approx(5.0));
    }
    SUBCASE("single unit is the identity") {
        const WeightedMean mean =
            population_weighted_mean(surface, {{kTractC, 17.0}});
        CHECK(mean.value == 9.0);
    }
    SUBCASE("zero total weight is an error") {
        CHECK_THROWS_WITH_AS(
            population_weighted_mean(surface, {{kTractA, 0.0}}),
            "no population", std::invalid_argument);
    }
    SUBCASE("result lies within the surface range") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> uw(0.0, 5.0);
        const std::map<std::string, double> weights{
            {kTractA, uw(rng)}, {kTractB, uw(rng)}, {kTractC, uw(rng) + 0.1}};
        const WeightedMean mean = population_weighted_mean(surface, weights);
        CHECK(mean.value >= 5.0);
        CHECK(mean.value <= 10.0);
    }
}

TEST_CASE("workplace_component") {
    const ExposureSurface surface =
        tract_surface({{kTractA, 10.0}, {kTractB, 20.0}, {kTractC, 7.0}});

    SUBCASE("everyone works at home") {
        const WorkplaceComponent component = workplace_component(
            surface, od_matrix({{{kTractA, kTractA}, 12.0}}));
        CHECK(component.values.at(kTractA) == 10.0);
    }
    SUBCASE("weighted mean across work tracts") {
        const WorkplaceComponent component = workplace_component(
            surface, od_matrix({{{kTractC, kTractA}, 1.0},
                                {{kTractC, kTractB}, 3.0}}));
        CHECK(component.values.at(kTractC) == doctest::Approx(17.5));
    }
    SUBCASE("tract absent from the OD data is absent from the result") {
        const WorkplaceComponent component = workplace_component(
            surface, od_matrix({{{kTractA, kTractB}, 2.0}}));
        CHECK(component.values.count(kTractC) == 0);
    }
}

TEST_CASE("home_work_surface") {
    SUBCASE("equal home and work concentrations are a fixed point") {
        const ExposureSurface surface =
            tract_surface({{kTractA, 10.0}, {kTractB, 10.0}});
        const HomeWorkBuild build = home_work_surface(
            surface, od_matrix({{{kTractA, kTractB}, 5.0},
                                {{kTractB, kTractA}, 5.0}}));
        CHECK(build.surface.values.at(kTractA) == doctest::Approx(10.0));
    }
    SUBCASE("published time weights") {
        const ExposureSurface surface =
            tract_surface({{kTractA, 10.0}, {kTractB, 20.0}});
        const HomeWorkBuild build = home_work_surface(
            surface, od_matrix({{{kTractA, kTractB}, 4.0}}));
        CHECK(build.surface.values.at(kTractA) ==
              doctest::Approx(12.06).epsilon(1e-14));
    }
    SUBCASE("tract with no OD rows is omitted") {
        const ExposureSurface surface =
            tract_surface({{kTractA, 10.0}, {kTractB, 20.0}});
        const HomeWorkBuild build = home_work_surface(
            surface, od_matrix({{{kTractA, kTractA}, 4.0}}));
        CHECK(build.surface.values.count(kTractB) == 0);
        REQUIRE(build.omitted.size() == 1);
        CHECK(build.omitted[0] == kTractB);
    }
}

TEST_CASE("home-work blend properties") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uc(2.0, 30.0);
    std::uniform_real_distribution<double> uw(0.0, 50.0);

    // Random tract surface and OD matrix.
    std::map<std::string, double> concentrations;
    std::vector<std::string> tracts;
    for (int i = 0; i < 24; ++i) {
        std::string id = "080010000" + std::to_string(10 + i);
        concentrations[id] = uc(rng);
        tracts.push_back(std::move(id));
    }
    std::map<std::pair<std::string, std::string>, double> flows;
    for (const auto& home : tracts) {
        for (int k = 0; k < 4; ++k) {
            const auto& work = tracts[static_cast<std::size_t>(
                std::uniform_int_distribution<int>(0, 23)(rng))];
            flows[{home, work}] += std::floor(uw(rng));
        }
    }
    const ExposureSurface surface = tract_surface(concentrations);
    const OdMatrix od = od_matrix(flows);
    const HomeWorkBuild build = home_work_surface(surface, od);
    const WorkplaceComponent workplace = workplace_component(surface, od);

    SUBCASE("aggregation identity via the OD marginals") {
        std::map<std::string, double> home_workers;
        std::map<std::string, double> work_workers;
        double all_workers = 0.0;
        for (const auto& [pair, workers] : od.flows) {
            home_workers[pair.first] += workers;
            work_workers[pair.second] += workers;
            all_workers += workers;
        }
        double hw_mean = 0.0;
        double home_mean = 0.0;
        for (const auto& [id, p] : home_workers) {
            hw_mean += build.surface.values.at(id) * p;
            home_mean += surface.values.at(id) * p;
        }
        double work_mean = 0.0;
        for (const auto& [id, p] : work_workers) {
            work_mean += surface.values.at(id) * p;
        }
        hw_mean /= all_workers;
        home_mean /= all_workers;
        work_mean /= all_workers;
        const double expected =
            kHomeTimeShare * home_mean + kWorkTimeShare * work_mean;
        CHECK(hw_mean == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("betweenness of the blend") {
        for (const auto& [id, hw] : build.surface.values) {
            const double home = surface.values.at(id);
            const double work = workplace.values.at(id);
            CHECK(hw >= std::min(home, work) - 1e-12);
            CHECK(hw <= std::max(home, work) + 1e-12);
        }
    }
}
