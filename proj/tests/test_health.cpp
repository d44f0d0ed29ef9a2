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

#include "airhia/health.hpp"

using namespace airhia;

namespace {

Crf pm_crf(double central, double low, double high) {
    Crf crf;
    crf.pollutant = Pollutant::PM25;
    crf.increment = 10.0;
    crf.rr_central = central;
    crf.rr_low = low;
    crf.rr_high = high;
    crf.required_units = ConcentrationUnits::UgM3;
    return crf;
}

ExposureSurface uniform_surface(double x, UnitLevel level,
                                const std::vector<std::string>& units) {
    ExposureSurface surface;
    surface.pollutant = Pollutant::PM25;
    surface.units = ConcentrationUnits::UgM3;
    surface.level = level;
    for (const auto& id : units) surface.values[id] = x;
    return surface;
}

}  // namespace

TEST_CASE("beta_from_rr against the logarithm oracle") {
    CHECK(beta_from_rr(1.0, 10.0) == 0.0);
    CHECK(std::abs(beta_from_rr(1.06, 10.0) - 0.0058268908) < 1e-10);
    CHECK(beta_from_rr(1.073, 10.0) == std::log(1.073) / 10.0);
    CHECK(std::abs(beta_from_rr(1.073, 10.0) - 0.0070458464) < 1e-10);
    CHECK(beta_from_rr(1.06, 10.0) == std::log(1.06) / 10.0);
    CHECK_THROWS_AS(beta_from_rr(0.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_from_rr(-1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_from_rr(1.06, 0.0), std::invalid_argument);
}

TEST_CASE("attributable_mortality closed forms") {
    SUBCASE("zero exposure attributes nothing") {
        const auto deaths = attributable_mortality(
            0.0, ConcentrationUnits::UgM3, 1234.0, pm_crf(1.06, 1.04, 1.08));
        CHECK(deaths.central == 0.0);
        CHECK(deaths.low == 0.0);
        CHECK(deaths.high == 0.0);
    }
    SUBCASE("x equal to the increment gives 1 - 1/rr of the baseline") {
        const auto deaths = attributable_mortality(
            10.0, ConcentrationUnits::UgM3, 1000.0, pm_crf(1.06, 1.04, 1.08));
        CHECK(std::abs(deaths.central - 56.6038) < 1e-3);
        CHECK(deaths.central ==
              doctest::Approx((1.0 - 1.0 / 1.06) * 1000.0).epsilon(1e-12));
    }
    SUBCASE("published cohort risk at the published mean exposure") {
        const auto deaths = attributable_mortality(
            7.1, ConcentrationUnits::UgM3, 100.0, pm_crf(1.073, 1.071, 1.075));
        CHECK(std::abs(deaths.central - 4.8795) < 1e-4);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(attributable_mortality(-1.0, ConcentrationUnits::UgM3,
                                               100.0, pm_crf(1.06, 1.04, 1.08)),
                        std::invalid_argument);
        CHECK_THROWS_WITH_AS(
            attributable_mortality(1.0, ConcentrationUnits::Ppbv, 100.0,
                                   pm_crf(1.06, 1.04, 1.08)),
            "unit mismatch", std::invalid_argument);
    }
}

TEST_CASE("attribution invariants") {
    const Crf crf = pm_crf(1.06, 1.04, 1.08);

    SUBCASE("strictly increasing in x, rr; linear in BMC") {
        double previous = -1.0;
        for (double x = 0.0; x <= 40.0; x += 2.5) {
            const double value =
                attributable_mortality(x, ConcentrationUnits::UgM3, 100.0, crf)
                    .central;
            CHECK(value > previous);
            previous = value;
        }
        CHECK(attributable_mortality(5.0, ConcentrationUnits::UgM3, 100.0,
                                     pm_crf(1.10, 1.10, 1.10))
                  .central >
              attributable_mortality(5.0, ConcentrationUnits::UgM3, 100.0,
                                     pm_crf(1.05, 1.05, 1.05))
                  .central);
        const double unit_bmc =
            attributable_mortality(5.0, ConcentrationUnits::UgM3, 1.0, crf).central;
        CHECK(attributable_mortality(5.0, ConcentrationUnits::UgM3, 250.0, crf)
                  .central == doctest::Approx(250.0 * unit_bmc).epsilon(1e-12));
    }
    SUBCASE("confidence interval ordering") {
        for (double x : {0.0, 0.5, 3.0, 12.0, 80.0}) {
            const auto deaths =
                attributable_mortality(x, ConcentrationUnits::UgM3, 100.0, crf);
            CHECK(deaths.low <= deaths.central);
            CHECK(deaths.central <= deaths.high);
        }
    }
    SUBCASE("attributable fraction stays in [0, 1)") {
        for (double x : {0.0, 1.0, 10.0, 1000.0}) {
            const double fraction = attributable_fraction(x, crf);
            CHECK(fraction >= 0.0);
            CHECK(fraction < 1.0);
        }
    }
    SUBCASE("small-x linearization") {
        const double beta = beta_from_rr(1.06, 10.0);
        for (double x : {0.001, 0.01, 0.5, 1.0}) {
            if (beta * x >= 0.01) continue;
            const double exact =
                attributable_mortality(x, ConcentrationUnits::UgM3, 1000.0, crf)
                    .central;
            const double linear = beta * x * 1000.0;
            CHECK(std::abs(exact - linear) / exact < 0.005);
        }
    }
}

TEST_CASE("Jensen direction under BMC-weighted aggregation") {
    const Crf crf = pm_crf(1.073, 1.071, 1.075);
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> ux(0.0, 25.0);
    std::uniform_real_distribution<double> ub(0.0, 200.0);
    for (int trial = 0; trial < 50; ++trial) {
        double fine_total = 0.0;
        double weighted_x = 0.0;
        double bmc_total = 0.0;
        for (int i = 0; i < 30; ++i) {
            const double x = ux(rng);
            const double bmc = ub(rng);
            fine_total +=
                attributable_mortality(x, ConcentrationUnits::UgM3, bmc, crf)
                    .central;
            weighted_x += x * bmc;
            bmc_total += bmc;
        }
        if (bmc_total == 0.0) continue;
        const double coarse_total =
            attributable_mortality(weighted_x / bmc_total,
                                   ConcentrationUnits::UgM3, bmc_total, crf)
                .central;
        CHECK(fine_total <= coarse_total * (1.0 + 1e-12));
    }
}

TEST_CASE("attribute_surface") {
    const std::vector<std::string> units = {"08001000001", "08001000002"};
    CrfSet crfs;
    crfs.by_subgroup = cohort_crfs(Pollutant::PM25);
    crfs.single = crfs.by_subgroup.at(Subgroup::All);

    AttributionOptions options;
    options.exposure_level = UnitLevel::Tract;
    options.bmc_level = UnitLevel::Tract;
    options.year = 2000;

    SUBCASE("single vs subgroup ratios at the published uniform exposure") {
        const ExposureSurface surface =
            uniform_surface(7.1, UnitLevel::Tract, units);
        BmcTable bmc;
        bmc["08001000001"][Subgroup::BlackNH] = 1000.0;
        bmc["08001000001"][Subgroup::WhiteNH] = 1000.0;

        options.crf_mode = CrfMode::Single;
        const auto single = attribute_surface(surface, bmc, crfs, options);
        options.crf_mode = CrfMode::Subgroup;
        const auto subgroup = attribute_surface(surface, bmc, crfs, options);

        REQUIRE(single.results.size() == 2);
        REQUIRE(subgroup.results.size() == 2);
        // Results are ordered by (unit, subgroup); WhiteNH enum precedes
        // BlackNH.
        const double single_white = single.results[0].deaths_central;
        const double single_black = single.results[1].deaths_central;
        const double subgroup_white = subgroup.results[0].deaths_central;
        const double subgroup_black = subgroup.results[1].deaths_central;
        CHECK(single.results[0].subgroup == Subgroup::WhiteNH);
        CHECK(std::abs(single_white / subgroup_white - 1.1493) < 1e-3);
        CHECK(std::abs(single_black / subgroup_black - 0.3887) < 1e-3);
    }
    SUBCASE("constant exposure collapses scales") {
        const ExposureSurface surface =
            uniform_surface(6.0, UnitLevel::Tract, units);
        BmcTable fine;
        fine[units[0]][Subgroup::All] = 120.0;
        fine[units[1]][Subgroup::All] = 80.0;
        BmcTable coarse;
        coarse["08001"][Subgroup::All] = 200.0;

        options.crf_mode = CrfMode::Single;
        const auto fine_run = attribute_surface(surface, fine, crfs, options);
        const ExposureSurface county_surface =
            uniform_surface(6.0, UnitLevel::County, {"08001"});
        const auto coarse_run =
            attribute_surface(county_surface, coarse, crfs, options);
        double fine_total = 0.0;
        for (const auto& row : fine_run.results) fine_total += row.deaths_central;
        CHECK(fine_total ==
              doctest::Approx(coarse_run.results[0].deaths_central)
                  .epsilon(1e-12));
    }
    SUBCASE("missing subgroup CRF is an error naming the subgroup") {
        const ExposureSurface surface =
            uniform_surface(5.0, UnitLevel::Tract, units);
        BmcTable bmc;
        bmc[units[0]][Subgroup::OtherNH] = 10.0;
        options.crf_mode = CrfMode::Subgroup;
        CHECK_THROWS_WITH_AS(attribute_surface(surface, bmc, crfs, options),
                             "missing CRF for subgroup othernh",
                             std::runtime_error);
    }
    SUBCASE("BMC units without exposure are skipped and tallied") {
        const ExposureSurface surface =
            uniform_surface(5.0, UnitLevel::Tract, {units[0]});
        BmcTable bmc;
        bmc[units[0]][Subgroup::All] = 10.0;
        bmc[units[1]][Subgroup::All] = 10.0;
        options.crf_mode = CrfMode::Single;
        const auto run = attribute_surface(surface, bmc, crfs, options);
        CHECK(run.results.size() == 1);
        REQUIRE(run.skipped_units.size() == 1);
        CHECK(run.skipped_units[0] == units[1]);
    }
    SUBCASE("per-10k rates appear when populations are supplied") {
        const ExposureSurface surface =
            uniform_surface(5.0, UnitLevel::Tract, {units[0]});
        BmcTable bmc;
        bmc[units[0]][Subgroup::All] = 100.0;
        const std::map<std::string, double> population{{units[0], 20000.0}};
        options.crf_mode = CrfMode::Single;
        options.population = &population;
        const auto run = attribute_surface(surface, bmc, crfs, options);
        REQUIRE(run.results[0].per_10k.has_value());
        CHECK(*run.results[0].per_10k ==
              doctest::Approx(run.results[0].deaths_central / 2.0));
    }
}

TEST_CASE("reporting metrics") {
    SUBCASE("percent_attributable") {
        CHECK(*percent_attributable(50.0, 1000.0) == doctest::Approx(5.0));
        CHECK(*percent_attributable(0.0, 1000.0) == 0.0);
        CHECK(*percent_attributable(1000.0, 1000.0) == 100.0);
        CHECK_FALSE(percent_attributable(5.0, 0.0).has_value());
    }
    SUBCASE("rate_per_10k") {
        CHECK(*rate_per_10k(5.0, 10000.0) == doctest::Approx(5.0));
        CHECK(*rate_per_10k(0.0, 10000.0) == 0.0);
        CHECK(*rate_per_10k(2.0, 5000.0) == doctest::Approx(4.0));
        CHECK_FALSE(rate_per_10k(5.0, 0.0).has_value());
    }
    SUBCASE("crf_comparison") {
        CHECK(*crf_comparison(10.0, 10.0) == 0.0);
        CHECK(*crf_comparison(140.0, 55.0) == doctest::Approx(154.5).epsilon(1e-3));
        CHECK(*crf_comparison(973.0, 1118.0) ==
              doctest::Approx(-12.97).epsilon(1e-3));
        CHECK_FALSE(crf_comparison(1.0, 0.0).has_value());
    }
}

TEST_CASE("built-in CRF tables") {
    const Crf pm_single = review_single_crf(Pollutant::PM25);
    CHECK(pm_single.rr_central == 1.06);
    CHECK(pm_single.required_units == ConcentrationUnits::UgM3);

    const Crf no2_single = review_single_crf(Pollutant::NO2);
    CHECK(no2_single.rr_central == 1.02);
    CHECK(no2_single.required_units == ConcentrationUnits::UgM3);

    const auto pm_table = cohort_crfs(Pollutant::PM25);
    CHECK(pm_table.at(Subgroup::All).rr_central == 1.073);
    CHECK(pm_table.at(Subgroup::BlackNH).rr_central == 1.208);
    CHECK(pm_table.count(Subgroup::AmericanIndianNH) == 1);

    const auto no2_table = cohort_crfs(Pollutant::NO2);
    CHECK(no2_table.at(Subgroup::All).required_units == ConcentrationUnits::Ppbv);
    CHECK(no2_table.count(Subgroup::AmericanIndianNH) == 0);
    // The published Asian NO2 interval does not bracket its central value;
    // the loader warns and keeps the values as printed.
    CHECK_FALSE(no2_table.at(Subgroup::AsianPacificNH).validate().empty());
    CHECK(no2_table.at(Subgroup::BlackNH).validate().empty());
}
