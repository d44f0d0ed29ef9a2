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

#include "airhia/health.hpp"

#include <cmath>
#include <stdexcept>

namespace airhia {

std::vector<std::string> Crf::validate() const {
    std::vector<std::string> warnings;
    if (increment <= 0.0) {
        warnings.push_back("increment must be positive");
    }
    if (rr_central <= 0.0 || rr_low <= 0.0 || rr_high <= 0.0) {
        warnings.push_back("relative risks must be positive");
    }
    // CI ordering violations are published as-is in some sources; warn and
    // use the values as printed.
    if (!(rr_low <= rr_central && rr_central <= rr_high)) {
        warnings.push_back("confidence interval does not bracket the central risk for subgroup " +
                           std::string(to_string(subgroup)));
    }
    return warnings;
}

double beta_from_rr(double rr, double increment) {
    if (rr <= 0.0) {
        throw std::invalid_argument("relative risk must be positive");
    }
    if (increment <= 0.0) {
        throw std::invalid_argument("increment must be positive");
    }
    return std::log(rr) / increment;
}

double attributable_fraction(double x, const Crf& crf) {
    return 1.0 - std::exp(-beta_from_rr(crf.rr_central, crf.increment) * x);
}

AttributableDeaths attributable_mortality(double x, ConcentrationUnits x_units,
                                          double bmc, const Crf& crf) {
    if (x < 0.0) {
        throw std::invalid_argument("concentration must be non-negative");
    }
    if (x_units != crf.required_units) {
        throw std::invalid_argument("unit mismatch");
    }
    if (bmc < 0.0) {
        throw std::invalid_argument("baseline mortality count must be non-negative");
    }
    const auto mort = [&](double rr) {
        return (1.0 - std::exp(-beta_from_rr(rr, crf.increment) * x)) * bmc;
    };
    return {mort(crf.rr_central), mort(crf.rr_low), mort(crf.rr_high)};
}

AttributionRun attribute_surface(const ExposureSurface& surface,
                                 const BmcTable& bmc, const CrfSet& crfs,
                                 const AttributionOptions& options) {
    AttributionRun run;
    for (const auto& [unit, by_subgroup] : bmc) {
        const auto exposure = surface.values.find(unit);
        if (exposure == surface.values.end()) {
            run.skipped_units.push_back(unit);
            continue;
        }
        for (const auto& [subgroup, count] : by_subgroup) {
            const Crf* crf = &crfs.single;
            if (options.crf_mode == CrfMode::Subgroup) {
                const auto found = crfs.by_subgroup.find(subgroup);
                if (found == crfs.by_subgroup.end()) {
                    throw std::runtime_error(
                        "missing CRF for subgroup " +
                        std::string(to_string(subgroup)));
                }
                crf = &found->second;
            }
            AttributionResult result;
            result.geoid = unit;
            result.year = options.year;
            result.subgroup = subgroup;
            result.pollutant = surface.pollutant;
            result.exposure_level = options.exposure_level;
            result.bmc_level = options.bmc_level;
            result.crf_mode = options.crf_mode;
            result.metric = options.metric;
            const AttributableDeaths deaths =
                attributable_mortality(exposure->second, surface.units, count, *crf);
            result.deaths_central = deaths.central;
            result.deaths_low = deaths.low;
            result.deaths_high = deaths.high;
            result.attr_fraction = attributable_fraction(exposure->second, *crf);
            result.pct_of_all_cause =
                percent_attributable(deaths.central, count);
            if (options.population != nullptr) {
                const auto pop = options.population->find(unit);
                if (pop != options.population->end()) {
                    result.per_10k = rate_per_10k(deaths.central, pop->second);
                }
            }
            run.results.push_back(std::move(result));
        }
    }
    return run;
}

std::optional<double> percent_attributable(double deaths_central,
                                           double all_cause) {
    if (all_cause == 0.0) return std::nullopt;
    return 100.0 * deaths_central / all_cause;
}

std::optional<double> rate_per_10k(double deaths_central, double population) {
    if (population == 0.0) return std::nullopt;
    return 10000.0 * deaths_central / population;
}

std::optional<double> crf_comparison(double mort_subgroup_crf,
                                     double mort_single_crf) {
    if (mort_single_crf == 0.0) return std::nullopt;
    return 100.0 * (mort_subgroup_crf - mort_single_crf) / mort_single_crf;
}

Crf review_single_crf(Pollutant pollutant) {
    Crf crf;
    crf.pollutant = pollutant;
    crf.subgroup = Subgroup::All;
    crf.increment = 10.0;
    crf.required_units = ConcentrationUnits::UgM3;
    if (pollutant == Pollutant::PM25) {
        crf.rr_central = 1.06;
        crf.rr_low = 1.04;
        crf.rr_high = 1.08;
    } else {
        // The conservative of the two published NO2 reviews.
        crf.rr_central = 1.02;
        crf.rr_low = 1.01;
        crf.rr_high = 1.04;
    }
    return crf;
}

std::map<Subgroup, Crf> cohort_crfs(Pollutant pollutant) {
    const auto make = [&](Subgroup subgroup, double central, double low,
                          double high) {
        Crf crf;
        crf.pollutant = pollutant;
        crf.subgroup = subgroup;
        crf.increment = 10.0;
        crf.rr_central = central;
        crf.rr_low = low;
        crf.rr_high = high;
        crf.required_units = pollutant == Pollutant::PM25
                                 ? ConcentrationUnits::UgM3
                                 : ConcentrationUnits::Ppbv;
        return crf;
    };
    std::map<Subgroup, Crf> table;
    if (pollutant == Pollutant::PM25) {
        table.emplace(Subgroup::All, make(Subgroup::All, 1.073, 1.071, 1.075));
        table.emplace(Subgroup::WhiteNH, make(Subgroup::WhiteNH, 1.063, 1.060, 1.065));
        table.emplace(Subgroup::BlackNH, make(Subgroup::BlackNH, 1.208, 1.199, 1.217));
        table.emplace(Subgroup::HispanicAll,
                      make(Subgroup::HispanicAll, 1.096, 1.075, 1.117));
        table.emplace(Subgroup::AsianPacificNH,
                      make(Subgroup::AsianPacificNH, 1.116, 1.100, 1.133));
        table.emplace(Subgroup::AmericanIndianNH,
                      make(Subgroup::AmericanIndianNH, 1.100, 1.060, 1.140));
    } else {
        table.emplace(Subgroup::All, make(Subgroup::All, 1.06, 1.06, 1.07));
        table.emplace(Subgroup::WhiteNH, make(Subgroup::WhiteNH, 1.08, 1.08, 1.09));
        table.emplace(Subgroup::BlackNH, make(Subgroup::BlackNH, 1.13, 1.13, 1.14));
        table.emplace(Subgroup::HispanicAll,
                      make(Subgroup::HispanicAll, 1.02, 1.01, 1.03));
        // Published as printed; the CI does not bracket the central risk.
        table.emplace(Subgroup::AsianPacificNH,
                      make(Subgroup::AsianPacificNH, 1.05, 1.01, 1.03));
    }
    return table;
}

}  // namespace airhia
