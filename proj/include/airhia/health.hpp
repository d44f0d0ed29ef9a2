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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airhia/exposure.hpp"
#include "airhia/types.hpp"

namespace airhia {

/// Concentration–response function: relative risk per fixed concentration
/// increment, with 95% CI bounds. `required_units` is the unit the risk was
/// quoted in; the engine converts surfaces or errors, never silently mixes.
struct Crf {
    Pollutant pollutant = Pollutant::PM25;
    Subgroup subgroup = Subgroup::All;
    double increment = 10.0;
    double rr_central = 1.0;
    double rr_low = 1.0;
    double rr_high = 1.0;
    ConcentrationUnits required_units = ConcentrationUnits::UgM3;

    /// Returns warnings (not errors) for CI ordering violations; some
    /// published rows are internally inconsistent and are used as printed.
    std::vector<std::string> validate() const;
};

/// β = ln(rr) / Δ under the log-linear model. Throws for rr <= 0 or Δ <= 0.
double beta_from_rr(double rr, double increment);

struct AttributableDeaths {
    double central = 0.0;
    double low = 0.0;
    double high = 0.0;
};

/// Mort = (1 − e^(−βx)) · BMC for each of the central/low/high risks.
/// Throws on x < 0 or when x_units differ from crf.required_units
/// ("unit mismatch").
AttributableDeaths attributable_mortality(double x, ConcentrationUnits x_units,
                                          double bmc, const Crf& crf);

/// Attributable fraction 1 − e^(−βx).
double attributable_fraction(double x, const Crf& crf);

struct AttributionResult {
    std::string geoid;  // unit id, or cell index at Cell scale
    int year = 0;
    Subgroup subgroup = Subgroup::All;
    Pollutant pollutant = Pollutant::PM25;
    UnitLevel exposure_level = UnitLevel::Tract;
    UnitLevel bmc_level = UnitLevel::Tract;
    CrfMode crf_mode = CrfMode::Single;
    ExposureMetric metric = ExposureMetric::Home;
    double deaths_central = 0.0;
    double deaths_low = 0.0;
    double deaths_high = 0.0;
    double attr_fraction = 0.0;
    std::optional<double> per_10k;
    std::optional<double> pct_of_all_cause;
};

/// unit → subgroup → baseline mortality count, for one year.
using BmcTable = std::map<std::string, std::map<Subgroup, double>>;

struct CrfSet {
    Crf single;
    std::map<Subgroup, Crf> by_subgroup;
};

struct AttributionOptions {
    CrfMode crf_mode = CrfMode::Single;
    UnitLevel exposure_level = UnitLevel::Tract;
    UnitLevel bmc_level = UnitLevel::Tract;
    int year = 0;
    ExposureMetric metric = ExposureMetric::Home;
    /// Unit populations for per-10k rates; pass nullptr to skip them
    /// (block-level and cell-scale runs, where population is coarser than
    /// the unit).
    const std::map<std::string, double>* population = nullptr;
};

struct AttributionRun {
    std::vector<AttributionResult> results;
    std::vector<std::string> skipped_units;  // BMC units without exposure
};

/// Per-unit, per-subgroup attribution over the key intersection of surface
/// and BMC table. Subgroup mode requires a CRF for every subgroup present in
/// the BMC table and throws naming the first missing one.
AttributionRun attribute_surface(const ExposureSurface& surface,
                                 const BmcTable& bmc, const CrfSet& crfs,
                                 const AttributionOptions& options);

/// 100 × deaths / all_cause; nullopt when all_cause is zero.
std::optional<double> percent_attributable(double deaths_central,
                                           double all_cause);

/// 10000 × deaths / population; nullopt when population is zero.
std::optional<double> rate_per_10k(double deaths_central, double population);

/// 100 × (subgroup − single) / single; nullopt when single is zero.
std::optional<double> crf_comparison(double mort_subgroup_crf,
                                     double mort_single_crf);

/// Single CRFs from the systematic reviews: PM2.5 1.06 (1.04, 1.08) per
/// 10 µg/m³; NO2 1.02 (1.01, 1.04) per 10 µg/m³ (the conservative choice).
Crf review_single_crf(Pollutant pollutant);

/// Subgroup-specific hazard ratios from the Medicare cohort studies,
/// including the "All" row used as the single CRF in comparison runs.
/// PM2.5 rows are per 10 µg/m³, NO2 rows per 10 ppbv. The NO2 table has no
/// Native American row.
std::map<Subgroup, Crf> cohort_crfs(Pollutant pollutant);

}  // namespace airhia
