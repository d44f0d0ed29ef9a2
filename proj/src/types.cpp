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

#include "airhia/types.hpp"

#include <stdexcept>

#include "airhia/util.hpp"

namespace airhia {

std::optional<std::size_t> level_digit_length(UnitLevel level) {
    switch (level) {
        case UnitLevel::State: return 2;
        case UnitLevel::County: return 5;
        case UnitLevel::Tract: return 11;
        case UnitLevel::BlockGroup: return 12;
        case UnitLevel::Block: return 15;
        case UnitLevel::Cell: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

// Rank in the fine-to-coarse order; Cell has none.
int coarseness_rank(UnitLevel level) {
    switch (level) {
        case UnitLevel::Block: return 0;
        case UnitLevel::BlockGroup: return 1;
        case UnitLevel::Tract: return 2;
        case UnitLevel::County: return 3;
        case UnitLevel::State: return 4;
        case UnitLevel::Cell:
            throw std::invalid_argument(
                "cell level is not comparable in the census hierarchy");
    }
    throw std::invalid_argument("unknown unit level");
}

}  // namespace

bool is_coarser(UnitLevel a, UnitLevel b) {
    return coarseness_rank(a) > coarseness_rank(b);
}

std::string_view to_string(UnitLevel level) {
    switch (level) {
        case UnitLevel::Block: return "block";
        case UnitLevel::BlockGroup: return "blockgroup";
        case UnitLevel::Tract: return "tract";
        case UnitLevel::County: return "county";
        case UnitLevel::State: return "state";
        case UnitLevel::Cell: return "cell";
    }
    return "?";
}

std::string_view to_string(Subgroup subgroup) {
    switch (subgroup) {
        case Subgroup::WhiteNH: return "whitenh";
        case Subgroup::HispanicAll: return "hispanicall";
        case Subgroup::BlackNH: return "blacknh";
        case Subgroup::AsianPacificNH: return "asianpacificnh";
        case Subgroup::AmericanIndianNH: return "americanindiannh";
        case Subgroup::OtherNH: return "othernh";
        case Subgroup::Unknown: return "unknown";
        case Subgroup::All: return "all";
    }
    return "?";
}

std::string_view to_string(Pollutant pollutant) {
    return pollutant == Pollutant::PM25 ? "pm25" : "no2";
}

std::string_view to_string(ConcentrationUnits units) {
    return units == ConcentrationUnits::UgM3 ? "ug_m3" : "ppbv";
}

std::string_view to_string(CrfMode mode) {
    return mode == CrfMode::Single ? "single" : "subgroup";
}

std::string_view to_string(ExposureMetric metric) {
    return metric == ExposureMetric::Home ? "home" : "homework";
}

std::optional<UnitLevel> parse_unit_level(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "block") return UnitLevel::Block;
    if (t == "blockgroup" || t == "block_group") return UnitLevel::BlockGroup;
    if (t == "tract") return UnitLevel::Tract;
    if (t == "county") return UnitLevel::County;
    if (t == "state") return UnitLevel::State;
    if (t == "cell") return UnitLevel::Cell;
    return std::nullopt;
}

Subgroup parse_subgroup(std::string_view text, bool* recognized) {
    const std::string t = to_lower(trim(text));
    if (recognized) *recognized = true;
    if (t == "whitenh") return Subgroup::WhiteNH;
    if (t == "hispanicall") return Subgroup::HispanicAll;
    if (t == "blacknh") return Subgroup::BlackNH;
    if (t == "asianpacificnh") return Subgroup::AsianPacificNH;
    if (t == "americanindiannh") return Subgroup::AmericanIndianNH;
    if (t == "othernh") return Subgroup::OtherNH;
    if (t == "unknown") return Subgroup::Unknown;
    if (t == "all") return Subgroup::All;
    if (recognized) *recognized = false;
    return Subgroup::Unknown;
}

std::optional<Pollutant> parse_pollutant(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "pm25" || t == "pm2.5") return Pollutant::PM25;
    if (t == "no2") return Pollutant::NO2;
    return std::nullopt;
}

std::optional<ConcentrationUnits> parse_units(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "ug_m3" || t == "ugm3" || t == "ug/m3") {
        return ConcentrationUnits::UgM3;
    }
    if (t == "ppbv") return ConcentrationUnits::Ppbv;
    return std::nullopt;
}

std::optional<CrfMode> parse_crf_mode(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "single") return CrfMode::Single;
    if (t == "subgroup") return CrfMode::Subgroup;
    return std::nullopt;
}

std::optional<ExposureMetric> parse_exposure_metric(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "home") return ExposureMetric::Home;
    if (t == "homework" || t == "home_work") return ExposureMetric::HomeWork;
    return std::nullopt;
}

}  // namespace airhia
