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

#include <optional>
#include <string>
#include <string_view>

namespace airhia {

/// Census unit levels, plus Cell for native-grid-resolution analyses.
/// Block < BlockGroup < Tract < County < State in the "coarser than"
/// ordering; Cell is incomparable.
enum class UnitLevel { Block, BlockGroup, Tract, County, State, Cell };

/// Race/ethnicity categories used by the mortality data.
enum class Subgroup {
    WhiteNH,
    HispanicAll,
    BlackNH,
    AsianPacificNH,
    AmericanIndianNH,
    OtherNH,
    Unknown,
    All,
};

enum class Pollutant { PM25, NO2 };

enum class ConcentrationUnits { UgM3, Ppbv };

enum class CrfMode { Single, Subgroup };

enum class ExposureMetric { Home, HomeWork };

/// Digit count of a FIPS identifier at the given level; nullopt for Cell.
std::optional<std::size_t> level_digit_length(UnitLevel level);

/// True when `a` is strictly coarser than `b` (County coarser than Tract).
/// Throws std::invalid_argument if either side is Cell.
bool is_coarser(UnitLevel a, UnitLevel b);

std::string_view to_string(UnitLevel level);
std::string_view to_string(Subgroup subgroup);
std::string_view to_string(Pollutant pollutant);
std::string_view to_string(ConcentrationUnits units);
std::string_view to_string(CrfMode mode);
std::string_view to_string(ExposureMetric metric);

// Case-insensitive parsers. parse_subgroup never fails: labels outside the
// vocabulary map to Subgroup::Unknown and set *recognized to false.
std::optional<UnitLevel> parse_unit_level(std::string_view text);
Subgroup parse_subgroup(std::string_view text, bool* recognized = nullptr);
std::optional<Pollutant> parse_pollutant(std::string_view text);
std::optional<ConcentrationUnits> parse_units(std::string_view text);
std::optional<CrfMode> parse_crf_mode(std::string_view text);
std::optional<ExposureMetric> parse_exposure_metric(std::string_view text);

}  // namespace airhia
