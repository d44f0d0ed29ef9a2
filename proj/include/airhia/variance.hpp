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

#include <array>
#include <optional>
#include <span>
#include <string>

#include "airhia/geo.hpp"

namespace airhia {

struct BmrObservation {
    int year = 0;
    GeoId block;  // implies county/tract/block-group via prefixes
    double bmr = 0.0;
};

/// Order of the five named variance components.
enum class VarianceLevel { Year = 0, County, Tract, BlockGroup, Block };

inline constexpr std::array<const char*, 5> kVarianceLevelNames = {
    "year", "county", "tract", "block_group", "block"};

struct VarianceDecomposition {
    /// Year, County, Tract, BlockGroup, Block.
    std::array<double, 5> components{};
    double residual_variance = 0.0;
    /// Percent of the five-component total (residual excluded from the
    /// denominator); absent when the total variance is zero.
    std::optional<std::array<double, 5>> proportions_pct;
    int iterations = 0;
    bool converged = false;
    bool zero_total_variance = false;
};

struct DecomposeOptions {
    double relative_tolerance = 1e-8;
    int max_iterations = 500;
};

/// Variance components of the random-intercept model
///   y = μ + u_year + u_county + u_tract + u_bg + u_block + ε
/// with year crossed against the nested spatial chain, estimated by EM.
/// With one observation per block-year the block×year interaction is
/// confounded with ε and folded into it. Components that shrink through
/// 1e-4 of the total variance sit on the zero boundary (where EM decays
/// sublinearly) and are pinned to zero. Throws
/// std::invalid_argument("unidentifiable component") for a single distinct
/// year or block.
VarianceDecomposition decompose(std::span<const BmrObservation> observations,
                                const DecomposeOptions& options = {});

}  // namespace airhia
