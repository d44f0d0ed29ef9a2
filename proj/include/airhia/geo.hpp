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

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "airhia/geometry.hpp"
#include "airhia/types.hpp"

namespace airhia {

/// FIPS identifier in the block → block-group → tract → county → state
/// hierarchy. Digits only; length determines the level (15/12/11/5/2).
/// The first 12 digits of a block form its block group, the first 11 its
/// tract, and so on.
class GeoId {
public:
    /// Throws std::invalid_argument on non-digit characters or a length
    /// outside {2, 5, 11, 12, 15}.
    explicit GeoId(std::string digits);

    static std::optional<GeoId> try_parse(std::string digits);

    UnitLevel level() const { return level_; }
    const std::string& str() const { return digits_; }

    /// Prefix truncation to a coarser level; the same level is an identity.
    /// Throws std::invalid_argument("cannot refine") when target is finer.
    GeoId parent(UnitLevel target) const;

    friend bool operator==(const GeoId&, const GeoId&) = default;
    friend auto operator<=>(const GeoId& a, const GeoId& b) {
        return a.digits_ <=> b.digits_;
    }

private:
    std::string digits_;
    UnitLevel level_;
};

struct UnitRecord {
    Polygon polygon;
    std::optional<double> population;
    std::map<std::string, double> attrs;  // extra numeric properties
    std::string geometry_json;  // original GeoJSON geometry, echoed on export
};

/// Immutable collection of census units at one level. `vintage` is an
/// optional geography-vintage tag; loaders that combine registries reject
/// mismatched non-empty vintages.
struct UnitRegistry {
    UnitLevel level = UnitLevel::Tract;
    std::string vintage;
    std::map<std::string, UnitRecord> units;
};

struct CountRecord {
    std::string block_geoid;
    Subgroup subgroup = Subgroup::All;
    int year = 0;
    long long count = 0;
};

using CountKey = std::tuple<std::string, Subgroup, int>;  // geoid, subgroup, year

struct AggregatedCounts {
    std::map<CountKey, long long> counts;
    std::vector<std::string> rejected;  // one diagnostic per bad record
};

/// Sum block-level counts by truncated GeoId. Totals are conserved exactly;
/// malformed GeoIds are rejected with a diagnostic and the run continues.
AggregatedCounts aggregate_counts(std::span<const CountRecord> records,
                                  UnitLevel target);

}  // namespace airhia
