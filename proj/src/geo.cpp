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

#include "airhia/geo.hpp"

#include <stdexcept>

#include "airhia/util.hpp"

namespace airhia {

namespace {

UnitLevel level_for_length(std::size_t length) {
    switch (length) {
        case 2: return UnitLevel::State;
        case 5: return UnitLevel::County;
        case 11: return UnitLevel::Tract;
        case 12: return UnitLevel::BlockGroup;
        case 15: return UnitLevel::Block;
        default:
            throw std::invalid_argument("geoid length must be one of 2, 5, 11, 12, 15");
    }
}

}  // namespace

GeoId::GeoId(std::string digits) : digits_(std::move(digits)) {
    if (!all_digits(digits_)) {
        throw std::invalid_argument("geoid must contain decimal digits only");
    }
    level_ = level_for_length(digits_.size());
}

std::optional<GeoId> GeoId::try_parse(std::string digits) {
    if (!all_digits(digits)) return std::nullopt;
    const std::size_t n = digits.size();
    if (n != 2 && n != 5 && n != 11 && n != 12 && n != 15) return std::nullopt;
    return GeoId(std::move(digits));
}

GeoId GeoId::parent(UnitLevel target) const {
    const auto target_length = level_digit_length(target);
    if (!target_length.has_value()) {
        throw std::invalid_argument("cell level has no FIPS prefix");
    }
    if (*target_length > digits_.size()) {
        throw std::invalid_argument("cannot refine");
    }
    if (*target_length == digits_.size()) return *this;
    return GeoId(digits_.substr(0, *target_length));
}

AggregatedCounts aggregate_counts(std::span<const CountRecord> records,
                                  UnitLevel target) {
    AggregatedCounts out;
    const auto target_length = level_digit_length(target);
    if (!target_length.has_value()) {
        throw std::invalid_argument("cannot aggregate counts to cell level");
    }
    for (const auto& record : records) {
        auto block = GeoId::try_parse(record.block_geoid);
        if (!block.has_value() || block->level() != UnitLevel::Block) {
            out.rejected.push_back("malformed block geoid: " +
                                   record.block_geoid);
            continue;
        }
        const GeoId unit = block->parent(target);
        out.counts[{unit.str(), record.subgroup, record.year}] += record.count;
    }
    return out;
}

}  // namespace airhia
