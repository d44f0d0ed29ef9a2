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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>

#include "airhia/variance.hpp"

using namespace airhia;

namespace {

std::string padded(std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    return std::string(width - std::min(width, digits.size()), '0') + digits;
}

// Small nested geography: `counties` × 2 tracts × 2 bgs × 2 blocks each.
std::vector<GeoId> make_blocks(std::size_t counties) {
    std::vector<GeoId> blocks;
    for (std::size_t c = 1; c <= counties; ++c) {
        for (std::size_t t = 1; t <= 2; ++t) {
            for (std::size_t g = 1; g <= 2; ++g) {
                for (std::size_t b = 1; b <= 2; ++b) {
                    blocks.emplace_back("08" + padded(c, 3) + padded(t, 6) +
                                        std::to_string(g) + padded(b, 3));
                }
            }
        }
    }
    return blocks;
}

std::vector<BmrObservation> observations_from(
    const std::vector<GeoId>& blocks, const std::vector<int>& years,
    const std::function<double(std::size_t, int)>& value) {
    std::vector<BmrObservation> observations;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (const int year : years) {
            observations.push_back({year, blocks[b], value(b, year)});
        }
    }
    return observations;
}

}  // namespace

TEST_CASE("single-source variance lands on the year component") {
    const auto blocks = make_blocks(4);
    const std::vector<int> years = {2000, 2001, 2002, 2003, 2004};
    const auto observations = observations_from(
        blocks, years,
        [&](std::size_t, int year) { return 0.006 * (year - 1999); });
    const VarianceDecomposition out = decompose(observations);
    REQUIRE(out.proportions_pct.has_value());
    CHECK((*out.proportions_pct)[0] > 99.0);  // year
    for (int k = 1; k < 5; ++k) CHECK((*out.proportions_pct)[k] < 1.0);
    CHECK(out.converged);
}

TEST_CASE("identical observations have zero total variance") {
    const auto blocks = make_blocks(2);
    const auto observations = observations_from(
        blocks, {2000, 2001}, [](std::size_t, int) { return 0.0061; });
    const VarianceDecomposition out = decompose(observations);
    CHECK(out.zero_total_variance);
    CHECK_FALSE(out.proportions_pct.has_value());
    for (const double v : out.components) CHECK(v == 0.0);
}

TEST_CASE("degenerate designs are rejected") {
    const auto blocks = make_blocks(2);
    SUBCASE("single year") {
        const auto observations = observations_from(
            blocks, {2000}, [](std::size_t b, int) { return 0.001 * b; });
        CHECK_THROWS_WITH_AS(decompose(observations), "unidentifiable component",
                             std::invalid_argument);
    }
    SUBCASE("single block") {
        std::vector<BmrObservation> observations = {
            {2000, blocks[0], 0.1}, {2001, blocks[0], 0.2}};
        CHECK_THROWS_WITH_AS(decompose(observations), "unidentifiable component",
                             std::invalid_argument);
    }
}

TEST_CASE("proportions sum to 100 and invariances hold") {
    const auto blocks = make_blocks(4);
    const std::vector<int> years = {2000, 2001, 2002, 2003};
    std::mt19937_64 rng(606);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<double> block_effect(blocks.size());
    for (auto& e : block_effect) e = noise(rng);
    std::vector<double> year_effect(years.size());
    for (auto& e : year_effect) e = noise(rng);
    std::vector<std::vector<double>> eps(
        blocks.size(), std::vector<double>(years.size()));
    for (auto& row : eps) {
        for (auto& e : row) e = 0.2 * noise(rng);
    }
    const auto value = [&](std::size_t b, int year) {
        const std::size_t t = static_cast<std::size_t>(year - 2000);
        return 5.0 + block_effect[b] + year_effect[t] + eps[b][t];
    };
    const auto base = observations_from(blocks, years, value);
    const VarianceDecomposition out = decompose(base);

    REQUIRE(out.proportions_pct.has_value());
    double sum = 0.0;
    for (const double p : *out.proportions_pct) sum += p;
    CHECK(std::abs(sum - 100.0) < 1e-9);

    SUBCASE("location invariance") {
        auto shifted = base;
        for (auto& obs : shifted) obs.bmr += 17.5;
        const VarianceDecomposition moved = decompose(shifted);
        for (int k = 0; k < 5; ++k) {
            CHECK(moved.components[k] ==
                  doctest::Approx(out.components[k]).epsilon(1e-9));
        }
    }
    SUBCASE("scale equivariance") {
        auto scaled = base;
        for (auto& obs : scaled) obs.bmr *= 3.0;
        const VarianceDecomposition times9 = decompose(scaled);
        for (int k = 0; k < 5; ++k) {
            CHECK(times9.components[k] ==
                  doctest::Approx(9.0 * out.components[k]).epsilon(1e-9));
        }
        REQUIRE(times9.proportions_pct.has_value());
        for (int k = 0; k < 5; ++k) {
            CHECK((*times9.proportions_pct)[k] ==
                  doctest::Approx((*out.proportions_pct)[k]).epsilon(1e-9));
        }
    }
    SUBCASE("permutation invariance") {
        auto shuffled = base;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const VarianceDecomposition same = decompose(shuffled);
        for (int k = 0; k < 5; ++k) {
            CHECK(same.components[k] == out.components[k]);
        }
        CHECK(same.residual_variance == out.residual_variance);
    }
}
