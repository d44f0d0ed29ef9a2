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

#include "airhia/exposure.hpp"

#include <stdexcept>

#include "airhia/parallel.hpp"

namespace airhia {

SurfaceBuild build_surface(const Grid& grid, const UnitRegistry& registry,
                           Pollutant pollutant, ConcentrationUnits units,
                           int year, unsigned threads) {
    if (registry.units.empty()) {
        throw std::invalid_argument("registry has no units");
    }
    SurfaceBuild build;
    build.surface.pollutant = pollutant;
    build.surface.units = units;
    build.surface.year = year;
    build.surface.level = registry.level;

    std::vector<const std::string*> ids;
    std::vector<const Polygon*> polygons;
    ids.reserve(registry.units.size());
    for (const auto& [id, record] : registry.units) {
        ids.push_back(&id);
        polygons.push_back(&record.polygon);
    }
    std::vector<std::optional<double>> means(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
        means[i] = zonal_mean(grid, compute_coverage(grid.layout, *polygons[i]));
    });
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (means[i].has_value()) {
            build.surface.values.emplace(*ids[i], *means[i]);
        } else {
            build.omitted_units.push_back(*ids[i]);
        }
    }
    return build;
}

ExposureSurface surface_from_grid(const Grid& grid, Pollutant pollutant,
                                  ConcentrationUnits units, int year) {
    ExposureSurface surface;
    surface.pollutant = pollutant;
    surface.units = units;
    surface.year = year;
    surface.level = UnitLevel::Cell;
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        if (!grid.is_nodata(i)) {
            surface.values.emplace(std::to_string(i), grid.values[i]);
        }
    }
    return surface;
}

ExposureSurface convert_units(const ExposureSurface& surface,
                              ConcentrationUnits target) {
    if (surface.units == target) return surface;
    if (surface.pollutant != Pollutant::NO2) {
        throw std::invalid_argument("unit mismatch");
    }
    ExposureSurface out = surface;
    out.units = target;
    const bool to_mass = target == ConcentrationUnits::UgM3;
    // 188/100 keeps the decimal factor 1.88 exact in binary arithmetic.
    for (auto& [id, value] : out.values) {
        value = to_mass ? (value * 188.0) / 100.0 : (value * 100.0) / 188.0;
    }
    return out;
}

WeightedMean population_weighted_mean(
    const ExposureSurface& surface,
    const std::map<std::string, double>& weights) {
    double numerator = 0.0;
    double total = 0.0;
    for (const auto& [id, weight] : weights) {
        if (weight < 0.0) {
            throw std::invalid_argument("negative weight for " + id);
        }
        const auto found = surface.values.find(id);
        if (found == surface.values.end()) {
            throw std::invalid_argument("weight key '" + id +
                                        "' is not on the surface");
        }
        numerator += found->second * weight;
        total += weight;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("no population");
    }
    return {numerator / total, total};
}

WorkplaceComponent workplace_component(const ExposureSurface& surface,
                                       const OdMatrix& od) {
    if (surface.level != UnitLevel::Tract) {
        throw std::invalid_argument("workplace component needs a tract surface");
    }
    // Per home tract: Σ_w OD(h,w)·C_w and Σ_w OD(h,w), in OD key order.
    std::map<std::string, std::pair<double, double>> sums;
    for (const auto& [pair, workers] : od.flows) {
        const auto& [home, work] = pair;
        const auto found = surface.values.find(work);
        if (found == surface.values.end()) {
            throw std::invalid_argument("work tract '" + work +
                                        "' is not on the surface");
        }
        auto& [weighted, total] = sums[home];
        weighted += workers * found->second;
        total += workers;
    }
    WorkplaceComponent component;
    for (const auto& [home, sums_pair] : sums) {
        const auto& [weighted, total] = sums_pair;
        if (total <= 0.0) {
            component.omitted.push_back(home);
            continue;
        }
        component.values.emplace(home, weighted / total);
    }
    return component;
}

HomeWorkBuild home_work_surface(const ExposureSurface& surface,
                                const OdMatrix& od) {
    const WorkplaceComponent workplace = workplace_component(surface, od);
    HomeWorkBuild build;
    build.surface.pollutant = surface.pollutant;
    build.surface.units = surface.units;
    build.surface.year = surface.year;
    build.surface.level = surface.level;
    for (const auto& [home, concentration] : surface.values) {
        const auto found = workplace.values.find(home);
        if (found == workplace.values.end()) {
            build.omitted.push_back(home);
            continue;
        }
        // 0.794·C + 0.206·W, written so that W == C reproduces C exactly.
        build.surface.values.emplace(
            home,
            concentration + kWorkTimeShare * (found->second - concentration));
    }
    return build;
}

}  // namespace airhia
