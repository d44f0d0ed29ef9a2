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

#include "airhia/variance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace airhia {

namespace {

constexpr int kLevels = 5;  // year, county, tract, block group, block

struct Design {
    std::vector<double> y;
    // Effect index per observation and level, already offset into [0, q).
    std::vector<std::array<int, kLevels>> effect;
    std::array<int, kLevels> group_count{};
    std::array<int, kLevels> offset{};
    int q = 0;
};

Design build_design(std::span<const BmrObservation> observations) {
    // Sorted copy: every accumulation below follows this order, so the
    // estimates are invariant under permutation of the input.
    std::vector<const BmrObservation*> sorted;
    sorted.reserve(observations.size());
    for (const auto& obs : observations) sorted.push_back(&obs);
    std::sort(sorted.begin(), sorted.end(),
              [](const BmrObservation* a, const BmrObservation* b) {
                  if (a->block.str() != b->block.str())
                      return a->block.str() < b->block.str();
                  if (a->year != b->year) return a->year < b->year;
                  return a->bmr < b->bmr;
              });

    std::map<int, int> years;
    std::array<std::map<std::string, int>, 4> spatial;  // county..block
    const std::array<UnitLevel, 4> spatial_levels = {
        UnitLevel::County, UnitLevel::Tract, UnitLevel::BlockGroup,
        UnitLevel::Block};

    Design design;
    design.y.reserve(sorted.size());
    design.effect.reserve(sorted.size());
    for (const BmrObservation* obs : sorted) {
        if (obs->block.level() != UnitLevel::Block) {
            throw std::invalid_argument("observations must carry block geoids");
        }
        if (!std::isfinite(obs->bmr)) {
            throw std::invalid_argument("bmr must be finite");
        }
        design.y.push_back(obs->bmr);
        std::array<int, kLevels> idx{};
        idx[0] = years.emplace(obs->year, static_cast<int>(years.size()))
                     .first->second;
        for (int k = 0; k < 4; ++k) {
            const std::string key = obs->block.parent(spatial_levels[k]).str();
            auto& table = spatial[k];
            idx[k + 1] =
                table.emplace(key, static_cast<int>(table.size())).first->second;
        }
        design.effect.push_back(idx);
    }
    if (years.size() < 2 || spatial[3].size() < 2) {
        throw std::invalid_argument("unidentifiable component");
    }

    design.group_count[0] = static_cast<int>(years.size());
    for (int k = 0; k < 4; ++k) {
        design.group_count[k + 1] = static_cast<int>(spatial[k].size());
    }
    int offset = 0;
    for (int k = 0; k < kLevels; ++k) {
        design.offset[k] = offset;
        offset += design.group_count[k];
    }
    design.q = offset;
    for (auto& idx : design.effect) {
        for (int k = 0; k < kLevels; ++k) idx[k] += design.offset[k];
    }
    return design;
}

}  // namespace

VarianceDecomposition decompose(std::span<const BmrObservation> observations,
                                const DecomposeOptions& options) {
    const Design design = build_design(observations);
    const std::size_t n = design.y.size();
    const int q = design.q;

    double mean_y = 0.0;
    double y_scale = 0.0;
    for (const double v : design.y) {
        mean_y += v;
        y_scale = std::max(y_scale, std::abs(v));
    }
    mean_y /= static_cast<double>(n);
    double var_y = 0.0;
    for (const double v : design.y) var_y += (v - mean_y) * (v - mean_y);
    var_y /= static_cast<double>(n);

    VarianceDecomposition out;
    // Relative threshold: summation noise on identical inputs must read as
    // zero variance.
    if (var_y <= y_scale * y_scale * 1e-24) {
        out.zero_total_variance = true;
        out.converged = true;
        return out;
    }

    // Sufficient statistics. Z'Z entries are co-occurrence counts, so their
    // accumulation is exact in any order.
    Eigen::MatrixXd ztz = Eigen::MatrixXd::Zero(q, q);
    Eigen::VectorXd zty = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd zt1 = Eigen::VectorXd::Zero(q);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& idx = design.effect[i];
        for (int a = 0; a < kLevels; ++a) {
            zty[idx[a]] += design.y[i];
            zt1[idx[a]] += 1.0;
            for (int b = 0; b < kLevels; ++b) ztz(idx[a], idx[b]) += 1.0;
        }
    }

    const double floor = 1e-12 * var_y;
    // Components shrinking through this threshold sit on the zero boundary,
    // where EM decays sublinearly and would stall the relative-change test;
    // they are pinned to zero.
    const double boundary = 1e-4 * var_y;
    // Parameter vector: the five level variances, σ²_ε, and μ.
    using Params = std::array<double, kLevels + 2>;
    Params theta;
    theta.fill(var_y / (kLevels + 1));
    theta[kLevels + 1] = mean_y;

    std::array<bool, kLevels> frozen{};
    Eigen::MatrixXd a_matrix(q, q);
    Eigen::MatrixXd l_inverse(q, q);
    int evaluations = 0;
    const auto em_step = [&](const Params& p) -> Params {
        ++evaluations;
        const double sigma2_e = p[kLevels];
        const double mu = p[kLevels + 1];
        a_matrix = ztz / sigma2_e;
        for (int k = 0; k < kLevels; ++k) {
            for (int g = 0; g < design.group_count[k]; ++g) {
                a_matrix(design.offset[k] + g, design.offset[k] + g) +=
                    1.0 / p[k];
            }
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(a_matrix);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("variance system is not positive definite");
        }
        const Eigen::VectorXd u = llt.solve((zty - mu * zt1) / sigma2_e);

        // diag of C = A^{-1} from the Cholesky factor.
        l_inverse.setIdentity(q, q);
        llt.matrixL().solveInPlace(l_inverse);
        Eigen::VectorXd diag_c(q);
        for (int i = 0; i < q; ++i) diag_c[i] = l_inverse.col(i).squaredNorm();

        Params next;
        double trace_cdinv = 0.0;
        for (int k = 0; k < kLevels; ++k) {
            double sum = 0.0;
            for (int g = 0; g < design.group_count[k]; ++g) {
                const int i = design.offset[k] + g;
                sum += u[i] * u[i] + diag_c[i];
                trace_cdinv += diag_c[i] / p[k];
            }
            next[k] = std::max(sum / design.group_count[k], floor);
            if (!frozen[k] && next[k] < p[k] && next[k] < boundary) {
                frozen[k] = true;
            }
            if (frozen[k]) next[k] = floor;
        }
        const double trace_cztz =
            sigma2_e * (static_cast<double>(q) - trace_cdinv);

        double ssr = 0.0;
        double residual_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double fitted = mu;
            for (int k = 0; k < kLevels; ++k) fitted += u[design.effect[i][k]];
            const double r = design.y[i] - fitted;
            ssr += r * r;
            residual_mean += r;
        }
        residual_mean /= static_cast<double>(n);
        next[kLevels] =
            std::max((ssr + trace_cztz) / static_cast<double>(n), floor);
        next[kLevels + 1] = mu + residual_mean;
        return next;
    };
    const auto rel_change = [&](const Params& a, const Params& b) {
        double change = 0.0;
        for (int k = 0; k <= kLevels; ++k) {
            change = std::max(change,
                              std::abs(b[k] - a[k]) / std::max(a[k], floor));
        }
        return change;
    };

    bool converged = false;
    while (evaluations < options.max_iterations) {
        const Params next = em_step(theta);
        const double change = rel_change(theta, next);
        theta = next;
        if (change < options.relative_tolerance) {
            converged = true;
            break;
        }
    }

    for (int k = 0; k < kLevels; ++k) {
        out.components[k] = theta[k] <= 2.0 * floor ? 0.0 : theta[k];
    }
    out.residual_variance =
        theta[kLevels] <= 2.0 * floor ? 0.0 : theta[kLevels];
    out.iterations = evaluations;
    out.converged = converged;

    const double total = out.components[0] + out.components[1] +
                         out.components[2] + out.components[3] +
                         out.components[4];
    if (total > 0.0) {
        std::array<double, kLevels> pct;
        for (int k = 0; k < kLevels; ++k) {
            pct[k] = 100.0 * out.components[k] / total;
        }
        out.proportions_pct = pct;
    }
    return out;
}

}  // namespace airhia
