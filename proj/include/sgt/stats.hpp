// Copyright 2026 The sgt-qudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file stats.hpp
 * Population statistics of infidelity curves: per-iteration median and
 * quartile band.
 *
 * Percentiles use linear interpolation between closest ranks: for sorted
 * values x_0..x_{n-1} the q-quantile sits at position q (n - 1).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "engine.hpp"
#include "error.hpp"

namespace sgt {

[[nodiscard]] inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error("percentile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

[[nodiscard]] inline double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

struct SummaryStats {
    std::vector<double> median;
    std::vector<double> lower_quartile;
    std::vector<double> upper_quartile;
    std::size_t population = 0;

    [[nodiscard]] std::size_t iterations() const noexcept { return median.size(); }
    [[nodiscard]] double final_median() const { return median.back(); }
    [[nodiscard]] double final_lower() const { return lower_quartile.back(); }
    [[nodiscard]] double final_upper() const { return upper_quartile.back(); }

    /// First 1-based iteration count at which the median infidelity is at most
    /// `level`, or 0 if it never gets there.
    [[nodiscard]] std::size_t iterations_to_reach(double level) const {
        for (std::size_t k = 0; k < median.size(); ++k) {
            if (median[k] <= level) {
                return k + 1;
            }
        }
        return 0;
    }

    friend bool operator==(const SummaryStats &, const SummaryStats &) = default;
};

/// Summary of equally long curves (e.g. infidelity per iteration).
[[nodiscard]] inline SummaryStats summarize_curves(std::span<const std::vector<double>> curves) {
    if (curves.empty()) {
        throw Error("cannot summarize an empty population");
    }
    const std::size_t len = curves.front().size();
    for (const auto &c : curves) {
        if (c.size() != len) {
            throw Error("curves have different iteration counts");
        }
    }
    SummaryStats out;
    out.population = curves.size();
    out.median.reserve(len);
    out.lower_quartile.reserve(len);
    out.upper_quartile.reserve(len);
    std::vector<double> column(curves.size());
    for (std::size_t k = 0; k < len; ++k) {
        for (std::size_t i = 0; i < curves.size(); ++i) {
            column[i] = curves[i][k];
        }
        out.lower_quartile.push_back(percentile(column, 0.25));
        out.median.push_back(percentile(column, 0.5));
        out.upper_quartile.push_back(percentile(column, 0.75));
    }
    return out;
}

/// Summary of the infidelity-to-target curves of a set of trajectories.
[[nodiscard]] inline SummaryStats summarize(std::span<const Trajectory> trajectories) {
    std::vector<std::vector<double>> curves;
    curves.reserve(trajectories.size());
    for (const auto &t : trajectories) {
        curves.push_back(t.infidelity_curve());
    }
    return summarize_curves(curves);
}

} // namespace sgt
