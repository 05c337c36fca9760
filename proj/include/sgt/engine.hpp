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
 * @file engine.hpp
 * Self-guided tomography loop: complex simultaneous-perturbation ascent of
 * the overlap between the estimate and the unknown state.
 *
 * Iteration k:
 *   1. draw a direction Delta_k with entries in {1, -1, i, -i};
 *   2. measure the unknown state against sigma_pm = normalize(psi_k +- beta_k Delta_k);
 *   3. dN = (N+ - N-) / (N+ + N-),  g_k = dN Delta_k / (2 beta_k);
 *   4. psi_{k+1} = normalize(psi_k + alpha_k g_k).
 * with alpha_k = a / (k + 1 + A)^s and beta_k = b / (k + 1)^t.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "measurement.hpp"
#include "qudit.hpp"
#include "random.hpp"

namespace sgt {

/// The five gain hyperparameters. Defaults are the ones the acceptance
/// suite is pinned against.
struct GainSchedule {
    double a = 0.6;
    double A = 2.0;
    double s = 0.602;
    double b = 0.1;
    double t = 0.101;

    void validate() const {
        if (!(a > 0.0)) throw ConfigError("schedule.a", "must be positive");
        if (!(A >= 0.0)) throw ConfigError("schedule.A", "must be nonnegative");
        if (!(s > 0.0)) throw ConfigError("schedule.s", "must be positive");
        if (!(b > 0.0)) throw ConfigError("schedule.b", "must be positive");
        if (!(t > 0.0)) throw ConfigError("schedule.t", "must be positive");
    }

    friend bool operator==(const GainSchedule &, const GainSchedule &) = default;
};

/// Step size a / (k + 1 + A)^s.
[[nodiscard]] inline double gain_alpha(const GainSchedule &g, std::size_t k) {
    return g.a / std::pow(static_cast<double>(k) + 1.0 + g.A, g.s);
}

/// Perturbation strength b / (k + 1)^t.
[[nodiscard]] inline double gain_beta(const GainSchedule &g, std::size_t k) {
    return g.b / std::pow(static_cast<double>(k) + 1.0, g.t);
}

struct SgtConfig {
    std::size_t dim = 3;
    std::size_t iterations = 200;
    GainSchedule schedule{};
    std::uint64_t seed = 0;
    /// Haar-random from `seed` when absent.
    std::optional<QuditState> initial_guess;

    void validate() const {
        if (dim == 0) throw ConfigError("sgt.dim", "must be positive");
        if (iterations == 0) throw ConfigError("sgt.iterations", "must be at least 1");
        schedule.validate();
        if (initial_guess && initial_guess->dim() != dim) {
            throw ConfigError("sgt.initial_guess", "dimension differs from sgt.dim");
        }
    }

    friend bool operator==(const SgtConfig &, const SgtConfig &) = default;
};

struct IterationRecord {
    std::size_t k = 0;
    PerturbationDirection direction;
    double beta = 0.0;
    double alpha = 0.0;
    std::uint64_t counts_plus = 0;
    std::uint64_t counts_minus = 0;
    double delta_n = 0.0;
    /// psi_{k+1}
    QuditState estimate;
    std::optional<double> infidelity_vs_target;
    /// Both channels reported zero counts; no step was taken.
    bool zero_signal = false;
    /// The update collapsed the estimate; the previous estimate was kept.
    bool degenerate_update = false;

    friend bool operator==(const IterationRecord &, const IterationRecord &) = default;
};

struct Trajectory {
    SgtConfig config;
    QuditState initial_estimate;
    std::vector<IterationRecord> records;

    [[nodiscard]] const QuditState &final_estimate() const {
        return records.empty() ? initial_estimate : records.back().estimate;
    }

    /// Per-iteration infidelity against the target (NaN where unknown).
    [[nodiscard]] std::vector<double> infidelity_curve() const {
        std::vector<double> out;
        out.reserve(records.size());
        for (const auto &r : records) {
            out.push_back(r.infidelity_vs_target.value_or(std::nan("")));
        }
        return out;
    }

    friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

/// (N+ - N-) / (N+ + N-), and 0 when no count was registered at all.
[[nodiscard]] constexpr double pseudo_normalized_difference(std::uint64_t n_plus,
                                                            std::uint64_t n_minus) noexcept {
    if (n_plus + n_minus == 0) {
        return 0.0;
    }
    return (static_cast<double>(n_plus) - static_cast<double>(n_minus)) /
           (static_cast<double>(n_plus) + static_cast<double>(n_minus));
}

/// dN Delta / (2 beta), componentwise.
[[nodiscard]] inline ComplexVector gradient(double delta_n, const PerturbationDirection &direction,
                                            double beta) {
    if (!(beta > 0.0)) {
        throw InvalidGain("gradient needs a positive perturbation strength");
    }
    return (delta_n / (2.0 * beta)) * direction.to_vector();
}

/// normalize(psi + alpha g)
[[nodiscard]] inline QuditState update_estimate(const QuditState &psi, double alpha,
                                                const ComplexVector &g) {
    if (static_cast<std::size_t>(g.size()) != psi.dim()) {
        throw DimensionMismatch(psi.dim(), static_cast<std::size_t>(g.size()));
    }
    ComplexVector next = psi.amplitudes() + alpha * g;
    if (next.norm() < kDegenerateNorm) {
        throw DegenerateState("update collapsed the estimate");
    }
    return QuditState{std::move(next)};
}

/**
 * Run K iterations against `oracle`. When `target` is given every record
 * carries the infidelity of its estimate to it. Deterministic for a fixed
 * seed and a deterministic oracle.
 */
template <MeasurementOracle Oracle>
[[nodiscard]] Trajectory run_sgt(const SgtConfig &config, Oracle &oracle,
                                 const std::optional<QuditState> &target = std::nullopt) {
    config.validate();
    if (oracle.dim() != config.dim) {
        throw DimensionMismatch(config.dim, oracle.dim());
    }
    if (target && target->dim() != config.dim) {
        throw DimensionMismatch(config.dim, target->dim());
    }

    Rng rng(config.seed);
    QuditState psi = config.initial_guess ? *config.initial_guess : haar_random_state(config.dim, rng);

    Trajectory traj{config, psi, {}};
    traj.records.reserve(config.iterations);

    for (std::size_t k = 0; k < config.iterations; ++k) {
        const double beta = gain_beta(config.schedule, k);
        const double alpha = gain_alpha(config.schedule, k);
        PerturbationDirection delta = sample_direction(config.dim, rng);
        const PerturbedPair sigma = perturb_pair(psi, delta, beta);

        ChannelCounts counts;
        try {
            counts = oracle.measure(sigma.plus, sigma.minus);
        } catch (const std::exception &e) {
            throw OracleError(k, e.what());
        }

        const double dn = pseudo_normalized_difference(counts.plus, counts.minus);
        bool degenerate = false;
        try {
            psi = update_estimate(psi, alpha, gradient(dn, delta, beta));
        } catch (const DegenerateState &) {
            degenerate = true;
        }

        std::optional<double> inf;
        if (target) {
            inf = infidelity(psi, *target);
        }
        traj.records.push_back(IterationRecord{k, std::move(delta), beta, alpha, counts.plus,
                                               counts.minus, dn, psi, inf,
                                               counts.plus + counts.minus == 0, degenerate});
    }
    return traj;
}

} // namespace sgt
