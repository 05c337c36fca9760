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
 * @file measurement.hpp
 * Measurement-oracle contract and the simulated two-channel multi-output
 * quantum pulse gate: projection probabilities, shot noise, electronic
 * read-out background with constant subtraction, cross-talk and imperfect
 * input preparation.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "error.hpp"
#include "qudit.hpp"
#include "random.hpp"

namespace sgt {

struct ChannelCounts {
    std::uint64_t plus = 0;
    std::uint64_t minus = 0;

    friend bool operator==(const ChannelCounts &, const ChannelCounts &) = default;
};

/// Anything that projects the unknown state onto two states and reports the
/// click counts of both channels.
template <typename O>
concept MeasurementOracle = requires(O &oracle, const QuditState &s) {
    { oracle.dim() } -> std::convertible_to<std::size_t>;
    { oracle.measure(s, s) } -> std::same_as<ChannelCounts>;
};

/**
 * Noise sources of one measurement channel. Each source can be switched off
 * independently; with everything off a channel reports round(N p).
 */
struct NoiseModel {
    /// Expected counts at unit overlap.
    std::uint64_t max_counts = 10000;
    /// Click probability of an orthogonal input, as a fraction of max_counts.
    double crosstalk = 0.01;
    double electronic_mean = 890.0;
    double electronic_std = 14.0;
    /// Constant subtracted from every electronic read-out.
    double subtraction_offset = 820.0;

    bool shot_noise = true;
    bool electronic_noise = true;
    bool crosstalk_enabled = true;

    [[nodiscard]] double residual_background() const noexcept {
        return electronic_noise ? electronic_mean - subtraction_offset : 0.0;
    }

    void validate() const {
        if (max_counts == 0) {
            throw ConfigError("noise.max_counts", "must be positive");
        }
        if (!(crosstalk >= 0.0 && crosstalk < 1.0)) {
            throw ConfigError("noise.crosstalk", "must lie in [0, 1)");
        }
        if (!(electronic_mean >= 0.0) || !(electronic_std >= 0.0) || !(subtraction_offset >= 0.0)) {
            throw ConfigError("noise", "electronic parameters must be nonnegative");
        }
        if (subtraction_offset > electronic_mean) {
            throw ConfigError("noise.subtraction_offset", "must not exceed electronic_mean");
        }
    }

    /// Shot noise only: no background, no cross-talk.
    static NoiseModel shot_noise_only(std::uint64_t n) {
        NoiseModel m;
        m.max_counts = n;
        m.electronic_noise = false;
        m.crosstalk_enabled = false;
        return m;
    }

    /// Deterministic counts round(N p).
    static NoiseModel exact(std::uint64_t n) {
        NoiseModel m = shot_noise_only(n);
        m.shot_noise = false;
        return m;
    }

    friend bool operator==(const NoiseModel &, const NoiseModel &) = default;
};

/// Mean preparation infidelity used when a model leaves it unset:
/// 0.6 % for d = 3 and 0.9 % for d = 5, linear in between and beyond.
[[nodiscard]] constexpr double default_preparation_infidelity(std::size_t d) noexcept {
    return 0.0015 * (static_cast<double>(d) + 1.0);
}

struct PreparationModel {
    std::optional<double> mean_infidelity;
    double infidelity_std = 0.001;
    std::uint64_t seed = 0;

    [[nodiscard]] double mean_for(std::size_t d) const noexcept {
        return mean_infidelity.value_or(default_preparation_infidelity(d));
    }

    void validate() const {
        if (mean_infidelity && !(*mean_infidelity >= 0.0 && *mean_infidelity < 1.0)) {
            throw ConfigError("prep.mean_infidelity", "must lie in [0, 1)");
        }
        if (!(infidelity_std >= 0.0)) {
            throw ConfigError("prep.infidelity_std", "must be nonnegative");
        }
    }

    /// Perfect preparation.
    static PreparationModel ideal() {
        PreparationModel m;
        m.mean_infidelity = 0.0;
        m.infidelity_std = 0.0;
        return m;
    }

    friend bool operator==(const PreparationModel &, const PreparationModel &) = default;
};

/// |<sigma|psi>|^2
[[nodiscard]] inline double projection_probability(const QuditState &sigma, const QuditState &psi) {
    return fidelity(sigma, psi);
}

/// (1 - c) p + c: an orthogonal input still clicks with probability c.
[[nodiscard]] constexpr double apply_crosstalk(double p, double c) noexcept {
    return (1.0 - c) * p + c;
}

/**
 * Counts of one channel for click probability p. Shot noise is Poisson with
 * mean N p; the electronic read-out adds round(Gaussian(mean, std)) and the
 * constant offset is then subtracted with a floor at zero.
 */
[[nodiscard]] inline std::uint64_t sample_channel_counts(double p, const NoiseModel &noise, Rng &rng) {
    const double expected = static_cast<double>(noise.max_counts) * std::clamp(p, 0.0, 1.0);
    double signal = 0.0;
    if (noise.shot_noise) {
        if (expected > 0.0) {
            std::poisson_distribution<std::int64_t> poisson(expected);
            signal = static_cast<double>(poisson(rng));
        }
    } else {
        signal = std::round(expected);
    }
    if (!noise.electronic_noise) {
        return static_cast<std::uint64_t>(signal);
    }
    double readout = noise.electronic_mean;
    if (noise.electronic_std > 0.0) {
        std::normal_distribution<double> gauss(noise.electronic_mean, noise.electronic_std);
        readout = gauss(rng);
    }
    const double raw = signal + std::round(readout);
    return static_cast<std::uint64_t>(std::max(0.0, std::round(raw - noise.subtraction_offset)));
}

/// Click counts of a single channel programmed to `projector`.
[[nodiscard]] inline std::uint64_t measure_single_channel(const QuditState &projector,
                                                          const QuditState &prepared,
                                                          const NoiseModel &noise, Rng &rng) {
    double p = projection_probability(projector, prepared);
    if (noise.crosstalk_enabled) {
        p = apply_crosstalk(p, noise.crosstalk);
    }
    return sample_channel_counts(p, noise, rng);
}

/// A prepared input together with the infidelity that was sampled for it.
struct Preparation {
    QuditState state;
    double infidelity = 0.0;
};

/**
 * The state actually sent into the device: sqrt(1 - eps) target + sqrt(eps)
 * chi, with eps ~ Gaussian(mean, std) clipped to [0, 1) and chi Haar-random
 * in the orthogonal complement of the target. The fidelity to the target is
 * 1 - eps by construction.
 */
[[nodiscard]] inline Preparation sample_preparation(const QuditState &target,
                                                    const PreparationModel &prep, Rng &rng) {
    const std::size_t d = target.dim();
    if (d == 1) {
        return {target, 0.0};
    }
    // One standard draw scaled afterwards, so scaling mean and std together
    // keeps the same realisation.
    std::normal_distribution<double> gauss(0.0, 1.0);
    double eps = prep.mean_for(d) + prep.infidelity_std * gauss(rng);
    eps = std::clamp(eps, 0.0, std::nextafter(1.0, 0.0));
    if (eps == 0.0) {
        return {target, 0.0};
    }
    ComplexVector chi;
    do {
        const QuditState draw = haar_random_state(d, rng);
        chi = draw.amplitudes() - target.inner(draw) * target.amplitudes();
    } while (chi.norm() < 1e-6);
    chi.normalize();
    return {QuditState{std::sqrt(1.0 - eps) * target.amplitudes() + std::sqrt(eps) * chi}, eps};
}

[[nodiscard]] inline QuditState prepare_imperfect_state(const QuditState &target,
                                                        const PreparationModel &prep, Rng &rng) {
    return sample_preparation(target, prep, rng).state;
}

/// Both channels of the device, drawn independently.
[[nodiscard]] inline ChannelCounts mqpg_measure(const QuditState &sigma_plus,
                                                const QuditState &sigma_minus,
                                                const QuditState &prepared, const NoiseModel &noise,
                                                Rng &rng) {
    if (sigma_plus.dim() != prepared.dim()) {
        throw DimensionMismatch(sigma_plus.dim(), prepared.dim());
    }
    if (sigma_minus.dim() != prepared.dim()) {
        throw DimensionMismatch(sigma_minus.dim(), prepared.dim());
    }
    const std::uint64_t plus = measure_single_channel(sigma_plus, prepared, noise, rng);
    const std::uint64_t minus = measure_single_channel(sigma_minus, prepared, noise, rng);
    return {plus, minus};
}

/// Simulated two-output device holding a fixed prepared state.
class MqpgOracle {
  public:
    MqpgOracle(QuditState prepared, NoiseModel noise, std::uint64_t seed)
        : prepared_(std::move(prepared)), noise_(noise), rng_(seed) {
        noise_.validate();
    }

    [[nodiscard]] std::size_t dim() const noexcept { return prepared_.dim(); }
    [[nodiscard]] const QuditState &prepared() const noexcept { return prepared_; }
    [[nodiscard]] const NoiseModel &noise() const noexcept { return noise_; }

    ChannelCounts measure(const QuditState &sigma_plus, const QuditState &sigma_minus) {
        return mqpg_measure(sigma_plus, sigma_minus, prepared_, noise_, rng_);
    }

  private:
    QuditState prepared_;
    NoiseModel noise_;
    Rng rng_;
};

/// Noise-free oracle: counts are round(N p) with no sampling.
class ExactOracle {
  public:
    ExactOracle(QuditState state, std::uint64_t max_counts)
        : state_(std::move(state)), max_counts_(max_counts) {}

    [[nodiscard]] std::size_t dim() const noexcept { return state_.dim(); }

    ChannelCounts measure(const QuditState &sigma_plus, const QuditState &sigma_minus) const {
        const auto n = static_cast<double>(max_counts_);
        return {static_cast<std::uint64_t>(std::llround(n * projection_probability(sigma_plus, state_))),
                static_cast<std::uint64_t>(std::llround(n * projection_probability(sigma_minus, state_)))};
    }

  private:
    QuditState state_;
    std::uint64_t max_counts_;
};

static_assert(MeasurementOracle<MqpgOracle>);
static_assert(MeasurementOracle<ExactOracle>);

} // namespace sgt
