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
 * @file qudit.hpp
 * Pure qudit states over the first d Hermite-Gaussian modes, Haar sampling,
 * fidelity and the four-point perturbation algebra.
 *
 * Amplitude j of a state is the coefficient of the j-th mode (|alpha_{j+1}>
 * in one-based notation). Every state is kept at unit norm; global phase is
 * left free and all comparisons go through the phase-invariant fidelity.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "random.hpp"

namespace sgt {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Norms below this are treated as a collapsed vector.
inline constexpr double kDegenerateNorm = 1e-12;

class QuditState {
  public:
    /// Normalizes `amplitudes`; throws on an empty or zero vector. Vectors
    /// already at unit norm (to a few ulps) are kept bit-for-bit, so
    /// normalization is idempotent and stored states reload exactly.
    explicit QuditState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() == 0) {
            throw InvalidDimension("qudit state needs at least one amplitude");
        }
        const double n = amps_.norm();
        if (!(n >= kDegenerateNorm) || !std::isfinite(n)) {
            throw DegenerateState("cannot normalize a vector of norm " + std::to_string(n));
        }
        if (std::abs(n - 1.0) > 4 * std::numeric_limits<double>::epsilon()) {
            amps_ /= n;
        }
    }

    QuditState(std::initializer_list<Complex> amplitudes)
        : QuditState(from_list(amplitudes)) {}

    /// Computational basis state `index` (zero-based) of dimension d.
    static QuditState basis(std::size_t d, std::size_t index) {
        if (d == 0 || index >= d) {
            throw InvalidDimension("basis index " + std::to_string(index) +
                                   " out of range for d=" + std::to_string(d));
        }
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
        v[static_cast<Eigen::Index>(index)] = 1.0;
        return QuditState{std::move(v)};
    }

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
    [[nodiscard]] const ComplexVector &amplitudes() const noexcept { return amps_; }
    [[nodiscard]] Complex operator[](std::size_t j) const { return amps_[static_cast<Eigen::Index>(j)]; }

    /// <this|other>
    [[nodiscard]] Complex inner(const QuditState &other) const {
        if (dim() != other.dim()) {
            throw DimensionMismatch(dim(), other.dim());
        }
        return amps_.dot(other.amps_);
    }

    friend bool operator==(const QuditState &a, const QuditState &b) {
        return a.amps_.size() == b.amps_.size() && a.amps_ == b.amps_;
    }

  private:
    static ComplexVector from_list(std::initializer_list<Complex> amplitudes) {
        ComplexVector v(static_cast<Eigen::Index>(amplitudes.size()));
        Eigen::Index i = 0;
        for (const auto &a : amplitudes) {
            v[i++] = a;
        }
        return v;
    }

    ComplexVector amps_;
};

/// One of the four complex units a perturbation entry may take.
enum class PhaseUnit : std::uint8_t { PlusOne, MinusOne, PlusI, MinusI };

[[nodiscard]] constexpr Complex to_complex(PhaseUnit u) noexcept {
    switch (u) {
    case PhaseUnit::PlusOne:
        return {1.0, 0.0};
    case PhaseUnit::MinusOne:
        return {-1.0, 0.0};
    case PhaseUnit::PlusI:
        return {0.0, 1.0};
    case PhaseUnit::MinusI:
        return {0.0, -1.0};
    }
    return {1.0, 0.0};
}

[[nodiscard]] constexpr PhaseUnit negate(PhaseUnit u) noexcept {
    switch (u) {
    case PhaseUnit::PlusOne:
        return PhaseUnit::MinusOne;
    case PhaseUnit::MinusOne:
        return PhaseUnit::PlusOne;
    case PhaseUnit::PlusI:
        return PhaseUnit::MinusI;
    case PhaseUnit::MinusI:
        return PhaseUnit::PlusI;
    }
    return u;
}

/// Perturbation direction with entries in {1, -1, i, -i}.
class PerturbationDirection {
  public:
    explicit PerturbationDirection(std::vector<PhaseUnit> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) {
            throw InvalidDimension("perturbation direction needs at least one entry");
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return entries_.size(); }
    [[nodiscard]] const std::vector<PhaseUnit> &entries() const noexcept { return entries_; }
    [[nodiscard]] Complex operator[](std::size_t j) const { return to_complex(entries_.at(j)); }

    [[nodiscard]] ComplexVector to_vector() const {
        ComplexVector v(static_cast<Eigen::Index>(entries_.size()));
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            v[static_cast<Eigen::Index>(j)] = to_complex(entries_[j]);
        }
        return v;
    }

    [[nodiscard]] PerturbationDirection operator-() const {
        std::vector<PhaseUnit> flipped(entries_.size());
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            flipped[j] = negate(entries_[j]);
        }
        return PerturbationDirection{std::move(flipped)};
    }

    friend bool operator==(const PerturbationDirection &, const PerturbationDirection &) = default;

  private:
    std::vector<PhaseUnit> entries_;
};

/// Haar-uniform pure state: d i.i.d. standard complex Gaussians, normalized.
[[nodiscard]] inline QuditState haar_random_state(std::size_t d, Rng &rng) {
    if (d == 0) {
        throw InvalidDimension("Haar sampling requires d >= 1");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v[j] = Complex{re, im};
    }
    // A zero draw has probability zero; resample rather than throw.
    if (v.norm() < kDegenerateNorm) {
        return haar_random_state(d, rng);
    }
    return QuditState{std::move(v)};
}

/// |<psi|phi>|^2, clamped into [0, 1] against rounding.
[[nodiscard]] inline double fidelity(const QuditState &psi, const QuditState &phi) {
    const double f = std::norm(psi.inner(phi));
    return std::clamp(f, 0.0, 1.0);
}

[[nodiscard]] inline double infidelity(const QuditState &psi, const QuditState &phi) {
    return 1.0 - fidelity(psi, phi);
}

struct PerturbedPair {
    QuditState plus;
    QuditState minus;
};

/// (normalize(psi + beta*delta), normalize(psi - beta*delta)).
[[nodiscard]] inline PerturbedPair perturb_pair(const QuditState &psi,
                                                const PerturbationDirection &delta, double beta) {
    if (psi.dim() != delta.dim()) {
        throw DimensionMismatch(psi.dim(), delta.dim());
    }
    if (!(beta >= 0.0)) {
        throw InvalidGain("perturbation strength must be nonnegative");
    }
    const ComplexVector step = beta * delta.to_vector();
    ComplexVector plus = psi.amplitudes() + step;
    ComplexVector minus = psi.amplitudes() - step;
    if (plus.norm() < kDegenerateNorm || minus.norm() < kDegenerateNorm) {
        throw DegenerateState("perturbation cancels the estimate (beta=" + std::to_string(beta) + ")");
    }
    return {QuditState{std::move(plus)}, QuditState{std::move(minus)}};
}

[[nodiscard]] inline PerturbationDirection sample_direction(std::size_t d, Rng &rng) {
    if (d == 0) {
        throw InvalidDimension("direction sampling requires d >= 1");
    }
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<PhaseUnit> entries(d);
    for (auto &e : entries) {
        e = static_cast<PhaseUnit>(pick(rng));
    }
    return PerturbationDirection{std::move(entries)};
}

/// Normalized Hermite-Gaussian function of order n at x (weight e^{-x^2/2}).
[[nodiscard]] inline double hermite_gauss(std::size_t n, double x) {
    // Three-term recurrence on the normalized functions; stable for large n.
    const double h0 = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
    if (n == 0) {
        return h0;
    }
    double prev = h0;
    double cur = std::numbers::sqrt2 * x * h0;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double next = std::sqrt(2.0 / (kk + 1.0)) * x * cur - std::sqrt(kk / (kk + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/**
 * Complex spectral amplitude sum_j c_j HG_j(x / width) / sqrt(width) on a
 * grid of frequency offsets. The 1/sqrt(width) factor keeps the profile
 * unit-norm in x. Used for plotting only.
 */
[[nodiscard]] inline std::vector<Complex> render_spectral_amplitude(const QuditState &state,
                                                                    std::span<const double> grid,
                                                                    double mode_width) {
    if (grid.empty()) {
        throw Error("spectral grid is empty");
    }
    if (!(mode_width > 0.0)) {
        throw Error("mode width must be positive");
    }
    const double scale = 1.0 / std::sqrt(mode_width);
    std::vector<Complex> out;
    out.reserve(grid.size());
    for (const double x : grid) {
        const double u = x / mode_width;
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < state.dim(); ++j) {
            acc += state[j] * hermite_gauss(j, u);
        }
        out.push_back(acc * scale);
    }
    return out;
}

} // namespace sgt
