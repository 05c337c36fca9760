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
 * @file mle.hpp
 * Single-channel maximum-likelihood state tomography, the baseline SGT is
 * compared against.
 *
 * The projector set is not a POVM, so counts are modelled as independent
 * Poisson draws sharing one unknown intensity. Profiling out that intensity
 * leaves a multinomial likelihood over q_i = tr(P_i rho) / tr(G rho) with
 * G = sum_i P_i. Under sigma = G^{1/2} rho G^{1/2} / tr(G rho) the effects
 * G^{-1/2} P_i G^{-1/2} sum to the identity, and the usual R rho R
 * iteration applies to sigma.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "measurement.hpp"
#include "qudit.hpp"
#include "random.hpp"

namespace sgt {

using ComplexMatrix = Eigen::MatrixXcd;

/// Tolerance of the Hermitian / PSD / trace checks.
inline constexpr double kPhysicalityTolerance = 1e-10;

/// Rank of span{ |v><v| } over the real vector space of Hermitian matrices.
[[nodiscard]] inline std::size_t operator_span_rank(std::span<const QuditState> states) {
    if (states.empty()) {
        return 0;
    }
    const auto d = static_cast<Eigen::Index>(states.front().dim());
    // Each Hermitian d x d matrix has d^2 real coordinates.
    Eigen::MatrixXd design(static_cast<Eigen::Index>(states.size()), d * d);
    for (std::size_t row = 0; row < states.size(); ++row) {
        const ComplexVector &v = states[row].amplitudes();
        const ComplexMatrix op = v * v.adjoint();
        Eigen::Index col = 0;
        for (Eigen::Index i = 0; i < d; ++i) {
            design(static_cast<Eigen::Index>(row), col++) = op(i, i).real();
            for (Eigen::Index j = i + 1; j < d; ++j) {
                design(static_cast<Eigen::Index>(row), col++) = op(i, j).real();
                design(static_cast<Eigen::Index>(row), col++) = op(i, j).imag();
            }
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(design);
    lu.setThreshold(1e-10);
    return static_cast<std::size_t>(lu.rank());
}

/// Measurement states of a sequential single-channel tomography. Construction
/// verifies informational completeness.
class ProjectorSet {
  public:
    explicit ProjectorSet(std::vector<QuditState> projectors) : projectors_(std::move(projectors)) {
        if (projectors_.empty()) {
            throw InvalidDimension("projector set is empty");
        }
        const std::size_t d = projectors_.front().dim();
        for (const auto &p : projectors_) {
            if (p.dim() != d) {
                throw DimensionMismatch(d, p.dim());
            }
        }
        if (operator_span_rank(projectors_) != d * d) {
            throw Error("projector set is not informationally complete for d=" + std::to_string(d));
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return projectors_.front().dim(); }
    [[nodiscard]] std::size_t size() const noexcept { return projectors_.size(); }
    [[nodiscard]] const std::vector<QuditState> &projectors() const noexcept { return projectors_; }
    [[nodiscard]] const QuditState &operator[](std::size_t i) const { return projectors_.at(i); }

  private:
    std::vector<QuditState> projectors_;
};

/// Basis states, then (|j> + |k>)/sqrt2 and (|j> + i|k>)/sqrt2 for j < k.
[[nodiscard]] inline ProjectorSet build_projector_set(std::size_t d) {
    if (d < 2) {
        throw InvalidDimension("tomography needs d >= 2");
    }
    const auto n = static_cast<Eigen::Index>(d);
    std::vector<QuditState> states;
    states.reserve(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        states.push_back(QuditState::basis(d, j));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            ComplexVector v = ComplexVector::Zero(n);
            v[j] = 1.0;
            v[k] = 1.0;
            states.emplace_back(std::move(v));
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            ComplexVector v = ComplexVector::Zero(n);
            v[j] = 1.0;
            v[k] = Complex{0.0, 1.0};
            states.emplace_back(std::move(v));
        }
    }
    return ProjectorSet{std::move(states)};
}

/// Hermitian, positive semidefinite, unit trace; checked on construction.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix entries) : rho_(std::move(entries)) {
        if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
            throw InvalidDimension("density matrix must be square and nonempty");
        }
        const double asym = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > kPhysicalityTolerance) {
            throw NonPhysicalState("density matrix is not Hermitian (deviation " + std::to_string(asym) + ")");
        }
        const Complex tr = rho_.trace();
        if (std::abs(tr - Complex{1.0, 0.0}) > kPhysicalityTolerance) {
            throw NonPhysicalState("density matrix trace is " + std::to_string(tr.real()));
        }
        if (min_eigenvalue() < -kPhysicalityTolerance) {
            throw NonPhysicalState("density matrix has a negative eigenvalue");
        }
    }

    static DensityMatrix pure(const QuditState &psi) {
        return DensityMatrix{psi.amplitudes() * psi.amplitudes().adjoint()};
    }

    static DensityMatrix maximally_mixed(std::size_t d) {
        const auto n = static_cast<Eigen::Index>(d);
        return DensityMatrix{ComplexMatrix::Identity(n, n) / static_cast<double>(d)};
    }

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return rho_; }

    [[nodiscard]] double min_eigenvalue() const {
        const ComplexMatrix herm = 0.5 * (rho_ + rho_.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
        return eig.eigenvalues().minCoeff();
    }

  private:
    ComplexMatrix rho_;
};

/// <psi|rho|psi>
[[nodiscard]] inline double fidelity_to_pure(const DensityMatrix &rho, const QuditState &psi) {
    if (rho.dim() != psi.dim()) {
        throw DimensionMismatch(rho.dim(), psi.dim());
    }
    const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
    if (std::abs(f.imag()) > kPhysicalityTolerance) {
        throw NonPhysicalState("<psi|rho|psi> has an imaginary part");
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

/// One single-channel count per projector, against the prepared state.
[[nodiscard]] inline std::vector<std::uint64_t> acquire_tomogram(const ProjectorSet &set,
                                                                 const QuditState &prepared,
                                                                 const NoiseModel &noise, Rng &rng) {
    if (set.dim() != prepared.dim()) {
        throw DimensionMismatch(set.dim(), prepared.dim());
    }
    std::vector<std::uint64_t> counts;
    counts.reserve(set.size());
    for (const auto &proj : set.projectors()) {
        counts.push_back(measure_single_channel(proj, prepared, noise, rng));
    }
    return counts;
}

/// sum_i n_i log q_i with q_i = tr(P_i rho) / tr(G rho).
[[nodiscard]] inline double log_likelihood(const ProjectorSet &set, std::span<const std::uint64_t> counts,
                                           const DensityMatrix &rho) {
    if (counts.size() != set.size()) {
        throw DimensionMismatch(set.size(), counts.size());
    }
    std::vector<double> p(set.size());
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const ComplexVector &v = set[i].amplitudes();
        p[i] = std::max(0.0, v.dot(rho.matrix() * v).real());
        total += p[i];
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (counts[i] == 0) {
            continue;
        }
        if (p[i] <= 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        ll += static_cast<double>(counts[i]) * std::log(p[i] / total);
    }
    return ll;
}

struct MleOptions {
    std::size_t max_iter = 5000;
    double tol = 1e-8;
    /// Re-validate every intermediate estimate as a DensityMatrix.
    bool check_every_step = true;

    friend bool operator==(const MleOptions &, const MleOptions &) = default;
};

struct MleResult {
    DensityMatrix rho;
    std::size_t iterations = 0;
    bool converged = false;
    /// Log-likelihood of the starting point and after each accepted step.
    std::vector<double> log_likelihood;
};

namespace detail {

struct TransformedProblem {
    ComplexMatrix g_inv_sqrt;
    std::vector<ComplexVector> effects; // G^{-1/2} |v_i>
    std::vector<double> freq;
    std::vector<double> counts;
};

inline double transformed_ll(const TransformedProblem &tp, const ComplexMatrix &sigma) {
    double ll = 0.0;
    for (std::size_t i = 0; i < tp.effects.size(); ++i) {
        if (tp.counts[i] == 0.0) {
            continue;
        }
        const double q = tp.effects[i].dot(sigma * tp.effects[i]).real();
        if (q <= 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        ll += tp.counts[i] * std::log(q);
    }
    return ll;
}

inline ComplexMatrix r_operator(const TransformedProblem &tp, const ComplexMatrix &sigma) {
    const auto d = sigma.rows();
    ComplexMatrix r = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < tp.effects.size(); ++i) {
        if (tp.freq[i] == 0.0) {
            continue;
        }
        const double q = tp.effects[i].dot(sigma * tp.effects[i]).real();
        r += (tp.freq[i] / q) * (tp.effects[i] * tp.effects[i].adjoint());
    }
    return r;
}

inline ComplexMatrix normalized_sandwich(const ComplexMatrix &op, const ComplexMatrix &sigma) {
    ComplexMatrix next = op * sigma * op.adjoint();
    next = 0.5 * (next + next.adjoint());
    return next / next.trace().real();
}

inline ComplexMatrix to_rho(const TransformedProblem &tp, const ComplexMatrix &sigma) {
    ComplexMatrix rho = tp.g_inv_sqrt * sigma * tp.g_inv_sqrt;
    rho = 0.5 * (rho + rho.adjoint());
    return rho / rho.trace().real();
}

} // namespace detail

/**
 * Iterative R rho R reconstruction from rho_0 = I/d. Each step tries the
 * plain R sigma R update and falls back to the diluted (I + eps R) update,
 * halving eps, whenever the likelihood would drop; the recorded
 * log-likelihood sequence is therefore non-decreasing. Stops when the
 * max-abs change of rho is below `tol` or after `max_iter` steps.
 * Convergence towards a rank-one optimum is sublinear: at N = 1e6 the
 * default budget stops near fidelity 0.9996.
 */
[[nodiscard]] inline MleResult mle_reconstruct(const ProjectorSet &set,
                                               std::span<const std::uint64_t> counts,
                                               const MleOptions &options = {}) {
    if (counts.size() != set.size()) {
        throw DimensionMismatch(set.size(), counts.size());
    }
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0,
                                         [](double acc, std::uint64_t n) { return acc + static_cast<double>(n); });
    if (total <= 0.0) {
        throw NoSignal("tomogram contains no counts");
    }

    const auto d = static_cast<Eigen::Index>(set.dim());
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    for (const auto &p : set.projectors()) {
        g += p.amplitudes() * p.amplitudes().adjoint();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(g);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const ComplexMatrix &u = eig.eigenvectors();

    detail::TransformedProblem tp;
    tp.g_inv_sqrt = u * lambda.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * u.adjoint();
    for (std::size_t i = 0; i < set.size(); ++i) {
        tp.effects.push_back(tp.g_inv_sqrt * set[i].amplitudes());
        tp.counts.push_back(static_cast<double>(counts[i]));
        tp.freq.push_back(static_cast<double>(counts[i]) / total);
    }

    // sigma_0 is the image of I/d.
    ComplexMatrix sigma = g / g.trace().real();
    ComplexMatrix rho = detail::to_rho(tp, sigma);
    double ll = detail::transformed_ll(tp, sigma);

    MleResult result{DensityMatrix{rho}, 0, false, {ll}};
    const ComplexMatrix identity = ComplexMatrix::Identity(d, d);

    for (std::size_t it = 0; it < options.max_iter; ++it) {
        const ComplexMatrix r = detail::r_operator(tp, sigma);
        ComplexMatrix candidate = detail::normalized_sandwich(r, sigma);
        double cand_ll = detail::transformed_ll(tp, candidate);
        for (double eps = 1.0; !(cand_ll >= ll) && eps > 1e-12; eps *= 0.5) {
            candidate = detail::normalized_sandwich(identity + eps * r, sigma);
            cand_ll = detail::transformed_ll(tp, candidate);
        }
        if (!(cand_ll >= ll)) {
            // No ascent direction left at double precision.
            result.converged = true;
            break;
        }
        const ComplexMatrix next_rho = detail::to_rho(tp, candidate);
        const double change = (next_rho - rho).cwiseAbs().maxCoeff();
        sigma = std::move(candidate);
        rho = next_rho;
        ll = cand_ll;
        result.log_likelihood.push_back(ll);
        result.iterations = it + 1;
        if (options.check_every_step) {
            result.rho = DensityMatrix{rho};
        }
        if (change < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.rho = DensityMatrix{rho};
    return result;
}

} // namespace sgt
