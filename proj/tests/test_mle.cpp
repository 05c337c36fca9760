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
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sgt/mle.hpp"

using namespace sgt;

namespace {

std::vector<std::uint64_t> exact_counts(const ProjectorSet &set, const QuditState &psi, double n) {
    std::vector<std::uint64_t> out;
    for (const auto &p : set.projectors()) {
        out.push_back(static_cast<std::uint64_t>(std::llround(n * projection_probability(p, psi))));
    }
    return out;
}

void expect_physical(const ComplexMatrix &rho) {
    EXPECT_LT((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
    EXPECT_NEAR(rho.trace().imag(), 0.0, 1e-10);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

} // namespace

TEST(ProjectorSet, SizesAndCompleteness) {
    for (const std::size_t d : {2U, 3U, 5U}) {
        const auto set = build_projector_set(d);
        EXPECT_EQ(set.size(), d * d);
        EXPECT_EQ(operator_span_rank(set.projectors()), d * d);
    }
    EXPECT_THROW((void)build_projector_set(1), InvalidDimension);
}

TEST(ProjectorSet, RejectsIncompleteSet) {
    std::vector<QuditState> basis_only{QuditState::basis(3, 0), QuditState::basis(3, 1), QuditState::basis(3, 2)};
    EXPECT_EQ(operator_span_rank(basis_only), 3U);
    EXPECT_THROW(ProjectorSet{basis_only}, Error);
}

TEST(AcquireTomogram, OrthogonalityInExactMode) {
    const auto set = build_projector_set(3);
    Rng rng(1);
    const auto counts = acquire_tomogram(set, QuditState::basis(3, 0), NoiseModel::exact(10000), rng);
    ASSERT_EQ(counts.size(), 9U);
    EXPECT_EQ(counts[0], 10000U);
    EXPECT_EQ(counts[1], 0U);
    EXPECT_EQ(counts[3], 5000U); // (|0> + |1>)/sqrt2
}

TEST(AcquireTomogram, ShotNoiseOnSuperposition) {
    const auto set = build_projector_set(3);
    Rng rng(2);
    double acc = 0.0;
    for (int i = 0; i < 200; ++i) {
        acc += static_cast<double>(
            acquire_tomogram(set, QuditState::basis(3, 0), NoiseModel::shot_noise_only(10000), rng)[3]);
    }
    EXPECT_NEAR(acc / 200, 5000.0, 150.0);
}

TEST(AcquireTomogram, LengthMatchesSet) {
    Rng rng(3);
    const auto set = build_projector_set(5);
    EXPECT_EQ(acquire_tomogram(set, haar_random_state(5, rng), NoiseModel{}, rng).size(), 25U);
    EXPECT_THROW((void)acquire_tomogram(set, haar_random_state(3, rng), NoiseModel{}, rng), DimensionMismatch);
}

TEST(MleReconstruct, ExactCountsRecoverPureState) {
    Rng rng(4);
    const auto set = build_projector_set(3);
    for (int i = 0; i < 10; ++i) {
        const auto psi = haar_random_state(3, rng);
        const auto res = mle_reconstruct(set, exact_counts(set, psi, 10000));
        EXPECT_GT(fidelity_to_pure(res.rho, psi), 0.999);
    }
}

TEST(MleReconstruct, ConsistentAtLargeCounts) {
    Rng rng(5);
    for (const std::size_t d : {3U, 5U}) {
        const auto set = build_projector_set(d);
        const auto psi = haar_random_state(d, rng);
        // Pure optima are approached sublinearly; give the fit room to get there.
        MleOptions opts;
        opts.max_iter = 100000;
        opts.tol = 1e-12;
        opts.check_every_step = false;
        const auto res = mle_reconstruct(set, exact_counts(set, psi, 1e6), opts);
        EXPECT_GT(fidelity_to_pure(res.rho, psi), 0.9999) << "d=" << d;
    }
}

TEST(MleReconstruct, EqualCountsGiveMaximallyMixed) {
    // Basis-plus-superposition set and the six Pauli eigenstates.
    const auto own = build_projector_set(2);
    const double s = 1 / std::sqrt(2.0);
    const ProjectorSet pauli{{QuditState::basis(2, 0), QuditState::basis(2, 1), QuditState{Complex{s}, Complex{s}},
                              QuditState{Complex{s}, Complex{-s}}, QuditState{Complex{s}, Complex{0, s}},
                              QuditState{Complex{s}, Complex{0, -s}}}};
    for (const auto *set : {&own, &pauli}) {
        const std::vector<std::uint64_t> counts(set->size(), 500);
        const auto res = mle_reconstruct(*set, counts);
        const ComplexMatrix diff = res.rho.matrix() - ComplexMatrix::Identity(2, 2) / 2.0;
        EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-3);
    }
}

TEST(MleReconstruct, MonotoneLikelihoodAndPhysicalityOnFuzzedTomograms) {
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const std::size_t d = (i % 2 == 0) ? 3 : 5;
        const auto set = build_projector_set(d);
        NoiseModel noise;
        noise.max_counts = std::uint64_t{100} << (i % 4 * 3);
        const auto psi = haar_random_state(d, rng);
        const auto counts = acquire_tomogram(set, psi, noise, rng);
        MleOptions opts;
        opts.max_iter = 500;
        const auto res = mle_reconstruct(set, counts, opts);
        for (std::size_t k = 1; k < res.log_likelihood.size(); ++k) {
            ASSERT_GE(res.log_likelihood[k], res.log_likelihood[k - 1]) << "tomogram " << i << " step " << k;
        }
        expect_physical(res.rho.matrix());
        EXPECT_NEAR(res.rho.matrix().trace().real(), 1.0, 1e-10);
        EXPECT_NEAR(log_likelihood(set, counts, res.rho), res.log_likelihood.back(),
                    1e-8 * std::abs(res.log_likelihood.back()));
    }
}

TEST(MleReconstruct, Errors) {
    const auto set = build_projector_set(3);
    EXPECT_THROW((void)mle_reconstruct(set, std::vector<std::uint64_t>(9, 0)), NoSignal);
    EXPECT_THROW((void)mle_reconstruct(set, std::vector<std::uint64_t>(4, 1)), DimensionMismatch);
}

TEST(FidelityToPure, Examples) {
    Rng rng(7);
    const auto psi = haar_random_state(4, rng);
    EXPECT_NEAR(fidelity_to_pure(DensityMatrix::pure(psi), psi), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_to_pure(DensityMatrix::maximally_mixed(4), psi), 0.25, 1e-12);
    EXPECT_NEAR(fidelity_to_pure(DensityMatrix::pure(QuditState::basis(3, 1)), QuditState::basis(3, 0)), 0.0, 1e-15);
    EXPECT_THROW((void)fidelity_to_pure(DensityMatrix::maximally_mixed(3), psi), DimensionMismatch);
}

TEST(DensityMatrix, RejectsNonPhysicalMatrices) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix{m}, NonPhysicalState); // trace 2
    m << 1.5, 0, 0, -0.5;
    EXPECT_THROW(DensityMatrix{m}, NonPhysicalState); // negative eigenvalue
    m << 0.5, 0.1, 0.3, 0.5;
    EXPECT_THROW(DensityMatrix{m}, NonPhysicalState); // not Hermitian
}
