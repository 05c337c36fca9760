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
#include <stdexcept>
#include <vector>

#include "sgt/engine.hpp"
#include "sgt/measurement.hpp"

using namespace sgt;

namespace {

/// State at infidelity `eps` from `target`, with a random orthogonal part.
QuditState at_infidelity(const QuditState &target, double eps, Rng &rng) {
    ComplexVector chi;
    do {
        const auto draw = haar_random_state(target.dim(), rng);
        chi = draw.amplitudes() - target.inner(draw) * target.amplitudes();
    } while (chi.norm() < 1e-6);
    chi.normalize();
    return QuditState{std::sqrt(1.0 - eps) * target.amplitudes() + std::sqrt(eps) * chi};
}

/// Central-difference gradient of f(v) = |<v/|v| | target>|^2 over the 2d
/// real coordinates (Re v_j, Im v_j), returned as a complex vector.
ComplexVector finite_difference_gradient(const QuditState &psi, const QuditState &target, double h) {
    const auto f = [&](const ComplexVector &v) {
        return std::norm(v.normalized().dot(target.amplitudes()));
    };
    const auto d = static_cast<Eigen::Index>(psi.dim());
    ComplexVector grad(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        ComplexVector up = psi.amplitudes();
        ComplexVector dn = psi.amplitudes();
        up[j] += h;
        dn[j] -= h;
        const double gx = (f(up) - f(dn)) / (2 * h);
        up = psi.amplitudes();
        dn = psi.amplitudes();
        up[j] += Complex{0, h};
        dn[j] -= Complex{0, h};
        const double gy = (f(up) - f(dn)) / (2 * h);
        grad[j] = Complex{gx, gy};
    }
    return grad;
}

/// Real inner product of two complex vectors viewed as R^{2d}.
double real_inner(const ComplexVector &a, const ComplexVector &b) { return a.dot(b).real(); }

class ThrowingOracle {
  public:
    explicit ThrowingOracle(std::size_t fail_at) : fail_at_(fail_at) {}
    [[nodiscard]] std::size_t dim() const { return 3; }
    ChannelCounts measure(const QuditState &, const QuditState &) {
        if (calls_++ == fail_at_) {
            throw std::runtime_error("detector saturated");
        }
        return {10, 5};
    }

  private:
    std::size_t fail_at_;
    std::size_t calls_ = 0;
};

class DarkOracle {
  public:
    [[nodiscard]] std::size_t dim() const { return 3; }
    ChannelCounts measure(const QuditState &, const QuditState &) const { return {0, 0}; }
};

SgtConfig config(std::size_t d, std::size_t k, std::uint64_t seed) {
    SgtConfig c;
    c.dim = d;
    c.iterations = k;
    c.seed = seed;
    return c;
}

} // namespace

TEST(GainSchedule, AlphaExamples) {
    GainSchedule g{3.0, 0.0, 0.602, 0.1, 0.101};
    EXPECT_DOUBLE_EQ(gain_alpha(g, 0), 3.0);
    g.s = 1.0;
    EXPECT_DOUBLE_EQ(gain_alpha(g, 2), 1.0);
}

TEST(GainSchedule, BetaExamples) {
    GainSchedule g{3.0, 0.0, 0.602, 0.1, 0.101};
    EXPECT_DOUBLE_EQ(gain_beta(g, 0), 0.1);
    g.t = 1.0;
    EXPECT_NEAR(gain_beta(g, 9), 0.01, 1e-17);
}

TEST(GainSchedule, StrictlyDecreasing) {
    for (const GainSchedule g : {GainSchedule{}, GainSchedule{3.0, 0.0, 0.602, 0.1, 0.101}, GainSchedule{2.0, 5.0, 1.0, 0.2, 1.0 / 6}}) {
        for (std::size_t k = 0; k < 10000; ++k) {
            ASSERT_LT(gain_alpha(g, k + 1), gain_alpha(g, k));
            ASSERT_LT(gain_beta(g, k + 1), gain_beta(g, k));
            ASSERT_GT(gain_beta(g, k + 1), 0.0);
        }
    }
}

TEST(PseudoNormalizedDifference, Examples) {
    EXPECT_EQ(pseudo_normalized_difference(100, 100), 0.0);
    EXPECT_EQ(pseudo_normalized_difference(150, 50), 0.5);
    EXPECT_EQ(pseudo_normalized_difference(0, 0), 0.0);
    EXPECT_EQ(pseudo_normalized_difference(7, 0), 1.0);
    EXPECT_EQ(pseudo_normalized_difference(0, 7), -1.0);
}

TEST(Gradient, Examples) {
    const PerturbationDirection dir({PhaseUnit::PlusOne, PhaseUnit::PlusI, PhaseUnit::MinusOne});
    EXPECT_EQ(gradient(0.0, dir, 0.3), ComplexVector::Zero(3));
    const ComplexVector g = gradient(0.5, dir, 0.25);
    EXPECT_EQ(g[0], Complex(1, 0));
    EXPECT_EQ(g[1], Complex(0, 1));
    EXPECT_EQ(g[2], Complex(-1, 0));
    EXPECT_LT((gradient(0.3, dir, 0.2) - 2.0 * gradient(0.3, dir, 0.4)).norm(), 1e-15);
    EXPECT_THROW((void)gradient(0.5, dir, 0.0), InvalidGain);
}

TEST(UpdateEstimate, Examples) {
    Rng rng(1);
    const auto psi = haar_random_state(4, rng);
    EXPECT_EQ(update_estimate(psi, 2.0, ComplexVector::Zero(4)), psi);

    const QuditState e0 = QuditState::basis(2, 0);
    ComplexVector g(2);
    g << 0.0, 1.0;
    const auto next = update_estimate(e0, 1.0, g);
    EXPECT_NEAR(next[0].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(next[1].real(), 1 / std::sqrt(2.0), 1e-15);

    EXPECT_THROW((void)update_estimate(e0, 1.0, ComplexVector::Zero(3)), DimensionMismatch);
    ComplexVector cancel(2);
    cancel << -1.0, 0.0;
    EXPECT_THROW((void)update_estimate(e0, 1.0, cancel), DegenerateState);
}

TEST(UpdateEstimate, OutputIsUnitNorm) {
    Rng rng(2);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const auto psi = haar_random_state(5, rng);
        ComplexVector g(5);
        for (auto &c : g) {
            c = Complex{gauss(rng), gauss(rng)};
        }
        const auto next = update_estimate(psi, 0.5 + i * 0.01, g);
        ASSERT_NEAR(next.amplitudes().norm(), 1.0, 1e-12);
    }
}

TEST(RunSgt, NoiselessConvergenceInNinetyPercentOfSeeds) {
    int converged = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(1000 + seed);
        const auto target = haar_random_state(3, rng);
        ExactOracle oracle(target, 1'000'000'000);
        const auto traj = run_sgt(config(3, 200, seed), oracle, target);
        if (*traj.records.back().infidelity_vs_target < 1e-3) {
            ++converged;
        }
    }
    EXPECT_GE(converged, 45);
}

TEST(RunSgt, StartingAtTargetStaysWithinPerturbationBound) {
    // Bound 10 beta_K^2 checked by simulation over several targets and seeds.
    const GainSchedule g{};
    const double bound = 10.0 * std::pow(gain_beta(g, 199), 2);
    Rng rng(5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto target = haar_random_state(3, rng);
        ExactOracle oracle(target, 1'000'000'000);
        SgtConfig c = config(3, 200, seed);
        c.initial_guess = target;
        const auto traj = run_sgt(c, oracle, target);
        for (const auto &rec : traj.records) {
            ASSERT_LT(*rec.infidelity_vs_target, bound) << "seed " << seed << " k " << rec.k;
        }
    }
}

TEST(RunSgt, DeterministicForSameSeeds) {
    Rng rng(8);
    const auto target = haar_random_state(5, rng);
    NoiseModel noise;
    noise.max_counts = 1000;
    MqpgOracle o1(target, noise, 77);
    MqpgOracle o2(target, noise, 77);
    const auto a = run_sgt(config(5, 60, 3), o1, target);
    const auto b = run_sgt(config(5, 60, 3), o2, target);
    EXPECT_EQ(a, b);
    MqpgOracle o3(target, noise, 77);
    const auto c = run_sgt(config(5, 60, 4), o3, target);
    EXPECT_NE(a.records.back().estimate, c.records.back().estimate);
}

TEST(RunSgt, RecordsAreConsistent) {
    Rng rng(12);
    const auto target = haar_random_state(5, rng);
    NoiseModel noise;
    noise.max_counts = 100;
    MqpgOracle oracle(target, noise, 5);
    const auto traj = run_sgt(config(5, 300, 9), oracle, target);
    ASSERT_EQ(traj.records.size(), 300U);
    EXPECT_EQ(traj.final_estimate(), traj.records.back().estimate);

    QuditState psi = traj.initial_estimate;
    for (const auto &rec : traj.records) {
        ASSERT_GE(rec.delta_n, -1.0);
        ASSERT_LE(rec.delta_n, 1.0);
        const double dn = pseudo_normalized_difference(rec.counts_plus, rec.counts_minus);
        ASSERT_EQ(dn, rec.delta_n);
        psi = update_estimate(psi, rec.alpha, gradient(dn, rec.direction, rec.beta));
        ASSERT_EQ(psi, rec.estimate) << "k=" << rec.k;
        ASSERT_EQ(rec.beta, gain_beta(traj.config.schedule, rec.k));
        ASSERT_EQ(rec.alpha, gain_alpha(traj.config.schedule, rec.k));
    }
}

TEST(RunSgt, ZeroSignalTakesNoStep) {
    DarkOracle oracle;
    const auto traj = run_sgt(config(3, 5, 1), oracle);
    for (const auto &rec : traj.records) {
        EXPECT_TRUE(rec.zero_signal);
        EXPECT_EQ(rec.delta_n, 0.0);
        EXPECT_EQ(rec.estimate, traj.initial_estimate);
        EXPECT_FALSE(rec.infidelity_vs_target.has_value());
    }
}

TEST(RunSgt, OracleFailureCarriesIteration) {
    ThrowingOracle oracle(17);
    try {
        (void)run_sgt(config(3, 50, 1), oracle);
        FAIL() << "expected OracleError";
    } catch (const OracleError &e) {
        EXPECT_EQ(e.iteration(), 17U);
        EXPECT_NE(std::string(e.what()).find("detector saturated"), std::string::npos);
    }
}

TEST(RunSgt, RejectsMismatchedOracleAndBadConfig) {
    ExactOracle oracle(QuditState::basis(4, 0), 100);
    EXPECT_THROW((void)run_sgt(config(3, 10, 1), oracle), DimensionMismatch);
    ExactOracle o3(QuditState::basis(3, 0), 100);
    EXPECT_THROW((void)run_sgt(config(3, 0, 1), o3), ConfigError);
    SgtConfig c = config(3, 10, 1);
    c.initial_guess = QuditState::basis(2, 0);
    EXPECT_THROW((void)run_sgt(c, o3), ConfigError);
}

TEST(SgtProperties, DescentInExpectationAtFirstIteration) {
    const GainSchedule g{};
    Rng rng(40);
    for (const double start : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (const std::size_t d : {3U, 5U}) {
            const auto target = haar_random_state(d, rng);
            const auto psi = at_infidelity(target, start, rng);
            ExactOracle oracle(target, 1'000'000'000);
            double mean = 0.0;
            constexpr int trials = 1000;
            for (int i = 0; i < trials; ++i) {
                const auto dir = sample_direction(d, rng);
                const double beta = gain_beta(g, 0);
                const auto sigma = perturb_pair(psi, dir, beta);
                const auto counts = oracle.measure(sigma.plus, sigma.minus);
                const double dn = pseudo_normalized_difference(counts.plus, counts.minus);
                mean += infidelity(update_estimate(psi, gain_alpha(g, 0), gradient(dn, dir, beta)), target);
            }
            mean /= trials;
            EXPECT_LT(mean, infidelity(psi, target)) << "d=" << d << " start=" << start;
        }
    }
}

TEST(SgtProperties, GradientAlignsWithFiniteDifferences) {
    const GainSchedule g{};
    Rng rng(41);
    for (const std::size_t d : {3U, 5U}) {
        int positive = 0;
        constexpr int trials = 1000;
        for (int i = 0; i < trials; ++i) {
            const auto target = haar_random_state(d, rng);
            const auto psi = at_infidelity(target, 0.5, rng);
            ExactOracle oracle(target, 1'000'000'000);
            const auto dir = sample_direction(d, rng);
            const double beta = gain_beta(g, 0);
            const auto sigma = perturb_pair(psi, dir, beta);
            const auto counts = oracle.measure(sigma.plus, sigma.minus);
            const ComplexVector gk = gradient(pseudo_normalized_difference(counts.plus, counts.minus), dir, beta);
            if (real_inner(gk, finite_difference_gradient(psi, target, 1e-5)) > 0.0) {
                ++positive;
            }
        }
        EXPECT_GE(positive, 950) << "d=" << d;
    }
}
