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

// Minimal library use: estimate a random qutrit through the simulated
// two-channel detector and compare against a maximum-likelihood fit of a
// single-channel tomogram of the same prepared state.

#include <cstdio>

#include "sgt/sgt.hpp"

int main() {
    using namespace sgt;

    Rng rng(2024);
    const QuditState target = haar_random_state(3, rng);

    // What actually leaves the source: slightly off the target.
    PreparationModel prep;
    prep.seed = 1;
    Rng prep_rng(prep.seed);
    const Preparation prepared = sample_preparation(target, prep, prep_rng);

    NoiseModel noise;            // shot, electronic and cross-talk noise
    noise.max_counts = 10'000;
    MqpgOracle oracle(prepared.state, noise, /*seed=*/7);

    SgtConfig config;
    config.dim = 3;
    config.iterations = 200;
    config.seed = 3;
    const Trajectory traj = run_sgt(config, oracle, target);

    for (const std::size_t k : {0U, 9U, 49U, 199U}) {
        std::printf("iteration %3zu  infidelity %.5f\n", k + 1, *traj.records[k].infidelity_vs_target);
    }
    std::printf("SGT  final fidelity %.4f\n", fidelity(traj.final_estimate(), target));

    const ProjectorSet set = build_projector_set(3);
    Rng tomo_rng(11);
    const auto counts = acquire_tomogram(set, prepared.state, noise, tomo_rng);
    const MleResult fit = mle_reconstruct(set, counts);
    std::printf("MLST final fidelity %.4f (%zu iterations)\n", fidelity_to_pure(fit.rho, target), fit.iterations);
    return 0;
}
