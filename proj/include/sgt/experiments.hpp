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
 * @file experiments.hpp
 * Batch orchestration: populations of Haar-random targets, count-level
 * sweeps, error-budget toggles and the SGT / MLST comparison.
 *
 * Every run is fully described by a RunSpec whose seeds are derived from
 * the plan's base seed, the dimension and the state index (plus the count
 * level for the noise stream). Target state i, its imperfect preparation
 * and its initial guess are therefore identical across count levels and
 * across error-budget toggles.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "engine.hpp"
#include "error.hpp"
#include "measurement.hpp"
#include "mle.hpp"
#include "qudit.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace sgt {

enum class OracleKind { Mqpg, Exact };

[[nodiscard]] constexpr std::string_view to_string(OracleKind k) noexcept {
    return k == OracleKind::Exact ? "exact" : "mqpg";
}

/// Everything needed to regenerate one SGT run bit for bit.
struct RunSpec {
    SgtConfig sgt;
    /// Explicit target; Haar-random from `target_seed` when absent.
    std::optional<QuditState> target;
    std::uint64_t target_seed = 0;
    NoiseModel noise;
    PreparationModel prep;
    OracleKind oracle = OracleKind::Mqpg;
    std::uint64_t noise_seed = 0;

    void validate() const {
        sgt.validate();
        noise.validate();
        prep.validate();
        if (target && target->dim() != sgt.dim) {
            throw ConfigError("target", "dimension differs from sgt.dim");
        }
    }

    friend bool operator==(const RunSpec &, const RunSpec &) = default;
};

struct RunResult {
    QuditState target;
    Preparation prepared;
    /// Infidelities in the records are against the ideal target.
    Trajectory trajectory;

    [[nodiscard]] double final_fidelity() const { return fidelity(trajectory.final_estimate(), target); }
    [[nodiscard]] double final_fidelity_to_prepared() const {
        return fidelity(trajectory.final_estimate(), prepared.state);
    }
};

[[nodiscard]] inline QuditState resolve_target(const RunSpec &spec) {
    if (spec.target) {
        return *spec.target;
    }
    Rng rng(spec.target_seed);
    return haar_random_state(spec.sgt.dim, rng);
}

[[nodiscard]] inline Preparation resolve_preparation(const RunSpec &spec, const QuditState &target) {
    Rng rng(spec.prep.seed);
    return sample_preparation(target, spec.prep, rng);
}

[[nodiscard]] inline RunResult execute_run(const RunSpec &spec) {
    spec.validate();
    QuditState target = resolve_target(spec);
    Preparation prepared = resolve_preparation(spec, target);
    if (spec.oracle == OracleKind::Exact) {
        ExactOracle oracle(prepared.state, spec.noise.max_counts);
        Trajectory traj = run_sgt(spec.sgt, oracle, target);
        return {std::move(target), std::move(prepared), std::move(traj)};
    }
    MqpgOracle oracle(prepared.state, spec.noise, spec.noise_seed);
    Trajectory traj = run_sgt(spec.sgt, oracle, target);
    return {std::move(target), std::move(prepared), std::move(traj)};
}

/// Multiplicative scale per error source; 0 removes the source.
struct ErrorScales {
    double environmental = 1.0;
    double crosstalk = 1.0;
    double preparation = 1.0;

    friend bool operator==(const ErrorScales &, const ErrorScales &) = default;
};

struct BudgetOptions {
    std::vector<std::size_t> dims{5};
    std::vector<std::uint64_t> count_levels{1000, 10000};

    friend bool operator==(const BudgetOptions &, const BudgetOptions &) = default;
};

struct ExperimentPlan {
    std::vector<std::size_t> dims{3, 5};
    std::vector<std::uint64_t> count_levels{100, 1000, 10000, 100000};
    std::size_t population = 100;
    /// K per dimension; dimensions not listed use 200 + 50 (d - 3).
    std::map<std::size_t, std::size_t> iterations{{3, 200}, {5, 300}};
    std::uint64_t base_seed = 20240601;
    GainSchedule schedule{};
    /// max_counts is replaced by each count level.
    NoiseModel noise{};
    PreparationModel prep{};
    OracleKind oracle = OracleKind::Mqpg;
    ErrorScales scales{};
    BudgetOptions budget{};
    MleOptions mle{};
    /// 0 selects std::thread::hardware_concurrency().
    std::size_t workers = 0;

    [[nodiscard]] std::size_t iterations_for(std::size_t d) const {
        if (const auto it = iterations.find(d); it != iterations.end()) {
            return it->second;
        }
        return d >= 3 ? 200 + 50 * (d - 3) : 200;
    }

    void validate() const {
        if (dims.empty()) throw ConfigError("plan.dims", "must not be empty");
        for (const auto d : dims) {
            if (d < 2) throw ConfigError("plan.dims", "every dimension must be >= 2");
        }
        if (count_levels.empty()) throw ConfigError("plan.count_levels", "must not be empty");
        for (const auto n : count_levels) {
            if (n == 0) throw ConfigError("plan.count_levels", "every level must be positive");
        }
        if (population == 0) throw ConfigError("plan.population", "must be positive");
        for (const auto &[d, k] : iterations) {
            if (k == 0) throw ConfigError("plan.iterations", "K must be positive for d=" + std::to_string(d));
        }
        if (scales.environmental < 0 || scales.crosstalk < 0 || scales.preparation < 0) {
            throw ConfigError("plan.scales", "scale factors must be nonnegative");
        }
        schedule.validate();
        noise.validate();
        prep.validate();
    }

    friend bool operator==(const ExperimentPlan &, const ExperimentPlan &) = default;
};

/// Noise and preparation of dimension d after applying the error scales.
inline void apply_error_scales(const ErrorScales &scales, std::size_t d, NoiseModel &noise,
                               PreparationModel &prep) {
    if (scales.environmental == 0.0) {
        noise.electronic_noise = false;
    } else if (noise.electronic_noise) {
        const double residual = noise.electronic_mean - noise.subtraction_offset;
        noise.electronic_mean = noise.subtraction_offset + scales.environmental * residual;
        noise.electronic_std *= scales.environmental;
    }
    if (scales.crosstalk == 0.0) {
        noise.crosstalk_enabled = false;
    } else {
        noise.crosstalk = std::min(noise.crosstalk * scales.crosstalk, 0.999);
    }
    prep.mean_infidelity = std::min(prep.mean_for(d) * scales.preparation, 0.999);
    prep.infidelity_std *= scales.preparation;
}

/// The fully seeded spec of state `index` under condition (d, n).
[[nodiscard]] inline RunSpec make_run_spec(const ExperimentPlan &plan, std::size_t d, std::uint64_t n,
                                           std::size_t index) {
    RunSpec spec;
    spec.sgt.dim = d;
    spec.sgt.iterations = plan.iterations_for(d);
    spec.sgt.schedule = plan.schedule;
    spec.sgt.seed = derive_seed(plan.base_seed, "sgt", {d, index});
    spec.target_seed = derive_seed(plan.base_seed, "target", {d, index});
    spec.noise = plan.noise;
    spec.noise.max_counts = n;
    spec.prep = plan.prep;
    spec.prep.seed = derive_seed(plan.base_seed, "prep", {d, index});
    apply_error_scales(plan.scales, d, spec.noise, spec.prep);
    spec.oracle = plan.oracle;
    spec.noise_seed = derive_seed(plan.base_seed, "noise", {d, n, index});
    return spec;
}

/// Seed of the single-channel tomogram of state `index` under (d, n).
[[nodiscard]] inline std::uint64_t tomogram_seed(const ExperimentPlan &plan, std::size_t d, std::uint64_t n,
                                                 std::size_t index) {
    return derive_seed(plan.base_seed, "mlst", {d, n, index});
}

namespace detail {

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once; callers write into preallocated slots so the
/// outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> &fn) {
    if (workers == 0) {
        workers = std::max(1U, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    const auto drain = [&next, n, &fn] {
        for (std::size_t i = next++; i < n; i = next++) {
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(drain);
    }
    for (auto &t : pool) {
        t.join();
    }
}

} // namespace detail

struct Condition {
    std::size_t dim = 0;
    std::uint64_t max_counts = 0;
    /// Error-budget toggle name, "baseline" otherwise.
    std::string label = "baseline";

    [[nodiscard]] std::string key() const {
        return "d" + std::to_string(dim) + "_N" + std::to_string(max_counts) +
               (label == "baseline" ? "" : "_" + label);
    }

    friend bool operator==(const Condition &, const Condition &) = default;
};

struct RunOutcome {
    std::size_t index = 0;
    RunSpec spec;
    std::optional<RunResult> result;
    /// Set when the run failed; the batch continues.
    std::string error;

    [[nodiscard]] bool ok() const noexcept { return result.has_value(); }
};

struct ConditionResult {
    Condition condition;
    std::vector<RunOutcome> runs;

    [[nodiscard]] std::vector<Trajectory> trajectories() const {
        std::vector<Trajectory> out;
        for (const auto &r : runs) {
            if (r.ok()) {
                out.push_back(r.result->trajectory);
            }
        }
        return out;
    }

    [[nodiscard]] SummaryStats summary() const {
        std::vector<std::vector<double>> curves;
        for (const auto &r : runs) {
            if (r.ok()) {
                curves.push_back(r.result->trajectory.infidelity_curve());
            }
        }
        return summarize_curves(curves);
    }

    [[nodiscard]] std::vector<double> final_fidelities() const {
        std::vector<double> out;
        for (const auto &r : runs) {
            if (r.ok()) {
                out.push_back(r.result->final_fidelity());
            }
        }
        return out;
    }
};

struct Failure {
    Condition condition;
    std::size_t index = 0;
    std::string error;
};

struct BatchResult {
    std::vector<ConditionResult> conditions;

    [[nodiscard]] std::vector<Failure> failures() const {
        std::vector<Failure> out;
        for (const auto &c : conditions) {
            for (const auto &r : c.runs) {
                if (!r.ok()) {
                    out.push_back({c.condition, r.index, r.error});
                }
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t trajectory_count() const {
        std::size_t n = 0;
        for (const auto &c : conditions) {
            n += static_cast<std::size_t>(std::count_if(c.runs.begin(), c.runs.end(),
                                                        [](const RunOutcome &r) { return r.ok(); }));
        }
        return n;
    }
};

namespace detail {

inline BatchResult run_conditions(const ExperimentPlan &plan, const std::vector<Condition> &conditions) {
    BatchResult batch;
    batch.conditions.reserve(conditions.size());
    for (const auto &c : conditions) {
        ConditionResult cr{c, {}};
        cr.runs.resize(plan.population);
        for (std::size_t i = 0; i < plan.population; ++i) {
            cr.runs[i].index = i;
            cr.runs[i].spec = make_run_spec(plan, c.dim, c.max_counts, i);
        }
        batch.conditions.push_back(std::move(cr));
    }
    const std::size_t per = plan.population;
    parallel_for(conditions.size() * per, plan.workers, [&](std::size_t task) {
        RunOutcome &out = batch.conditions[task / per].runs[task % per];
        try {
            out.result = execute_run(out.spec);
        } catch (const std::exception &e) {
            out.error = e.what();
        }
    });
    return batch;
}

} // namespace detail

/// One population per (d, N) of the plan, ordered by d then N.
[[nodiscard]] inline BatchResult run_batch(const ExperimentPlan &plan) {
    plan.validate();
    std::vector<Condition> conditions;
    for (const auto d : plan.dims) {
        for (const auto n : plan.count_levels) {
            conditions.push_back({d, n, "baseline"});
        }
    }
    return detail::run_conditions(plan, conditions);
}

struct ErrorToggle {
    std::string name;
    ErrorScales scales;
};

/// Baseline, each source removed, and each source increased
/// (environment x10, cross-talk x10, preparation x3).
[[nodiscard]] inline std::vector<ErrorToggle> error_budget_toggles() {
    return {
        {"baseline", {1.0, 1.0, 1.0}},        {"no_environment", {0.0, 1.0, 1.0}},
        {"no_crosstalk", {1.0, 0.0, 1.0}},    {"no_preparation", {1.0, 1.0, 0.0}},
        {"environment_x10", {10.0, 1.0, 1.0}}, {"crosstalk_x10", {1.0, 10.0, 1.0}},
        {"preparation_x3", {1.0, 1.0, 3.0}},
    };
}

struct BudgetEntry {
    Condition condition;
    SummaryStats stats;
};

/// Error-budget matrix over plan.budget dims and count levels. The toggle
/// scales multiply the plan's own scales; seeds are shared across toggles.
[[nodiscard]] inline std::vector<BudgetEntry> run_error_budget(const ExperimentPlan &plan) {
    plan.validate();
    std::vector<BudgetEntry> out;
    for (const auto &toggle : error_budget_toggles()) {
        ExperimentPlan p = plan;
        p.scales.environmental *= toggle.scales.environmental;
        p.scales.crosstalk *= toggle.scales.crosstalk;
        p.scales.preparation *= toggle.scales.preparation;
        std::vector<Condition> conditions;
        for (const auto d : plan.budget.dims) {
            for (const auto n : plan.budget.count_levels) {
                conditions.push_back({d, n, toggle.name});
            }
        }
        const BatchResult batch = detail::run_conditions(p, conditions);
        for (const auto &c : batch.conditions) {
            out.push_back({c.condition, c.summary()});
        }
    }
    return out;
}

struct FidelitySummary {
    double median = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
    std::size_t population = 0;
};

[[nodiscard]] inline FidelitySummary summarize_fidelities(const std::vector<double> &values) {
    return {percentile(values, 0.5), percentile(values, 0.25), percentile(values, 0.75), values.size()};
}

enum class Method { Sgt, Mlst };

[[nodiscard]] constexpr std::string_view to_string(Method m) noexcept { return m == Method::Sgt ? "SGT" : "MLST"; }

struct ComparisonRow {
    Method method;
    std::size_t dim = 0;
    std::uint64_t max_counts = 0;
    FidelitySummary fidelity;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<Failure> failures;

    [[nodiscard]] const ComparisonRow &at(Method m, std::size_t d, std::uint64_t n) const {
        for (const auto &r : rows) {
            if (r.method == m && r.dim == d && r.max_counts == n) {
                return r;
            }
        }
        throw Error("no comparison row for " + std::string(to_string(m)) + " d=" + std::to_string(d) +
                    " N=" + std::to_string(n));
    }
};

/**
 * Final fidelity of SGT and of single-channel MLST on the same targets,
 * the same imperfect preparations and the same noise model. Rows are
 * ordered by d, then N, then method.
 */
[[nodiscard]] inline ComparisonTable compare_sgt_mlst(const ExperimentPlan &plan) {
    plan.validate();
    struct Cell {
        std::size_t d;
        std::uint64_t n;
    };
    std::vector<Cell> cells;
    for (const auto d : plan.dims) {
        for (const auto n : plan.count_levels) {
            cells.push_back({d, n});
        }
    }
    const std::size_t per = plan.population;
    std::vector<std::optional<double>> sgt_fid(cells.size() * per);
    std::vector<std::optional<double>> mle_fid(cells.size() * per);
    std::vector<std::string> errors(cells.size() * per);

    detail::parallel_for(cells.size() * per, plan.workers, [&](std::size_t task) {
        const Cell &cell = cells[task / per];
        const std::size_t i = task % per;
        try {
            const RunSpec spec = make_run_spec(plan, cell.d, cell.n, i);
            const RunResult run = execute_run(spec);
            sgt_fid[task] = run.final_fidelity();

            const ProjectorSet set = build_projector_set(cell.d);
            Rng rng(tomogram_seed(plan, cell.d, cell.n, i));
            std::vector<std::uint64_t> counts;
            if (spec.oracle == OracleKind::Exact) {
                counts = acquire_tomogram(set, run.prepared.state, NoiseModel::exact(cell.n), rng);
            } else {
                counts = acquire_tomogram(set, run.prepared.state, spec.noise, rng);
            }
            const MleResult mle = mle_reconstruct(set, counts, plan.mle);
            mle_fid[task] = fidelity_to_pure(mle.rho, run.target);
        } catch (const std::exception &e) {
            errors[task] = e.what();
        }
    });

    ComparisonTable table;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::vector<double> s;
        std::vector<double> m;
        for (std::size_t i = 0; i < per; ++i) {
            const std::size_t task = c * per + i;
            if (sgt_fid[task] && mle_fid[task]) {
                s.push_back(*sgt_fid[task]);
                m.push_back(*mle_fid[task]);
            } else {
                table.failures.push_back({{cells[c].d, cells[c].n, "compare"}, i, errors[task]});
            }
        }
        if (s.empty()) {
            continue;
        }
        table.rows.push_back({Method::Sgt, cells[c].d, cells[c].n, summarize_fidelities(s)});
        table.rows.push_back({Method::Mlst, cells[c].d, cells[c].n, summarize_fidelities(m)});
    }
    return table;
}

} // namespace sgt
