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

#include <string>
#include <vector>

#include "sgt/io.hpp"
#include "sgt/report.hpp"

using namespace sgt;

namespace {

ExperimentPlan tiny_plan() {
    ExperimentPlan p;
    p.dims = {3, 5};
    p.count_levels = {100, 10000};
    p.population = 4;
    p.iterations = {{3, 30}, {5, 30}};
    p.workers = 1;
    return p;
}

std::string error_where(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const ConfigError &e) {
        return e.where();
    }
    return "<no error>";
}

std::size_t count_of(const std::string &hay, const std::string &needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST(TrajectoryJson, RoundTripIsBitExactAndReplays) {
    const auto batch = run_batch(tiny_plan());
    for (const auto &cond : batch.conditions) {
        for (const auto &run : cond.runs) {
            const std::string text = io::trajectory_to_json(run.spec, *run.result).dump();
            const auto stored = io::trajectory_from_json(io::parse_json(text, "mem"));
            ASSERT_EQ(stored.spec, run.spec);
            ASSERT_EQ(stored.trajectory, run.result->trajectory);
            ASSERT_EQ(execute_run(stored.spec).trajectory, stored.trajectory);
        }
    }
}

TEST(TrajectoryJson, SerializeDeserializeSummarizeIsIdentical) {
    const auto batch = run_batch(tiny_plan());
    const auto &cond = batch.conditions.back();
    std::vector<Trajectory> reloaded;
    for (const auto &run : cond.runs) {
        const auto j = io::trajectory_to_json(run.spec, *run.result);
        reloaded.push_back(io::trajectory_from_json(io::parse_json(j.dump(2), "mem")).trajectory);
    }
    const auto direct = cond.summary();
    EXPECT_EQ(summarize(reloaded), direct);

    const auto parsed = io::parse_summary_csv(io::summary_csv(direct), "mem");
    EXPECT_EQ(parsed.median, direct.median);
    EXPECT_EQ(parsed.lower_quartile, direct.lower_quartile);
    EXPECT_EQ(parsed.upper_quartile, direct.upper_quartile);
}

TEST(TrajectoryCsv, HeaderAndRowCount) {
    auto plan = tiny_plan();
    plan.dims = {3};
    plan.count_levels = {100};
    plan.population = 1;
    const auto batch = run_batch(plan);
    const std::string csv = io::trajectory_csv(batch.conditions[0].runs[0].result->trajectory);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "k,beta,alpha,n_plus,n_minus,delta_n,infidelity,re_0,im_0,re_1,im_1,re_2,im_2");
    EXPECT_EQ(count_of(csv, "\n"), 31U);
}

TEST(RunSpecJson, RoundTripAndDefaults) {
    const auto spec = make_run_spec(tiny_plan(), 5, 1000, 3);
    EXPECT_EQ(io::run_spec_from_json(io::to_json(spec)), spec);

    const auto minimal = io::run_spec_from_json(io::parse_json(R"({"sgt": {"dim": 3, "iterations": 10}})", "mem"));
    EXPECT_EQ(minimal.noise, NoiseModel{});
    EXPECT_EQ(minimal.sgt.schedule, GainSchedule{});
    EXPECT_EQ(minimal.oracle, OracleKind::Mqpg);

    RunSpec explicit_target = spec;
    explicit_target.target = QuditState{Complex{1, 0}, Complex{0, 1}, Complex{0, 0}, Complex{0, 0}, Complex{0, 0}};
    explicit_target.sgt.initial_guess = QuditState::basis(5, 2);
    EXPECT_EQ(io::run_spec_from_json(io::to_json(explicit_target)), explicit_target);
}

TEST(PlanJson, RoundTripAndPartialOverride) {
    auto plan = tiny_plan();
    plan.prep.mean_infidelity = 0.004;
    plan.scales.crosstalk = 0.0;
    EXPECT_EQ(io::plan_from_json(io::to_json(plan)), plan);

    const auto partial = io::plan_from_json(io::parse_json(R"({"population": 7, "prep": {"mean_infidelity": "auto"}})", "mem"));
    ExperimentPlan expected;
    expected.population = 7;
    EXPECT_EQ(partial, expected);
}

TEST(ConfigDiagnostics, NameLineAndField) {
    EXPECT_EQ(error_where([] { (void)io::parse_json("{\n  \"a\": 1,\n  \"b\": ]\n}", "cfg.json"); }), "cfg.json:3:8");
    EXPECT_EQ(error_where([] { (void)io::run_spec_from_json(io::parse_json(R"({"sgt": {"dim": 3}})", "m")); }),
              "sgt.iterations");
    EXPECT_EQ(error_where([] {
                  (void)io::run_spec_from_json(
                      io::parse_json(R"({"sgt": {"dim": 3, "iterations": 5}, "noise": {"max_count": 5}})", "m"));
              }),
              "noise.max_count");
    EXPECT_EQ(error_where([] {
                  (void)io::run_spec_from_json(
                      io::parse_json(R"({"sgt": {"dim": 3, "iterations": 5, "schedule": {"a": "big"}}})", "m"));
              }),
              "sgt.schedule.a");
    EXPECT_EQ(error_where([] {
                  (void)io::run_spec_from_json(
                      io::parse_json(R"({"sgt": {"dim": 3, "iterations": -5}})", "m"));
              }),
              "sgt.iterations");
    EXPECT_EQ(error_where([] {
                  (void)io::run_spec_from_json(
                      io::parse_json(R"({"sgt": {"dim": 3, "iterations": 5}, "noise": {"crosstalk": 1.5}})", "m"));
              }),
              "noise.crosstalk");
    EXPECT_EQ(error_where([] { (void)io::load_json_file("/nonexistent/run.json"); }), "/nonexistent/run.json");
    EXPECT_EQ(error_where([] { (void)io::plan_from_json(io::parse_json(R"({"dims": [3, "x"]})", "m")); }),
              "dims[1]");
}

TEST(TomographyJson, RoundTrips) {
    const auto set = build_projector_set(3);
    const std::vector<std::uint64_t> counts{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto tomo = io::tomogram_from_json(io::tomogram_to_json(set, counts));
    EXPECT_EQ(tomo.counts, counts);
    EXPECT_EQ(tomo.set.projectors(), set.projectors());

    const auto res = mle_reconstruct(set, counts);
    const auto rho = io::density_matrix_from_json(io::parse_json(io::density_matrix_to_json(res.rho).dump(), "m"));
    EXPECT_EQ(rho.matrix(), res.rho.matrix());
}

TEST(ConfigHash, StableAndSensitive) {
    const auto a = io::to_json(tiny_plan());
    auto plan = tiny_plan();
    plan.base_seed += 1;
    EXPECT_EQ(io::config_hash(a), io::config_hash(io::to_json(tiny_plan())));
    EXPECT_NE(io::config_hash(a), io::config_hash(io::to_json(plan)));
    EXPECT_EQ(io::config_hash(a).size(), 16U);
}

TEST(Report, PlotHasOneLabeledSeriesPerLevel) {
    auto plan = tiny_plan();
    plan.dims = {5};
    plan.count_levels = {100, 1000, 10000, 100000};
    const auto batch = run_batch(plan);
    std::vector<report::PlotSeries> series;
    for (const auto &c : batch.conditions) {
        series.push_back({"N=" + std::to_string(c.condition.max_counts), c.summary()});
    }
    const std::string svg = report::render_svg(series, "d=5");
    EXPECT_EQ(count_of(svg, "<g class=\"series\""), 4U);
    EXPECT_NE(svg.find("data-label=\"N=100000\""), std::string::npos);
    const std::string data = report::plot_data_csv(series);
    EXPECT_EQ(count_of(data, "\n"), 1U + 4U * 30U);
}

TEST(Report, PlotRejectsEmptyAndInconsistentInput) {
    EXPECT_THROW((void)report::render_svg({}, "x"), Error);
    SummaryStats a;
    a.median = a.lower_quartile = a.upper_quartile = {0.5, 0.1};
    SummaryStats b;
    b.median = b.lower_quartile = b.upper_quartile = {0.5};
    EXPECT_THROW((void)report::render_svg({{"a", a}, {"b", b}}, "x"), Error);
    EXPECT_THROW((void)report::plot_data_csv({{"a", a}, {"b", b}}), Error);
}

TEST(Report, ComparisonTableLayout) {
    auto plan = tiny_plan();
    plan.population = 3;
    const auto table = compare_sgt_mlst(plan);
    const std::string text = report::comparison_table_text(table);
    EXPECT_NE(text.find("d=3"), std::string::npos);
    EXPECT_NE(text.find("d=5"), std::string::npos);
    // high count level first
    EXPECT_LT(text.find("\n10000 "), text.find("\n100 "));
    EXPECT_EQ(count_of(report::comparison_table_csv(table), "\n"), 1U + 8U);
}
