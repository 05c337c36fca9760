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

// Subcommands of the `sgt` tool. Kept in a header so tests can drive the
// same entry point in-process.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sgt/sgt.hpp"

namespace sgt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
/// Some requested runs failed, or a replay did not match.
inline constexpr int kExitRunFailure = 1;
/// Bad invocation, unreadable or invalid input, unwritable output.
inline constexpr int kExitError = 2;

struct Console {
    std::ostream &out;
    std::ostream &err;
    int verbosity = 0;

    void note(const std::string &msg) const {
        if (verbosity > 0) {
            err << msg << '\n';
        }
    }
};

namespace detail {

/// Loads a JSON config and converts it, prefixing field diagnostics with the
/// file name (syntax errors already carry file:line:col).
template <typename Convert>
auto load_config(const fs::path &path, Convert convert) {
    const json j = io::load_json_file(path);
    try {
        return convert(j);
    } catch (const ConfigError &e) {
        throw ConfigError(path.string(), e.what());
    }
}

/// Collects written artifacts for the manifest.
class Artifacts {
  public:
    Artifacts(fs::path dir, const Console &console) : dir_(std::move(dir)), console_(console) {}

    void write(const std::string &rel, std::string_view content, const std::string &kind, const std::string &hash) {
        io::write_text_file(dir_ / rel, content);
        entries_.push_back({rel, kind, hash});
        console_.note("wrote " + (dir_ / rel).string());
    }

    void finish(const std::string &command, const json &config) const {
        io::write_manifest(dir_, command, config, entries_);
    }

  private:
    fs::path dir_;
    const Console &console_;
    std::vector<io::ManifestEntry> entries_;
};

inline std::string percent(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * v << '%';
    return s.str();
}

inline std::string run_file_name(std::size_t index) {
    std::ostringstream s;
    s << "run_" << std::setw(4) << std::setfill('0') << index << ".json";
    return s.str();
}

inline json failures_json(const std::vector<Failure> &failures) {
    json arr = json::array();
    for (const auto &f : failures) {
        arr.push_back({{"condition", f.condition.key()}, {"dim", f.condition.dim},
                       {"max_counts", f.condition.max_counts}, {"label", f.condition.label},
                       {"index", f.index}, {"error", f.error}});
    }
    return arr;
}

inline void report_failures(const Console &console, const std::vector<Failure> &failures) {
    for (const auto &f : failures) {
        console.err << "run failed: " << f.condition.key() << " #" << f.index << ": " << f.error << '\n';
    }
}

/// Median fidelity at the last iteration and the first iteration whose
/// median reaches 90%.
inline std::string describe(const SummaryStats &s) {
    std::ostringstream line;
    line << "final median fidelity " << percent(1.0 - s.final_median()) << " [" << percent(1.0 - s.final_upper())
         << ", " << percent(1.0 - s.final_lower()) << "]";
    const std::size_t k90 = s.iterations_to_reach(0.1);
    line << ", 90% after " << (k90 == 0 ? std::string("never") : std::to_string(k90));
    return line.str();
}

inline void override_plan(ExperimentPlan &plan, const std::optional<std::uint64_t> &seed,
                          const std::optional<std::size_t> &workers) {
    if (seed) {
        plan.base_seed = *seed;
    }
    if (workers) {
        plan.workers = *workers;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

struct RunOptions {
    fs::path config;
    fs::path out;
    std::optional<std::uint64_t> seed;
};

/// One run from a run config. A seed override replaces the estimator, noise
/// and preparation seeds; the target stays put.
inline int cmd_run(const RunOptions &opt, const Console &console) {
    RunSpec spec = detail::load_config(opt.config, [](const json &j) { return io::run_spec_from_json(j); });
    if (opt.seed) {
        spec.sgt.seed = *opt.seed;
        spec.noise_seed = derive_seed(*opt.seed, "noise");
        spec.prep.seed = derive_seed(*opt.seed, "prep");
    }
    const RunResult result = execute_run(spec);
    const json config = io::to_json(spec);
    const std::string hash = io::config_hash(config);

    detail::Artifacts artifacts(opt.out, console);
    artifacts.write("trajectory.json", io::trajectory_to_json(spec, result).dump(2) + "\n", "trajectory", hash);
    artifacts.write("trajectory.csv", io::trajectory_csv(result.trajectory), "trajectory-table", hash);
    artifacts.finish("run", config);

    console.out << "d=" << spec.sgt.dim << " N=" << spec.noise.max_counts << " iterations "
                << result.trajectory.records.size() << '\n'
                << "final fidelity " << io::format_double(result.final_fidelity()) << '\n'
                << "final infidelity " << io::format_double(1.0 - result.final_fidelity()) << '\n';
    return kExitOk;
}

struct PlanOptions {
    fs::path config;
    fs::path out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    bool summaries_only = false;
};

inline ExperimentPlan load_plan(const PlanOptions &opt) {
    ExperimentPlan plan;
    if (!opt.config.empty()) {
        plan = detail::load_config(opt.config, [](const json &j) { return io::plan_from_json(j); });
    }
    detail::override_plan(plan, opt.seed, opt.workers);
    plan.validate();
    return plan;
}

/// Writes a batch: per-run trajectories, per-condition summaries, and a
/// failure list. Nonzero exit iff any run failed.
inline int emit_batch(const ExperimentPlan &plan, const BatchResult &batch, const PlanOptions &opt,
                      const Console &console) {
    const json config = io::to_json(plan);
    const std::string hash = io::config_hash(config);

    detail::Artifacts artifacts(opt.out, console);
    for (const auto &cond : batch.conditions) {
        const std::string key = cond.condition.key();
        if (!opt.summaries_only) {
            for (const auto &run : cond.runs) {
                if (run.ok()) {
                    artifacts.write("runs/" + key + "/" + detail::run_file_name(run.index),
                                    io::trajectory_to_json(run.spec, *run.result).dump() + "\n", "trajectory",
                                    io::config_hash(io::to_json(run.spec)));
                }
            }
        }
        const SummaryStats stats = cond.summary();
        if (stats.population > 0) {
            artifacts.write("summary_" + key + ".csv", io::summary_csv(stats), "summary", hash);
            console.out << key << ": " << detail::describe(stats) << '\n';
        } else {
            console.out << key << ": no completed runs\n";
        }
    }
    const auto failures = batch.failures();
    artifacts.write("failures.json", detail::failures_json(failures).dump(2) + "\n", "failures", hash);
    artifacts.finish("batch", config);
    detail::report_failures(console, failures);
    return failures.empty() ? kExitOk : kExitRunFailure;
}

inline int cmd_batch(const PlanOptions &opt, const Console &console) {
    const ExperimentPlan plan = load_plan(opt);
    return emit_batch(plan, run_batch(plan), opt, console);
}

/// Error-budget matrix: one summary per (d, N, toggle) and a digest table.
inline int cmd_budget(const PlanOptions &opt, const Console &console) {
    const ExperimentPlan plan = load_plan(opt);
    const auto entries = run_error_budget(plan);
    const json config = io::to_json(plan);
    const std::string hash = io::config_hash(config);

    detail::Artifacts artifacts(opt.out, console);
    bool incomplete = false;
    for (const auto &e : entries) {
        if (e.stats.population < plan.population) {
            incomplete = true;
            console.err << "condition " << e.condition.key() << ": only " << e.stats.population << " of "
                        << plan.population << " runs completed\n";
        }
        if (e.stats.population == 0) {
            continue;
        }
        artifacts.write("summary_" + e.condition.key() + ".csv", io::summary_csv(e.stats), "summary", hash);
        console.out << e.condition.key() << ": " << detail::describe(e.stats) << '\n';
    }
    artifacts.write("budget.csv", report::budget_csv(entries), "budget-table", hash);
    artifacts.finish("budget", config);
    return incomplete ? kExitRunFailure : kExitOk;
}

/// SGT against single-channel MLST on the same states and noise.
inline int cmd_compare(const PlanOptions &opt, const Console &console) {
    const ExperimentPlan plan = load_plan(opt);
    const ComparisonTable table = compare_sgt_mlst(plan);
    const json config = io::to_json(plan);
    const std::string hash = io::config_hash(config);

    detail::Artifacts artifacts(opt.out, console);
    const std::string text = report::comparison_table_text(table);
    artifacts.write("comparison.txt", text, "comparison-table", hash);
    artifacts.write("comparison.csv", report::comparison_table_csv(table), "comparison-table", hash);
    artifacts.write("failures.json", detail::failures_json(table.failures).dump(2) + "\n", "failures", hash);
    artifacts.finish("compare", config);
    console.out << text;
    detail::report_failures(console, table.failures);
    return table.failures.empty() ? kExitOk : kExitRunFailure;
}

struct FilesOptions {
    std::vector<fs::path> inputs;
    fs::path out;
};

/// Median and quartiles over stored trajectories.
inline int cmd_summarize(const FilesOptions &opt, const Console &console) {
    if (opt.inputs.empty()) {
        throw Error("summarize needs at least one trajectory file");
    }
    std::vector<Trajectory> trajectories;
    json sources = json::array();
    for (const auto &p : opt.inputs) {
        trajectories.push_back(io::load_trajectory(p).trajectory);
        sources.push_back(p.generic_string());
    }
    const SummaryStats stats = summarize(trajectories);
    const json config{{"inputs", sources}};

    detail::Artifacts artifacts(opt.out, console);
    artifacts.write("summary.csv", io::summary_csv(stats), "summary", io::config_hash(config));
    artifacts.finish("summarize", config);
    console.out << stats.population << " trajectories: " << detail::describe(stats) << '\n';
    return kExitOk;
}

struct PlotOptions {
    std::vector<fs::path> inputs;
    std::vector<std::string> labels;
    fs::path out;
    std::string title = "Infidelity versus iteration";
    bool linear = false;
};

/// One series per input: summary CSVs as written by batch/summarize, or a
/// trajectory JSON (a single run, so its band has zero width).
inline std::vector<report::PlotSeries> load_series(const PlotOptions &opt) {
    if (opt.inputs.empty()) {
        throw Error("plot needs at least one input file");
    }
    if (!opt.labels.empty() && opt.labels.size() != opt.inputs.size()) {
        throw Error("got " + std::to_string(opt.labels.size()) + " labels for " +
                    std::to_string(opt.inputs.size()) + " inputs");
    }
    std::vector<report::PlotSeries> series;
    for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
        const fs::path &p = opt.inputs[i];
        const std::string label = opt.labels.empty() ? p.stem().string() : opt.labels[i];
        if (p.extension() == ".json") {
            const std::vector<Trajectory> one{io::load_trajectory(p).trajectory};
            series.push_back({label, summarize(one)});
        } else {
            series.push_back({label, io::parse_summary_csv(io::read_text_file(p), p.string())});
        }
    }
    report::check_series(series);
    return series;
}

inline int cmd_plot(const PlotOptions &opt, const Console &console) {
    const auto series = load_series(opt);
    // Both outputs are rendered before anything touches the disk.
    const std::string svg = report::render_svg(series, opt.title, !opt.linear);
    const std::string data = report::plot_data_csv(series);
    json sources = json::array();
    for (std::size_t i = 0; i < series.size(); ++i) {
        sources.push_back({{"path", opt.inputs[i].generic_string()}, {"label", series[i].label}});
    }
    const json config{{"inputs", sources}, {"title", opt.title}, {"log_y", !opt.linear}};
    const std::string hash = io::config_hash(config);

    detail::Artifacts artifacts(opt.out, console);
    artifacts.write("figure.svg", svg, "figure", hash);
    artifacts.write("plot_data.csv", data, "figure-data", hash);
    artifacts.finish("plot", config);
    console.out << series.size() << " series, " << series.front().stats.iterations() << " iterations\n";
    return kExitOk;
}

struct ReplayOptions {
    std::vector<fs::path> inputs;
};

/// Regenerates each stored run from its config and seeds alone and demands
/// bit-identical records.
inline int cmd_replay(const ReplayOptions &opt, const Console &console) {
    if (opt.inputs.empty()) {
        throw Error("replay needs at least one trajectory file");
    }
    std::size_t mismatches = 0;
    for (const auto &p : opt.inputs) {
        const io::StoredRun stored = io::load_trajectory(p);
        const Trajectory fresh = execute_run(stored.spec).trajectory;
        if (fresh == stored.trajectory) {
            console.out << p.string() << ": match (" << fresh.records.size() << " iterations)\n";
            continue;
        }
        ++mismatches;
        std::size_t k = 0;
        const std::size_t n = std::min(fresh.records.size(), stored.trajectory.records.size());
        while (k < n && fresh.records[k] == stored.trajectory.records[k]) {
            ++k;
        }
        console.out << p.string() << ": MISMATCH";
        if (fresh.initial_estimate != stored.trajectory.initial_estimate) {
            console.out << " in the initial estimate";
        } else if (k < n) {
            console.out << " at iteration " << k;
        } else {
            console.out << " in record count (" << stored.trajectory.records.size() << " stored, "
                        << fresh.records.size() << " regenerated)";
        }
        console.out << '\n';
    }
    return mismatches == 0 ? kExitOk : kExitRunFailure;
}

// ---------------------------------------------------------------------------
// Entry point

inline int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Self-guided tomography of qudit states: single runs, batch experiments, "
                 "error budgets, MLST comparisons, summaries and plots.",
                 "sgt"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("sgt 1.0.0"));
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Report every artifact written (stderr)");

    RunOptions run_opt;
    auto *run = app.add_subcommand("run", "Run one estimation from a run config");
    run->add_option("-c,--config", run_opt.config, "Run config (JSON)")->required();
    run->add_option("-o,--out", run_opt.out, "Output directory")->required();
    run->add_option("--seed", run_opt.seed, "Override the estimator, noise and preparation seeds");

    PlanOptions batch_opt;
    PlanOptions budget_opt;
    PlanOptions compare_opt;
    auto add_plan = [&app](const char *name, const char *help, PlanOptions &o) {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", o.config, "Experiment plan (JSON); built-in defaults when omitted");
        sub->add_option("-o,--out", o.out, "Output directory")->required();
        sub->add_option("--seed", o.seed, "Override the plan's base seed");
        sub->add_option("-j,--workers", o.workers, "Worker threads (0 = all cores)");
        return sub;
    };
    auto *batch = add_plan("batch", "Populations of random targets for every (d, N) of a plan", batch_opt);
    batch->add_flag("--summaries-only", batch_opt.summaries_only, "Skip per-run trajectory files");
    auto *budget = add_plan("budget", "Error-budget matrix: remove or scale each error source", budget_opt);
    auto *compare = add_plan("compare", "SGT versus single-channel MLST final fidelities", compare_opt);

    FilesOptions sum_opt;
    auto *summarize_cmd = app.add_subcommand("summarize", "Median and quartiles over trajectory files");
    summarize_cmd->add_option("inputs", sum_opt.inputs, "Trajectory JSON files")->check(CLI::ExistingFile);
    summarize_cmd->add_option("-o,--out", sum_opt.out, "Output directory")->required();

    PlotOptions plot_opt;
    auto *plot = app.add_subcommand("plot", "Infidelity curves with quartile bands (SVG + data table)");
    plot->add_option("inputs", plot_opt.inputs, "Summary CSV or trajectory JSON files, one series each");
    plot->add_option("-o,--out", plot_opt.out, "Output directory")->required();
    plot->add_option("-l,--label", plot_opt.labels, "Series labels, one per input (default: file stem)");
    plot->add_option("--title", plot_opt.title, "Figure title");
    plot->add_flag("--linear", plot_opt.linear, "Linear instead of logarithmic infidelity axis");

    ReplayOptions replay_opt;
    auto *replay = app.add_subcommand("replay", "Regenerate stored runs and require bit-identical output");
    replay->add_option("inputs", replay_opt.inputs, "Trajectory JSON files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    const Console console{out, err, verbosity};
    try {
        if (run->parsed()) return cmd_run(run_opt, console);
        if (batch->parsed()) return cmd_batch(batch_opt, console);
        if (budget->parsed()) return cmd_budget(budget_opt, console);
        if (compare->parsed()) return cmd_compare(compare_opt, console);
        if (summarize_cmd->parsed()) return cmd_summarize(sum_opt, console);
        if (plot->parsed()) return cmd_plot(plot_opt, console);
        if (replay->parsed()) return cmd_replay(replay_opt, console);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

} // namespace sgt::cli
