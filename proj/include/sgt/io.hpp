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
 * @file io.hpp
 * Artifact formats.
 *
 * Structured objects (run configs, plans, trajectories, tomograms, density
 * matrices) are JSON. Complex numbers are [re, im] pairs, perturbation
 * entries are the strings "1", "-1", "i", "-i". Doubles are written with
 * round-trip precision so a stored trajectory compares bit-exact with a
 * regenerated one.
 *
 * Tables are comma-separated text with a header row:
 *   trajectory: k,beta,alpha,n_plus,n_minus,delta_n,infidelity,re_0,im_0,...
 *   summary:    iteration,median,q25,q75
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "engine.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "measurement.hpp"
#include "mle.hpp"
#include "qudit.hpp"
#include "random.hpp"
#include "stats.hpp"

namespace sgt::io {

using json = nlohmann::json;

inline constexpr std::string_view kTrajectoryFormat = "sgt-trajectory";
inline constexpr std::string_view kTomogramFormat = "sgt-tomogram";
inline constexpr std::string_view kDensityMatrixFormat = "sgt-density-matrix";
inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Reading helpers

/// Parses `text` (// and /* */ comments allowed); syntax errors name the
/// source with line and column.
[[nodiscard]] inline json parse_json(std::string_view text, const std::string &source) {
    try {
        return json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/true,
                           /*ignore_comments=*/true);
    } catch (const json::parse_error &e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        // Keep the parser's reason, drop its own (byte-offset) location prefix.
        std::string reason = e.what();
        if (const auto pos = reason.find(": "); pos != std::string::npos) {
            reason = reason.substr(pos + 2);
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col),
                          "malformed JSON (" + reason + ")");
    }
}

[[nodiscard]] inline std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[nodiscard]] inline json load_json_file(const std::filesystem::path &path) {
    return parse_json(read_text_file(path), path.string());
}

inline void write_text_file(const std::filesystem::path &path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

/// Typed access to the members of one JSON object. Every failure names the
/// dotted field path; unknown members are rejected by finish().
class FieldReader {
  public:
    FieldReader(const json &obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    [[nodiscard]] std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    [[nodiscard]] const json *find(std::string_view key) {
        seen_.emplace(key);
        const auto it = obj_.find(std::string(key));
        return it == obj_.end() ? nullptr : &*it;
    }

    template <typename T> [[nodiscard]] T get(std::string_view key, T fallback) {
        const json *v = find(key);
        return v == nullptr ? fallback : convert<T>(*v, field(key));
    }

    template <typename T> [[nodiscard]] T require(std::string_view key) {
        const json *v = find(key);
        if (v == nullptr) {
            throw ConfigError(field(key), "missing required field");
        }
        return convert<T>(*v, field(key));
    }

    void finish() const {
        for (const auto &[key, value] : obj_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(field(key), "unknown field");
            }
        }
    }

    template <typename T> [[nodiscard]] static T convert(const json &v, const std::string &where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                throw ConfigError(where, "expected a nonnegative integer");
            }
            return v.get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where, "expected a number");
            return v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where, "expected a string");
            return v.get<std::string>();
        } else {
            return v.get<T>();
        }
    }

  private:
    const json &obj_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

// ---------------------------------------------------------------------------
// Qudit values

[[nodiscard]] inline json complex_vector_to_json(const ComplexVector &v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(json::array({v[i].real(), v[i].imag()}));
    }
    return arr;
}

[[nodiscard]] inline ComplexVector complex_vector_from_json(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(where, "expected a nonempty array of [re, im] pairs");
    }
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json &c = j[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (c.is_number()) {
            v[static_cast<Eigen::Index>(i)] = c.get<double>();
        } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
            v[static_cast<Eigen::Index>(i)] = Complex{c[0].get<double>(), c[1].get<double>()};
        } else {
            throw ConfigError(at, "expected a number or an [re, im] pair");
        }
    }
    return v;
}

[[nodiscard]] inline json state_to_json(const QuditState &s) { return complex_vector_to_json(s.amplitudes()); }

/// Input amplitudes are normalized on load.
[[nodiscard]] inline QuditState state_from_json(const json &j, const std::string &where) {
    try {
        return QuditState{complex_vector_from_json(j, where)};
    } catch (const DegenerateState &e) {
        throw ConfigError(where, e.what());
    }
}

[[nodiscard]] inline std::string_view phase_unit_name(PhaseUnit u) noexcept {
    switch (u) {
    case PhaseUnit::PlusOne:
        return "1";
    case PhaseUnit::MinusOne:
        return "-1";
    case PhaseUnit::PlusI:
        return "i";
    case PhaseUnit::MinusI:
        return "-i";
    }
    return "1";
}

[[nodiscard]] inline json direction_to_json(const PerturbationDirection &d) {
    json arr = json::array();
    for (const auto u : d.entries()) {
        arr.push_back(phase_unit_name(u));
    }
    return arr;
}

[[nodiscard]] inline PerturbationDirection direction_from_json(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(where, "expected a nonempty array");
    }
    std::vector<PhaseUnit> entries;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string s = j[i].is_string() ? j[i].get<std::string>() : "";
        if (s == "1") {
            entries.push_back(PhaseUnit::PlusOne);
        } else if (s == "-1") {
            entries.push_back(PhaseUnit::MinusOne);
        } else if (s == "i") {
            entries.push_back(PhaseUnit::PlusI);
        } else if (s == "-i") {
            entries.push_back(PhaseUnit::MinusI);
        } else {
            throw ConfigError(where + "[" + std::to_string(i) + "]", "expected one of \"1\", \"-1\", \"i\", \"-i\"");
        }
    }
    return PerturbationDirection{std::move(entries)};
}

// ---------------------------------------------------------------------------
// Models and configs

[[nodiscard]] inline json to_json(const GainSchedule &g) {
    return {{"a", g.a}, {"A", g.A}, {"s", g.s}, {"b", g.b}, {"t", g.t}};
}

[[nodiscard]] inline GainSchedule schedule_from_json(const json &j, const std::string &path) {
    FieldReader r(j, path);
    GainSchedule g;
    g.a = r.get("a", g.a);
    g.A = r.get("A", g.A);
    g.s = r.get("s", g.s);
    g.b = r.get("b", g.b);
    g.t = r.get("t", g.t);
    r.finish();
    return g;
}

[[nodiscard]] inline json to_json(const NoiseModel &n) {
    return {{"max_counts", n.max_counts},
            {"crosstalk", n.crosstalk},
            {"electronic_mean", n.electronic_mean},
            {"electronic_std", n.electronic_std},
            {"subtraction_offset", n.subtraction_offset},
            {"shot_noise", n.shot_noise},
            {"electronic_noise", n.electronic_noise},
            {"crosstalk_enabled", n.crosstalk_enabled}};
}

[[nodiscard]] inline NoiseModel noise_from_json(const json &j, const std::string &path, NoiseModel n = {}) {
    FieldReader r(j, path);
    n.max_counts = r.get("max_counts", n.max_counts);
    n.crosstalk = r.get("crosstalk", n.crosstalk);
    n.electronic_mean = r.get("electronic_mean", n.electronic_mean);
    n.electronic_std = r.get("electronic_std", n.electronic_std);
    n.subtraction_offset = r.get("subtraction_offset", n.subtraction_offset);
    n.shot_noise = r.get("shot_noise", n.shot_noise);
    n.electronic_noise = r.get("electronic_noise", n.electronic_noise);
    n.crosstalk_enabled = r.get("crosstalk_enabled", n.crosstalk_enabled);
    r.finish();
    if (n.max_counts == 0) throw ConfigError(r.field("max_counts"), "must be positive");
    if (!(n.crosstalk >= 0.0 && n.crosstalk < 1.0)) throw ConfigError(r.field("crosstalk"), "must lie in [0, 1)");
    if (!(n.electronic_mean >= 0.0)) throw ConfigError(r.field("electronic_mean"), "must be nonnegative");
    if (!(n.electronic_std >= 0.0)) throw ConfigError(r.field("electronic_std"), "must be nonnegative");
    if (!(n.subtraction_offset >= 0.0 && n.subtraction_offset <= n.electronic_mean)) {
        throw ConfigError(r.field("subtraction_offset"), "must lie in [0, electronic_mean]");
    }
    return n;
}

[[nodiscard]] inline json to_json(const PreparationModel &p) {
    json j{{"infidelity_std", p.infidelity_std}, {"seed", p.seed}};
    j["mean_infidelity"] = p.mean_infidelity ? json(*p.mean_infidelity) : json(nullptr);
    return j;
}

/// `mean_infidelity` may be null or "auto" for the per-dimension default.
[[nodiscard]] inline PreparationModel prep_from_json(const json &j, const std::string &path) {
    FieldReader r(j, path);
    PreparationModel p;
    if (const json *m = r.find("mean_infidelity"); m != nullptr && !m->is_null() &&
                                                   !(m->is_string() && m->get<std::string>() == "auto")) {
        p.mean_infidelity = FieldReader::convert<double>(*m, r.field("mean_infidelity"));
    }
    p.infidelity_std = r.get("infidelity_std", p.infidelity_std);
    p.seed = r.get<std::uint64_t>("seed", p.seed);
    r.finish();
    if (p.mean_infidelity && !(*p.mean_infidelity >= 0.0 && *p.mean_infidelity < 1.0)) {
        throw ConfigError(r.field("mean_infidelity"), "must lie in [0, 1)");
    }
    if (!(p.infidelity_std >= 0.0)) {
        throw ConfigError(r.field("infidelity_std"), "must be nonnegative");
    }
    return p;
}

[[nodiscard]] inline OracleKind oracle_from_string(const std::string &s, const std::string &where) {
    if (s == "mqpg") return OracleKind::Mqpg;
    if (s == "exact") return OracleKind::Exact;
    throw ConfigError(where, "expected \"mqpg\" or \"exact\"");
}

[[nodiscard]] inline json to_json(const SgtConfig &c) {
    json j{{"dim", c.dim}, {"iterations", c.iterations}, {"seed", c.seed}, {"schedule", to_json(c.schedule)}};
    if (c.initial_guess) {
        j["initial_guess"] = state_to_json(*c.initial_guess);
    }
    return j;
}

[[nodiscard]] inline SgtConfig sgt_config_from_json(const json &j, const std::string &path) {
    FieldReader r(j, path);
    SgtConfig c;
    c.dim = r.require<std::size_t>("dim");
    c.iterations = r.require<std::size_t>("iterations");
    c.seed = r.get<std::uint64_t>("seed", 0);
    if (const json *s = r.find("schedule")) {
        c.schedule = schedule_from_json(*s, r.field("schedule"));
    }
    if (const json *g = r.find("initial_guess")) {
        c.initial_guess = state_from_json(*g, r.field("initial_guess"));
    }
    r.finish();
    if (c.dim == 0) throw ConfigError(r.field("dim"), "must be positive");
    if (c.iterations == 0) throw ConfigError(r.field("iterations"), "must be at least 1");
    if (c.initial_guess && c.initial_guess->dim() != c.dim) {
        throw ConfigError(r.field("initial_guess"), "has " + std::to_string(c.initial_guess->dim()) +
                                                        " amplitudes, expected " + std::to_string(c.dim));
    }
    return c;
}

[[nodiscard]] inline json to_json(const RunSpec &s) {
    json j{{"sgt", to_json(s.sgt)},          {"target_seed", s.target_seed}, {"noise", to_json(s.noise)},
           {"prep", to_json(s.prep)},        {"oracle", to_string(s.oracle)}, {"noise_seed", s.noise_seed}};
    if (s.target) {
        j["target"] = state_to_json(*s.target);
    }
    return j;
}

[[nodiscard]] inline RunSpec run_spec_from_json(const json &j, const std::string &path = "") {
    FieldReader r(j, path);
    RunSpec s;
    s.sgt = sgt_config_from_json(r.require<json>("sgt"), r.field("sgt"));
    if (const json *t = r.find("target")) {
        s.target = state_from_json(*t, r.field("target"));
        if (s.target->dim() != s.sgt.dim) {
            throw ConfigError(r.field("target"), "dimension differs from sgt.dim");
        }
    }
    s.target_seed = r.get<std::uint64_t>("target_seed", 0);
    if (const json *n = r.find("noise")) {
        s.noise = noise_from_json(*n, r.field("noise"));
    }
    if (const json *p = r.find("prep")) {
        s.prep = prep_from_json(*p, r.field("prep"));
    }
    s.oracle = oracle_from_string(r.get<std::string>("oracle", "mqpg"), r.field("oracle"));
    s.noise_seed = r.get<std::uint64_t>("noise_seed", 0);
    r.finish();
    s.sgt.schedule.validate();
    return s;
}

[[nodiscard]] inline json to_json(const ExperimentPlan &p) {
    json iters = json::object();
    for (const auto &[d, k] : p.iterations) {
        iters[std::to_string(d)] = k;
    }
    return {{"dims", p.dims},
            {"count_levels", p.count_levels},
            {"population", p.population},
            {"iterations", iters},
            {"base_seed", p.base_seed},
            {"schedule", to_json(p.schedule)},
            {"noise", to_json(p.noise)},
            {"prep", to_json(p.prep)},
            {"oracle", to_string(p.oracle)},
            {"scales",
             {{"environmental", p.scales.environmental},
              {"crosstalk", p.scales.crosstalk},
              {"preparation", p.scales.preparation}}},
            {"budget", {{"dims", p.budget.dims}, {"count_levels", p.budget.count_levels}}},
            {"mle", {{"max_iter", p.mle.max_iter}, {"tol", p.mle.tol}}},
            {"workers", p.workers}};
}

namespace detail {

template <typename T> std::vector<T> read_list(const json &j, const std::string &where) {
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array");
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(FieldReader::convert<T>(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

} // namespace detail

/// Every member is optional; absent members keep the ExperimentPlan defaults.
[[nodiscard]] inline ExperimentPlan plan_from_json(const json &j, const std::string &path = "") {
    FieldReader r(j, path);
    ExperimentPlan p;
    if (const json *v = r.find("dims")) p.dims = detail::read_list<std::size_t>(*v, r.field("dims"));
    if (const json *v = r.find("count_levels")) {
        p.count_levels = detail::read_list<std::uint64_t>(*v, r.field("count_levels"));
    }
    p.population = r.get<std::size_t>("population", p.population);
    if (const json *v = r.find("iterations")) {
        FieldReader ir(*v, r.field("iterations"));
        for (const auto &[key, value] : v->items()) {
            std::size_t d = 0;
            const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), d);
            if (ec != std::errc{} || ptr != key.data() + key.size()) {
                throw ConfigError(ir.field(key), "keys must be dimensions");
            }
            p.iterations[d] = ir.require<std::size_t>(key);
        }
    }
    p.base_seed = r.get<std::uint64_t>("base_seed", p.base_seed);
    if (const json *v = r.find("schedule")) p.schedule = schedule_from_json(*v, r.field("schedule"));
    if (const json *v = r.find("noise")) p.noise = noise_from_json(*v, r.field("noise"));
    if (const json *v = r.find("prep")) p.prep = prep_from_json(*v, r.field("prep"));
    p.oracle = oracle_from_string(r.get<std::string>("oracle", "mqpg"), r.field("oracle"));
    if (const json *v = r.find("scales")) {
        FieldReader sr(*v, r.field("scales"));
        p.scales.environmental = sr.get("environmental", 1.0);
        p.scales.crosstalk = sr.get("crosstalk", 1.0);
        p.scales.preparation = sr.get("preparation", 1.0);
        sr.finish();
    }
    if (const json *v = r.find("budget")) {
        FieldReader br(*v, r.field("budget"));
        if (const json *b = br.find("dims")) p.budget.dims = detail::read_list<std::size_t>(*b, br.field("dims"));
        if (const json *b = br.find("count_levels")) {
            p.budget.count_levels = detail::read_list<std::uint64_t>(*b, br.field("count_levels"));
        }
        br.finish();
    }
    if (const json *v = r.find("mle")) {
        FieldReader mr(*v, r.field("mle"));
        p.mle.max_iter = mr.get<std::size_t>("max_iter", p.mle.max_iter);
        p.mle.tol = mr.get("tol", p.mle.tol);
        mr.finish();
    }
    p.workers = r.get<std::size_t>("workers", p.workers);
    r.finish();
    p.validate();
    return p;
}

/// FNV-1a of the canonical (sorted-key, compact) dump, as 16 hex digits.
[[nodiscard]] inline std::string config_hash(const json &config) {
    const std::uint64_t h = sgt::detail::fnv1a(config.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Trajectories

[[nodiscard]] inline json optional_number(const std::optional<double> &v) {
    return v ? json(*v) : json(nullptr);
}

[[nodiscard]] inline json to_json(const IterationRecord &rec) {
    return {{"k", rec.k},
            {"direction", direction_to_json(rec.direction)},
            {"beta", rec.beta},
            {"alpha", rec.alpha},
            {"n_plus", rec.counts_plus},
            {"n_minus", rec.counts_minus},
            {"delta_n", rec.delta_n},
            {"estimate", state_to_json(rec.estimate)},
            {"infidelity", optional_number(rec.infidelity_vs_target)},
            {"zero_signal", rec.zero_signal},
            {"degenerate_update", rec.degenerate_update}};
}

[[nodiscard]] inline IterationRecord record_from_json(const json &j, const std::string &path) {
    FieldReader r(j, path);
    std::optional<double> inf;
    if (const json *v = r.find("infidelity"); v != nullptr && !v->is_null()) {
        inf = FieldReader::convert<double>(*v, r.field("infidelity"));
    }
    IterationRecord rec{r.require<std::size_t>("k"),
                        direction_from_json(r.require<json>("direction"), r.field("direction")),
                        r.require<double>("beta"),
                        r.require<double>("alpha"),
                        r.require<std::uint64_t>("n_plus"),
                        r.require<std::uint64_t>("n_minus"),
                        r.require<double>("delta_n"),
                        state_from_json(r.require<json>("estimate"), r.field("estimate")),
                        inf,
                        r.get("zero_signal", false),
                        r.get("degenerate_update", false)};
    r.finish();
    return rec;
}

/// A run as persisted: its replayable spec plus the recorded trajectory.
struct StoredRun {
    RunSpec spec;
    Trajectory trajectory;
};

[[nodiscard]] inline json trajectory_to_json(const RunSpec &spec, const RunResult &run) {
    json records = json::array();
    for (const auto &rec : run.trajectory.records) {
        records.push_back(to_json(rec));
    }
    return {{"format", kTrajectoryFormat},
            {"version", kFormatVersion},
            {"spec", to_json(spec)},
            {"target", state_to_json(run.target)},
            {"prepared", state_to_json(run.prepared.state)},
            {"prepared_infidelity", run.prepared.infidelity},
            {"initial_estimate", state_to_json(run.trajectory.initial_estimate)},
            {"records", std::move(records)},
            {"final_estimate", state_to_json(run.trajectory.final_estimate())},
            {"final_fidelity", run.final_fidelity()},
            {"final_fidelity_to_prepared", run.final_fidelity_to_prepared()}};
}

[[nodiscard]] inline StoredRun trajectory_from_json(const json &j, const std::string &source = "") {
    FieldReader r(j, source);
    if (r.get<std::string>("format", "") != kTrajectoryFormat) {
        throw ConfigError(r.field("format"), "not a trajectory file");
    }
    (void)r.get<std::size_t>("version", kFormatVersion);
    RunSpec spec = run_spec_from_json(r.require<json>("spec"), r.field("spec"));
    QuditState initial = state_from_json(r.require<json>("initial_estimate"), r.field("initial_estimate"));
    const json &recs = r.require<json>("records");
    if (!recs.is_array()) {
        throw ConfigError(r.field("records"), "expected an array");
    }
    Trajectory traj{spec.sgt, std::move(initial), {}};
    for (std::size_t i = 0; i < recs.size(); ++i) {
        traj.records.push_back(record_from_json(recs[i], r.field("records") + "[" + std::to_string(i) + "]"));
    }
    // Diagnostics are derived data; accept them without re-checking.
    for (const auto *key : {"target", "prepared", "prepared_infidelity", "final_estimate", "final_fidelity",
                            "final_fidelity_to_prepared"}) {
        (void)r.find(key);
    }
    r.finish();
    return {std::move(spec), std::move(traj)};
}

[[nodiscard]] inline StoredRun load_trajectory(const std::filesystem::path &path) {
    const json j = load_json_file(path);
    try {
        return trajectory_from_json(j);
    } catch (const ConfigError &e) {
        throw ConfigError(path.string(), e.what());
    }
}

[[nodiscard]] inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline std::string trajectory_csv(const Trajectory &traj) {
    std::ostringstream out;
    out << "k,beta,alpha,n_plus,n_minus,delta_n,infidelity";
    for (std::size_t j = 0; j < traj.config.dim; ++j) {
        out << ",re_" << j << ",im_" << j;
    }
    out << '\n';
    for (const auto &rec : traj.records) {
        out << rec.k << ',' << format_double(rec.beta) << ',' << format_double(rec.alpha) << ','
            << rec.counts_plus << ',' << rec.counts_minus << ',' << format_double(rec.delta_n) << ','
            << format_double(rec.infidelity_vs_target.value_or(std::nan("")));
        for (std::size_t j = 0; j < rec.estimate.dim(); ++j) {
            out << ',' << format_double(rec.estimate[j].real()) << ',' << format_double(rec.estimate[j].imag());
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Summaries

[[nodiscard]] inline std::string summary_csv(const SummaryStats &s) {
    std::ostringstream out;
    out << "iteration,median,q25,q75\n";
    for (std::size_t k = 0; k < s.iterations(); ++k) {
        out << (k + 1) << ',' << format_double(s.median[k]) << ',' << format_double(s.lower_quartile[k]) << ','
            << format_double(s.upper_quartile[k]) << '\n';
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

inline double parse_double(const std::string &s, const std::string &where) {
    if (s == "nan") {
        return std::nan("");
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError(where, "expected a number, got '" + s + "'");
    }
}

} // namespace detail

[[nodiscard]] inline SummaryStats parse_summary_csv(std::string_view text, const std::string &source) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    SummaryStats s;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(lineno);
        const auto cells = detail::split(line, ',');
        if (lineno == 1) {
            if (cells.size() != 4 || cells[0] != "iteration" || cells[1] != "median") {
                throw ConfigError(where, "expected header iteration,median,q25,q75");
            }
            continue;
        }
        if (cells.size() != 4) {
            throw ConfigError(where, "expected 4 columns");
        }
        s.median.push_back(detail::parse_double(cells[1], where));
        s.lower_quartile.push_back(detail::parse_double(cells[2], where));
        s.upper_quartile.push_back(detail::parse_double(cells[3], where));
    }
    if (lineno == 0) {
        throw ConfigError(source, "empty summary file");
    }
    return s;
}

[[nodiscard]] inline json to_json(const SummaryStats &s) {
    return {{"population", s.population},
            {"median", s.median},
            {"q25", s.lower_quartile},
            {"q75", s.upper_quartile}};
}

// ---------------------------------------------------------------------------
// Tomography artifacts

[[nodiscard]] inline json tomogram_to_json(const ProjectorSet &set, std::span<const std::uint64_t> counts) {
    json projectors = json::array();
    for (const auto &p : set.projectors()) {
        projectors.push_back(state_to_json(p));
    }
    return {{"format", kTomogramFormat},
            {"version", kFormatVersion},
            {"projectors", std::move(projectors)},
            {"counts", std::vector<std::uint64_t>(counts.begin(), counts.end())}};
}

struct Tomogram {
    ProjectorSet set;
    std::vector<std::uint64_t> counts;
};

[[nodiscard]] inline Tomogram tomogram_from_json(const json &j, const std::string &source = "") {
    FieldReader r(j, source);
    if (r.get<std::string>("format", "") != kTomogramFormat) {
        throw ConfigError(r.field("format"), "not a tomogram file");
    }
    (void)r.get<std::size_t>("version", kFormatVersion);
    const json &pj = r.require<json>("projectors");
    if (!pj.is_array()) {
        throw ConfigError(r.field("projectors"), "expected an array");
    }
    std::vector<QuditState> states;
    for (std::size_t i = 0; i < pj.size(); ++i) {
        states.push_back(state_from_json(pj[i], r.field("projectors") + "[" + std::to_string(i) + "]"));
    }
    auto counts = detail::read_list<std::uint64_t>(r.require<json>("counts"), r.field("counts"));
    r.finish();
    if (counts.size() != states.size()) {
        throw ConfigError(r.field("counts"), "length differs from projectors");
    }
    return {ProjectorSet{std::move(states)}, std::move(counts)};
}

[[nodiscard]] inline json density_matrix_to_json(const DensityMatrix &rho) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
        rows.push_back(complex_vector_to_json(rho.matrix().row(i).transpose()));
    }
    return {{"format", kDensityMatrixFormat}, {"version", kFormatVersion}, {"entries", std::move(rows)}};
}

[[nodiscard]] inline DensityMatrix density_matrix_from_json(const json &j, const std::string &source = "") {
    FieldReader r(j, source);
    if (r.get<std::string>("format", "") != kDensityMatrixFormat) {
        throw ConfigError(r.field("format"), "not a density-matrix file");
    }
    (void)r.get<std::size_t>("version", kFormatVersion);
    const json &rows = r.require<json>("entries");
    r.finish();
    if (!rows.is_array() || rows.empty()) {
        throw ConfigError(r.field("entries"), "expected a nonempty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string where = r.field("entries") + "[" + std::to_string(i) + "]";
        const ComplexVector row = complex_vector_from_json(rows[static_cast<std::size_t>(i)], where);
        if (row.size() != n) {
            throw ConfigError(where, "row length differs from the number of rows");
        }
        m.row(i) = row.transpose();
    }
    try {
        return DensityMatrix{std::move(m)};
    } catch (const NonPhysicalState &e) {
        throw ConfigError(r.field("entries"), e.what());
    }
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
    std::string path;
    std::string kind;
    std::string config_hash;
};

/// Writes `manifest.json` listing every artifact of an output directory.
inline void write_manifest(const std::filesystem::path &dir, const std::string &command, const json &config,
                           const std::vector<ManifestEntry> &entries) {
    json arts = json::array();
    for (const auto &e : entries) {
        arts.push_back({{"path", e.path}, {"kind", e.kind}, {"config_hash", e.config_hash}});
    }
    const json manifest{{"command", command},
                        {"config_hash", config_hash(config)},
                        {"config", config},
                        {"artifacts", std::move(arts)}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace sgt::io
