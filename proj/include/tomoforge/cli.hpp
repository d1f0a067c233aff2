// Copyright 2026 The Tomoforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Command bodies behind the `tomoforge` executable: JSON experiment configs,
 * CSV writers/readers and the run manifest.
 *
 * Exit codes: 0 success, 1 verification failure, 2 bad config / metric /
 * input schema, 3 I/O failure.
 */

#pragma once

#include "tomoforge/error.hpp"
#include "tomoforge/harness.hpp"
#include "tomoforge/verify.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tomoforge::cli {

inline constexpr std::string_view kConfigSchema = "tomoforge.experiment/1";
inline constexpr std::string_view kManifestSchema = "tomoforge.manifest/1";

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kIoError = 3 };

inline int exit_code_for(Errc code) {
    switch (code) {
    case Errc::Io:
        return kIoError;
    default:
        return kBadInput;
    }
}

// ---------------------------------------------------------------------------
// Config

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_error(const std::string &msg) {
    throw Error(Errc::ConfigParse, msg);
}

inline void reject_unknown(const json &obj, const std::set<std::string> &allowed,
                           const std::string &where) {
    if (!obj.is_object()) {
        config_error(where + " must be a JSON object");
    }
    for (const auto &[key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            config_error("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T> T get_as(const json &obj, const std::string &key, const std::string &where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception &e) {
        config_error(where + "." + key + ": " + e.what());
    }
}

inline MethodSpec parse_method(const json &m) {
    try {
        if (m.is_string()) {
            return parse_method_tag(m.get<std::string>());
        }
        reject_unknown(m, {"kind", "alpha", "beta"}, "method");
        const auto kind = get_as<std::string>(m, "kind", "method");
        if (kind == "MaxEnt") {
            if (m.contains("alpha") || m.contains("beta")) {
                config_error("MaxEnt takes no alpha/beta");
            }
            return MethodSpec::maxent();
        }
        if (kind == "PVQT") {
            return MethodSpec::pvqt(get_as<double>(m, "alpha", "method"),
                                    get_as<double>(m, "beta", "method"));
        }
        config_error("method kind must be MaxEnt or PVQT, got '" + kind + "'");
    } catch (const Error &e) {
        if (e.code() == Errc::ConfigParse) {
            throw;
        }
        config_error(std::string("bad method: ") + e.what());
    }
}

} // namespace detail

/// Parsed config plus the free-form label, which does not enter the hash.
struct LoadedConfig {
    ExperimentConfig config;
    std::string name;
};

inline LoadedConfig config_from_json(const nlohmann::json &j) {
    using detail::get_as;
    detail::reject_unknown(j,
                           {"schema", "name", "n_qubits", "n_states", "rank", "k_values",
                            "methods", "noise_level", "noise_model", "root_seed",
                            "convergence_cutoff", "sdp", "maxent", "record_wall_time"},
                           "config");
    if (!j.contains("schema") || !j.at("schema").is_string() ||
        j.at("schema").get<std::string>() != kConfigSchema) {
        detail::config_error("config.schema must be \"" + std::string(kConfigSchema) + "\"");
    }
    for (const char *required : {"n_qubits", "n_states", "k_values", "methods"}) {
        if (!j.contains(required)) {
            detail::config_error(std::string("config.") + required + " is required");
        }
    }
    LoadedConfig out;
    ExperimentConfig &c = out.config;
    if (j.contains("name")) out.name = get_as<std::string>(j, "name", "config");
    c.n_qubits = get_as<int>(j, "n_qubits", "config");
    c.n_states = get_as<std::size_t>(j, "n_states", "config");
    if (j.contains("rank")) c.rank = get_as<Eigen::Index>(j, "rank", "config");
    c.k_values = get_as<std::vector<std::size_t>>(j, "k_values", "config");
    if (!j.at("methods").is_array()) detail::config_error("config.methods must be an array");
    for (const auto &m : j.at("methods")) {
        c.methods.push_back(detail::parse_method(m));
    }
    if (j.contains("noise_level")) c.noise_level = get_as<double>(j, "noise_level", "config");
    if (j.contains("noise_model")) {
        const auto model = get_as<std::string>(j, "noise_model", "config");
        if (model == "relative") {
            c.noise_model = NoiseModel::Relative;
        } else if (model == "additive") {
            c.noise_model = NoiseModel::Additive;
        } else {
            detail::config_error("config.noise_model must be relative or additive");
        }
    }
    if (j.contains("root_seed")) c.root_seed.value = get_as<std::uint64_t>(j, "root_seed", "config");
    if (j.contains("convergence_cutoff")) {
        c.convergence_cutoff = get_as<double>(j, "convergence_cutoff", "config");
    }
    if (j.contains("sdp")) {
        const auto &s = j.at("sdp");
        detail::reject_unknown(s, {"tol", "max_iter"}, "config.sdp");
        if (s.contains("tol")) c.sdp.tol = get_as<double>(s, "tol", "config.sdp");
        if (s.contains("max_iter")) c.sdp.max_iter = get_as<int>(s, "max_iter", "config.sdp");
    }
    if (j.contains("maxent")) {
        const auto &m = j.at("maxent");
        detail::reject_unknown(m, {"tol", "max_iter", "lambda_cap"}, "config.maxent");
        if (m.contains("tol")) c.maxent.tol = get_as<double>(m, "tol", "config.maxent");
        if (m.contains("max_iter")) c.maxent.max_iter = get_as<int>(m, "max_iter", "config.maxent");
        if (m.contains("lambda_cap")) {
            c.maxent.lambda_cap = get_as<double>(m, "lambda_cap", "config.maxent");
        }
    }
    if (j.contains("record_wall_time")) {
        c.record_wall_time = get_as<bool>(j, "record_wall_time", "config");
    }
    try {
        c.validate();
    } catch (const Error &e) {
        detail::config_error(e.what());
    }
    return out;
}

/// Every effective field, defaults filled in. Keys serialize sorted.
inline nlohmann::json config_to_json(const ExperimentConfig &c) {
    nlohmann::json methods = nlohmann::json::array();
    for (const MethodSpec &m : c.methods) {
        methods.push_back(m.tag());
    }
    return {
        {"schema", kConfigSchema},
        {"n_qubits", c.n_qubits},
        {"n_states", c.n_states},
        {"rank", c.rank},
        {"k_values", c.k_values},
        {"methods", methods},
        {"noise_level", c.noise_level},
        {"noise_model", noise_model_name(c.noise_model)},
        {"root_seed", c.root_seed.value},
        {"convergence_cutoff", c.convergence_cutoff},
        {"sdp", {{"tol", c.sdp.tol}, {"max_iter", c.sdp.max_iter}}},
        {"maxent",
         {{"tol", c.maxent.tol}, {"max_iter", c.maxent.max_iter}, {"lambda_cap", c.maxent.lambda_cap}}},
        {"record_wall_time", c.record_wall_time},
    };
}

inline std::string config_hash(const ExperimentConfig &c) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(config_to_json(c).dump());
    return out.str();
}

inline LoadedConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::Io, "cannot open config " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::ConfigParse, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

/// Applies TOMOFORGE_SEED when set to a base-10 unsigned integer.
inline void apply_seed_override(ExperimentConfig &c, const char *env) {
    if (env == nullptr || *env == '\0') {
        return;
    }
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used, 10);
        if (used != std::char_traits<char>::length(env)) {
            throw std::invalid_argument("trailing characters");
        }
        c.root_seed.value = v;
    } catch (const std::exception &) {
        throw Error(Errc::ConfigParse, std::string("TOMOFORGE_SEED is not an integer: ") + env);
    }
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    if (quoted) {
        throw Error(Errc::ConfigParse, "unterminated quote in CSV line");
    }
    return fields;
}

inline std::vector<std::string> trials_header(bool with_wall_time) {
    std::vector<std::string> h = {"state_id", "k", "method"};
    for (const char *m : {"fidelity_to_target", "trace_dist_to_target", "fidelity_to_maxent",
                          "vn_entropy", "kl_uniform", "total_unmeasured_mass", "max_delta"}) {
        h.emplace_back(m);
    }
    for (const char *m : {"solver_status", "ok", "converged"}) {
        h.emplace_back(m);
    }
    if (with_wall_time) {
        h.emplace_back("wall_time_ms");
    }
    return h;
}

inline std::string join_csv(const std::vector<std::string> &fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        line += csv_field(fields[i]);
    }
    return line + '\n';
}

inline void write_trials_csv(std::ostream &out, const std::vector<TrialResult> &rows,
                             bool with_wall_time) {
    out << join_csv(trials_header(with_wall_time));
    for (const TrialResult &t : rows) {
        std::vector<std::string> f = {
            std::to_string(t.state_id),
            std::to_string(t.k),
            t.method,
            format_double(t.fidelity_to_target),
            format_double(t.trace_dist_to_target),
            format_double(t.fidelity_to_maxent),
            format_double(t.vn_entropy),
            format_double(t.kl_uniform),
            format_double(t.total_unmeasured_mass),
            format_double(t.max_delta),
            t.solver_status,
            t.ok ? "1" : "0",
            t.converged ? "1" : "0",
        };
        if (with_wall_time) {
            f.push_back(format_double(t.wall_time_ms));
        }
        out << join_csv(f);
    }
}

inline std::vector<TrialResult> read_trials_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::ConfigParse, "trials file is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);
    bool with_wall_time = false;
    if (header == trials_header(true)) {
        with_wall_time = true;
    } else if (header != trials_header(false)) {
        throw Error(Errc::ConfigParse, "input is not a trials.csv (header mismatch)");
    }
    auto num = [](const std::string &s) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    };
    std::vector<TrialResult> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw Error(Errc::ConfigParse, "trials.csv line " + std::to_string(line_no) +
                                               ": wrong field count");
        }
        try {
            TrialResult t;
            t.state_id = std::stoull(f[0]);
            t.k = std::stoull(f[1]);
            t.method = f[2];
            t.fidelity_to_target = num(f[3]);
            t.trace_dist_to_target = num(f[4]);
            t.fidelity_to_maxent = num(f[5]);
            t.vn_entropy = num(f[6]);
            t.kl_uniform = num(f[7]);
            t.total_unmeasured_mass = num(f[8]);
            t.max_delta = num(f[9]);
            t.solver_status = f[10];
            t.ok = f[11] == "1";
            t.converged = f[12] == "1";
            if (with_wall_time) t.wall_time_ms = num(f[13]);
            rows.push_back(std::move(t));
        } catch (const std::logic_error &) {
            throw Error(Errc::ConfigParse,
                        "trials.csv line " + std::to_string(line_no) + ": bad number");
        }
    }
    return rows;
}

inline void write_aggregates_csv(std::ostream &out, const std::vector<AggregateRow> &rows) {
    out << "k,method,metric,mean,median,q1,q3,min,max,count,failures,quantile_method\n";
    for (const AggregateRow &r : rows) {
        out << join_csv({std::to_string(r.k), r.method, r.metric, format_double(r.stats.mean),
                         format_double(r.stats.median), format_double(r.stats.q1),
                         format_double(r.stats.q3), format_double(r.stats.min),
                         format_double(r.stats.max), std::to_string(r.stats.count),
                         std::to_string(r.failures), "linear"});
    }
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class Writer>
void write_file(const std::filesystem::path &path, Writer &&writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    writer(out);
    out.flush();
    if (!out) {
        throw Error(Errc::Io, "write failed for " + path.string());
    }
}

} // namespace detail

struct RunOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    unsigned threads = 1;
    const char *seed_env = nullptr; ///< value of TOMOFORGE_SEED, if any
};

inline int cmd_run(const RunOptions &opts, std::ostream &err = std::cerr) {
    try {
        LoadedConfig loaded = load_config(opts.config_path);
        ExperimentConfig &cfg = loaded.config;
        apply_seed_override(cfg, opts.seed_env);

        std::error_code ec;
        std::filesystem::create_directories(opts.out_dir, ec);
        if (ec) {
            throw Error(Errc::Io, "cannot create " + opts.out_dir.string() + ": " + ec.message());
        }
        const std::string started = detail::utc_now();
        const std::vector<TrialResult> trials = run_experiment(cfg, opts.threads);
        const std::vector<AggregateRow> aggregates = aggregate(trials);
        const std::string finished = detail::utc_now();

        const auto trials_path = opts.out_dir / "trials.csv";
        const auto agg_path = opts.out_dir / "aggregates.csv";
        const auto manifest_path = opts.out_dir / "manifest.json";
        detail::write_file(trials_path, [&](std::ostream &o) {
            write_trials_csv(o, trials, cfg.record_wall_time);
        });
        detail::write_file(agg_path, [&](std::ostream &o) { write_aggregates_csv(o, aggregates); });

        std::map<std::string, std::size_t> by_method;
        std::size_t failures = 0;
        for (const TrialResult &t : trials) {
            if (!t.ok) {
                ++failures;
                ++by_method[t.method];
            }
        }
        const nlohmann::json manifest = {
            {"schema", kManifestSchema},
            {"name", loaded.name},
            {"config_hash", config_hash(cfg)},
            {"effective_config", config_to_json(cfg)},
            {"started_utc", started},
            {"finished_utc", finished},
            {"threads", opts.threads},
            {"outputs", {{"trials", trials_path.string()}, {"aggregates", agg_path.string()}}},
            {"n_trials", trials.size()},
            {"failures", {{"total", failures}, {"by_method", by_method}}},
        };
        detail::write_file(manifest_path, [&](std::ostream &o) { o << manifest.dump(2) << '\n'; });
        if (failures > 0) {
            err << "tomoforge: " << failures << " trial(s) did not converge; see solver_status\n";
        }
        return kOk;
    } catch (const Error &e) {
        err << "tomoforge run: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

inline int cmd_verify(VerifyLevel level, std::ostream &err = std::cerr,
                      const Kernels &kernels = {}) {
    const VerifyReport report = run_verify(level, kernels);
    for (const std::string &f : report.failures) {
        err << "FAIL " << f << '\n';
    }
    err << "verify: " << report.checks - report.failures.size() << "/" << report.checks
        << " checks passed\n";
    return report.ok() ? kOk : kVerifyFailed;
}

struct ReportOptions {
    std::filesystem::path trials_path;
    std::string kind; ///< curve | histogram
    std::string metric;
    std::filesystem::path out_path;
    std::size_t bins = 20;
    std::optional<double> lo;
    std::optional<double> hi;
};

inline int cmd_report(const ReportOptions &opts, std::ostream &err = std::cerr) {
    try {
        if (opts.kind != "curve" && opts.kind != "histogram") {
            throw Error(Errc::InvalidArgument, "--kind must be curve or histogram");
        }
        bool known = false;
        for (const std::string &m : metric_names()) {
            known = known || m == opts.metric;
        }
        if (!known) {
            throw Error(Errc::UnknownMetric, "unknown metric '" + opts.metric + "'");
        }
        std::ifstream in(opts.trials_path);
        if (!in) {
            throw Error(Errc::Io, "cannot open " + opts.trials_path.string());
        }
        const std::vector<TrialResult> trials = read_trials_csv(in);

        // Group keys in (k, first appearance of method) order.
        std::vector<std::pair<std::size_t, std::string>> keys;
        std::map<std::pair<std::size_t, std::string>, std::vector<TrialResult>> groups;
        for (const TrialResult &t : trials) {
            auto key = std::make_pair(t.k, t.method);
            if (!groups.contains(key)) keys.push_back(key);
            groups[key].push_back(t);
        }
        std::stable_sort(keys.begin(), keys.end(),
                         [](const auto &a, const auto &b) { return a.first < b.first; });

        std::ostringstream out;
        if (opts.kind == "curve") {
            out << "k,method,mean,median,q1,q3\n";
            for (const auto &key : keys) {
                std::vector<double> values;
                for (const TrialResult &t : groups.at(key)) {
                    if (t.ok) values.push_back(metric_value(t, opts.metric));
                }
                const SummaryStats s = summarize(std::move(values));
                out << join_csv({std::to_string(key.first), key.second, format_double(s.mean),
                                 format_double(s.median), format_double(s.q1),
                                 format_double(s.q3)});
            }
        } else {
            double lo = opts.lo.value_or(std::numeric_limits<double>::infinity());
            double hi = opts.hi.value_or(-std::numeric_limits<double>::infinity());
            if (!opts.lo || !opts.hi) {
                for (const TrialResult &t : trials) {
                    const double v = metric_value(t, opts.metric);
                    if (!t.ok || !std::isfinite(v)) continue;
                    if (!opts.lo) lo = std::min(lo, v);
                    if (!opts.hi) hi = std::max(hi, v);
                }
                if (!(hi > lo)) {
                    hi = lo + 1.0;
                }
            }
            out << "method,k,bin_left,bin_right,count\n";
            for (const auto &key : keys) {
                const Histogram h = histogram(groups.at(key), opts.metric, opts.bins, lo, hi);
                for (std::size_t b = 0; b < h.counts.size(); ++b) {
                    out << join_csv({key.second, std::to_string(key.first),
                                     format_double(h.edges[b]), format_double(h.edges[b + 1]),
                                     std::to_string(h.counts[b])});
                }
            }
        }
        detail::write_file(opts.out_path, [&](std::ostream &o) { o << out.str(); });
        return kOk;
    } catch (const Error &e) {
        err << "tomoforge report: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

} // namespace tomoforge::cli
