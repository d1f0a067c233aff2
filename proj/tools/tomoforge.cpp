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

#include "tomoforge/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char **argv) {
    namespace cli = tomoforge::cli;

    CLI::App app{"tomoforge: density-matrix reconstruction from partial SIC data"};
    app.require_subcommand(1);

    cli::RunOptions run;
    auto *run_cmd = app.add_subcommand("run", "run an experiment sweep from a JSON config");
    run_cmd->add_option("--config", run.config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", run.out_dir, "output directory")->required();
    run_cmd->add_option("--threads", run.threads, "worker threads")->check(CLI::Range(1U, 256U));

    std::string level = "fast";
    auto *verify_cmd = app.add_subcommand("verify", "run the built-in invariant suites");
    verify_cmd->add_option("--level", level, "fast or full")
        ->check(CLI::IsMember({"fast", "full"}));

    cli::ReportOptions report;
    double lo = 0.0;
    double hi = 0.0;
    auto *report_cmd = app.add_subcommand("report", "plot-ready CSV from a trials.csv");
    report_cmd->add_option("--trials", report.trials_path, "trials.csv from `run`")->required();
    report_cmd->add_option("--kind", report.kind, "curve or histogram")->required();
    report_cmd->add_option("--metric", report.metric, "metric column")->required();
    report_cmd->add_option("--out", report.out_path, "output CSV")->required();
    report_cmd->add_option("--bins", report.bins, "histogram bins")->check(CLI::PositiveNumber);
    auto *lo_opt = report_cmd->add_option("--min", lo, "histogram lower edge");
    auto *hi_opt = report_cmd->add_option("--max", hi, "histogram upper edge");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kBadInput;
    }

    if (*run_cmd) {
        run.seed_env = std::getenv("TOMOFORGE_SEED");
        return cli::cmd_run(run);
    }
    if (*verify_cmd) {
        return cli::cmd_verify(level == "full" ? tomoforge::VerifyLevel::Full
                                               : tomoforge::VerifyLevel::Fast);
    }
    if (*lo_opt) report.lo = lo;
    if (*hi_opt) report.hi = hi;
    return cli::cmd_report(report);
}
