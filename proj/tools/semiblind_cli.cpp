// SPDX-License-Identifier: Apache-2.0
//
// semiblind: data-aided GMM channel estimation for multi-user MIMO uplinks
// Copyright (C) 2026 The semiblind authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "semiblind/commands.hpp"
#include "semiblind/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common_flags(CLI::App *cmd, semiblind::CommandOptions &opts)
{
    cmd->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--set", opts.overrides, "Override a config field: section.key=value (repeatable)");
    cmd->add_option("--seed", opts.seed, "Master seed for every stochastic output");
    cmd->add_option("--threads", opts.threads, "Worker threads for library calls");
    cmd->add_option("--out", opts.out, "Output location (generate: directory; otherwise: file)");
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Semi-blind GMM channel estimation simulator"};
    app.require_subcommand(1);

    semiblind::CommandOptions opts;
    auto *generate = app.add_subcommand("generate", "Generate train/test channel datasets (CVD1)");
    auto *fit = app.add_subcommand("fit", "Fit the GMM on the training dataset (GMM1 + report CSV)");
    auto *sweep = app.add_subcommand("sweep", "Run an NMSE sweep (CSV)");
    auto *bench = app.add_subcommand("bench", "Time GMM estimator variants (CSV)");
    for (auto *cmd : {generate, fit, sweep, bench})
        add_common_flags(cmd, opts);
    generate->add_option("--count", opts.count, "Samples per dataset file");
    bench->add_option("--repetitions", opts.repetitions, "Timed calls per estimator and SNR");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error code=usage_error: " << e.what() << '\n';
        return 1;
    }

    semiblind::Command command = semiblind::Command::generate;
    if (fit->parsed())
        command = semiblind::Command::fit;
    else if (sweep->parsed())
        command = semiblind::Command::sweep;
    else if (bench->parsed())
        command = semiblind::Command::bench;

    try
    {
        const auto config = semiblind::resolve_config(command, opts);
        semiblind::run_command(command, config, std::cout);
    }
    catch (const semiblind::Error &e)
    {
        std::cerr << "error code=" << semiblind::to_string(e.code()) << ": " << e.what() << '\n';
        return semiblind::exit_status(e.code());
    }
    catch (const std::exception &e)
    {
        std::cerr << "error code=internal_error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
