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

#include "semiblind/dataset_io.hpp"
#include "semiblind/errors.hpp"
#include "semiblind/gmm_io.hpp"
#include "semiblind/parallel.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace semiblind {

namespace {

std::string quoted(const std::string &s)
{
    return nlohmann::json(s).dump();
}

void print_dataset_summary(std::ostream &log, const char *label, const ChannelDataset &d, const std::string &path)
{
    log << label << ": " << path << " count=" << d.count() << " M=" << d.antennas
        << " mean_power=" << format_number(d.mean_power()) << '\n';
}

} // namespace

ExperimentConfig resolve_config(Command command, const CommandOptions &options)
{
    std::vector<std::string> overrides = options.overrides;
    if (options.seed)
        overrides.push_back("seed=" + std::to_string(*options.seed));
    if (options.threads)
        overrides.push_back("threads=" + std::to_string(*options.threads));
    if (options.count)
    {
        overrides.push_back("scenario.train_count=" + std::to_string(*options.count));
        overrides.push_back("scenario.test_count=" + std::to_string(*options.count));
    }
    if (options.repetitions)
        overrides.push_back("bench.repetitions=" + std::to_string(*options.repetitions));
    if (options.out)
    {
        const std::filesystem::path out(*options.out);
        switch (command)
        {
        case Command::generate:
            overrides.push_back("io.train=" + quoted((out / "train.cvd").string()));
            overrides.push_back("io.test=" + quoted((out / "test.cvd").string()));
            break;
        case Command::fit: overrides.push_back("io.model=" + quoted(out.string())); break;
        case Command::sweep: overrides.push_back("io.output=" + quoted(out.string())); break;
        case Command::bench: overrides.push_back("io.bench_output=" + quoted(out.string())); break;
        }
    }
    ExperimentConfig config = load_config_file(options.config_path, overrides);
    set_default_threads(config.threads);
    return config;
}

void cmd_generate(const ExperimentConfig &config, std::ostream &log)
{
    const auto &s = config.scenario;
    const ClusterScenario clusters = s.cluster_scenario();
    const double target = s.normalization_target();

    for (const std::string &path : {config.io.train, config.io.test})
    {
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty())
            std::filesystem::create_directories(parent);
    }

    const ChannelDataset train =
        generate_dataset(clusters, s.geometry, s.train_count, target, config.train_seed(), config.threads);
    write_dataset(train, config.io.train);
    print_dataset_summary(log, "train", train, config.io.train);

    const ChannelDataset test =
        generate_dataset(clusters, s.geometry, s.test_count, target, config.test_seed(), config.threads);
    write_dataset(test, config.io.test);
    print_dataset_summary(log, "test", test, config.io.test);
}

void cmd_fit(const ExperimentConfig &config, std::ostream &log)
{
    const ChannelDataset train = read_dataset(config.io.train, config.antennas());
    const FitResult result = fit(train, config.em_config());
    write_model(result.model, config.io.model);
    write_fit_report_csv(result.report, config.io.fit_report);

    log << "model: " << config.io.model << " K=" << result.model.components() << " M=" << result.model.dimension()
        << " iterations=" << result.report.iterations() << " converged=" << (result.report.converged ? "yes" : "no")
        << " log_likelihood=" << format_number(result.report.log_likelihood.back()) << '\n';
    for (const auto &e : result.report.reinitializations)
        log << "reinitialized component " << e.component << " at iteration " << e.iteration << " from sample "
            << e.sample << '\n';
    log << "report: " << config.io.fit_report << '\n';
}

void cmd_sweep(const ExperimentConfig &config, std::ostream &log)
{
    const int m = config.antennas();
    const ChannelDataset train = read_dataset(config.io.train, m);
    const ChannelDataset test = read_dataset(config.io.test, m);
    const GmmModel model = read_model(config.io.model);
    if (model.dimension() != m)
        fail(ErrorCode::dimension_mismatch, "model '" + config.io.model + "' has dimension " +
                                                std::to_string(model.dimension()) + ", config has M = " +
                                                std::to_string(m));

    const SweepResult result = run_sweep(config.system_config(), config.sweep_spec(), train, test, model);
    write_sweep_csv(result, std::filesystem::path(config.io.output));
    log << "sweep: " << sweep_type_name(result.swept) << " points=" << result.grid.size()
        << " estimators=" << result.nmse.size() << " trials=" << result.trials << " -> " << config.io.output << '\n';
}

void cmd_bench(const ExperimentConfig &config, std::ostream &log)
{
    const GmmModel model = read_model(config.io.model);
    if (model.dimension() != config.antennas())
        fail(ErrorCode::dimension_mismatch, "model dimension does not match the configured array");
    const auto rows =
        benchmark_precompute(model, config.bench.snr_db, config.bench.repetitions, config.system.users,
                             config.bench_seed());
    write_timing_csv(rows, config.io.bench_output);
    for (const auto &r : rows)
        log << r.estimator << " snr_db=" << format_number(r.snr_db) << " mean_ns=" << format_number(r.mean_ns) << '\n';
    log << "timing: " << config.io.bench_output << '\n';
}

void run_command(Command command, const ExperimentConfig &config, std::ostream &log)
{
    switch (command)
    {
    case Command::generate: cmd_generate(config, log); break;
    case Command::fit: cmd_fit(config, log); break;
    case Command::sweep: cmd_sweep(config, log); break;
    case Command::bench: cmd_bench(config, log); break;
    }
}

} // namespace semiblind
