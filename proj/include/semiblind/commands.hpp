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

#pragma once

#include "semiblind/experiment_config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace semiblind {

enum class Command { generate, fit, sweep, bench };

// Flags shared by all subcommands. Flat flags are folded into the JSON
// document as overrides before validation, after any --set assignments.
struct CommandOptions {
    std::string config_path;
    std::vector<std::string> overrides; // --set section.key=value
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;    // generate: directory; others: output file
    std::optional<std::int64_t> count; // generate: samples per dataset file
    std::optional<int> repetitions;    // bench
};

ExperimentConfig resolve_config(Command command, const CommandOptions &options);

// Each command writes its outputs to the paths in config.io and prints a
// short summary to `log`.
void cmd_generate(const ExperimentConfig &config, std::ostream &log);
void cmd_fit(const ExperimentConfig &config, std::ostream &log);
void cmd_sweep(const ExperimentConfig &config, std::ostream &log);
void cmd_bench(const ExperimentConfig &config, std::ostream &log);

void run_command(Command command, const ExperimentConfig &config, std::ostream &log);

} // namespace semiblind
