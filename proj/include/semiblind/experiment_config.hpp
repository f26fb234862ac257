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

#include "semiblind/cgmm.hpp"
#include "semiblind/channel_scenarios.hpp"
#include "semiblind/estimators.hpp"
#include "semiblind/simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace semiblind {

// Angles are kept in degrees here, exactly as written in the config file, and
// converted to radians only when the generator is built.
struct ScenarioSection {
    ArrayGeometry geometry;
    int cluster_count_min = 1;
    int cluster_count_max = 3;
    int paths_per_cluster = 20;
    double angular_spread_deg = 5.0;
    std::vector<double> azimuth_deg{-60.0, 60.0};
    std::vector<double> elevation_deg{-15.0, 15.0};
    std::vector<double> cluster_power_fractions;
    PathGainModel gain_model = PathGainModel::rayleigh;
    std::int64_t train_count = 150000;
    std::int64_t test_count = 1000;
    std::optional<double> normalization; // default: M

    ClusterScenario cluster_scenario() const;
    double normalization_target() const { return normalization.value_or(geometry.antennas()); }

    bool operator==(const ScenarioSection &) const = default;
};

struct SystemSection {
    int users = 8;
    int snapshots = 200;
    double snr_db = 0.0;
    std::vector<double> symbol_powers;
    PilotType pilot_type = PilotType::identity;
    bool include_pilots = false;
    EigenSolverMethod eigen_solver = EigenSolverMethod::full;

    bool operator==(const SystemSection &) const = default;
};

struct GmmSection {
    int components = 64;
    int max_iterations = 300;
    double rel_tolerance = 1e-6;
    double covariance_floor = 1e-6;
    InitStrategy init_strategy = InitStrategy::kmeans_plus_plus;
    int kmeans_iterations = 20;
    std::int64_t chunk_size = 2048;

    bool operator==(const GmmSection &) const = default;
};

struct SweepSection {
    SweepType type = SweepType::snr_db;
    std::vector<double> grid{-15, -10, -5, 0, 5, 10, 15, 20};
    std::vector<EstimatorKind> estimators{kAllEstimators.begin(), kAllEstimators.end()};
    int trials = 1000;

    bool operator==(const SweepSection &) const = default;
};

struct BenchSection {
    std::vector<double> snr_db{0.0};
    int repetitions = 200;

    bool operator==(const BenchSection &) const = default;
};

struct IoSection {
    std::string train = "train.cvd";
    std::string test = "test.cvd";
    std::string model = "model.gmm";
    std::string fit_report = "fit_report.csv";
    std::string output = "results.csv";
    std::string bench_output = "timing.csv";

    bool operator==(const IoSection &) const = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    ScenarioSection scenario;
    SystemSection system;
    GmmSection gmm;
    SweepSection sweep;
    BenchSection bench;
    IoSection io;

    int antennas() const { return scenario.geometry.antennas(); }
    SystemConfig system_config() const;
    EmConfig em_config() const;
    SweepSpec sweep_spec() const;

    // Sub-seeds derived from `seed`; train and test streams never coincide.
    std::uint64_t train_seed() const;
    std::uint64_t test_seed() const;
    std::uint64_t gmm_seed() const;
    std::uint64_t sweep_seed() const;
    std::uint64_t bench_seed() const;

    bool operator==(const ExperimentConfig &) const = default;
};

// Sections scenario, system, gmm, sweep and io are required; bench is
// optional. Unknown keys are rejected. Errors are config_error and name the
// offending field path (e.g. "system.users").
ExperimentConfig parse_config(const nlohmann::json &doc);
nlohmann::ordered_json to_json(const ExperimentConfig &config);

ExperimentConfig load_config_file(const std::string &path, const std::vector<std::string> &overrides = {});

// Applies "dotted.path=value" to a JSON document. The value is parsed as JSON
// when possible and taken as a string otherwise.
void apply_override(nlohmann::json &doc, const std::string &assignment);

} // namespace semiblind
