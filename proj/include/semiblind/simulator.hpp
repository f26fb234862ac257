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
#include "semiblind/random.hpp"
#include "semiblind/subspace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace semiblind {

enum class PilotType {
    identity, // post-decorrelation model Y_p = H + N simulated directly
    dft,      // explicit orthogonal DFT pilots, transmitted then decorrelated
};

std::string_view pilot_type_name(PilotType type);

struct SystemConfig {
    int antennas = 64;  // M
    int users = 8;      // J
    int snapshots = 200; // N, data observations per block
    double snr_db = 0.0;
    // Per-user symbol powers P_j. Empty: 1/J for every user.
    std::vector<double> symbol_powers;
    PilotType pilot_type = PilotType::identity;

    double noise_variance() const; // 10^(-snr_db/10); 0 for snr_db = +inf
    RealVector powers() const;
    void validate() const;
};

struct ScenarioRealization {
    ComplexMatrix channels;           // H, M x J
    ComplexMatrix pilot_observations; // Y_p after decorrelation, M x J
    ComplexMatrix data_observations;  // Y_d, M x N
    double noise_variance = 0.0;
};

// One coherence block. Random draws are consumed in the order: pilot noise
// (or the raw pilot-phase noise), data symbols, data noise.
ScenarioRealization simulate_block(const SystemConfig &config, const ComplexMatrix &channels, RandomStream &rng);

// (1 / (M T)) sum_t ||h_t - h_hat_t||^2
double nmse(const std::vector<ComplexVector> &truths, const std::vector<ComplexVector> &estimates, Eigen::Index antennas);

enum class SweepType { snr_db, snapshots, users };

std::string_view sweep_type_name(SweepType type);

struct SweepSpec {
    SweepType type = SweepType::snr_db;
    std::vector<double> grid;
    std::vector<EstimatorKind> estimators{kAllEstimators.begin(), kAllEstimators.end()};
    int trials = 1000; // coherence blocks per grid point
    std::uint64_t seed = 0;
    bool include_pilots = false; // pilot snapshots in the subspace sample covariance
    EigenSolverMethod eigen_solver = EigenSolverMethod::full;
    unsigned threads = 0;
};

struct SweepResult {
    SweepType swept = SweepType::snr_db;
    std::vector<double> grid;
    std::vector<std::pair<EstimatorKind, std::vector<double>>> nmse; // in SweepSpec order
    int trials = 0;
    std::uint64_t seed = 0;
    SystemConfig config;

    const std::vector<double> &curve(EstimatorKind kind) const;
};

// Runs every enabled estimator over `trials` blocks per grid point. Trial t
// uses the stream derive_seed(seed, {t}) at every grid point, so curves share
// channels and noise draws (common random numbers) and the result does not
// depend on the thread count.
SweepResult run_sweep(const SystemConfig &base, const SweepSpec &spec, const ChannelDataset &train,
                      const ChannelDataset &test, const GmmModel &model);

// CSV with header "param,estimator,nmse,trials,seed", one row per
// (grid point, estimator).
void write_sweep_csv(const SweepResult &result, std::ostream &out);
void write_sweep_csv(const SweepResult &result, const std::filesystem::path &path);

// Shortest decimal text that round-trips the double.
std::string format_number(double value);

// ---- precompute benchmark -------------------------------------------------

struct TimingRow {
    std::string estimator;
    int antennas = 0;
    int users = 0;
    int components = 0;
    double mean_ns = 0.0;
    double std_ns = 0.0;
    double snr_db = 0.0;
};

// Wall-clock cost per estimate of the standalone GMM (precomputed filters),
// the projected GMM (precomputed sigma^2 J/M filters) and the subspace GMM
// (filters rebuilt for a fresh basis on every call), for each SNR.
std::vector<TimingRow> benchmark_precompute(const GmmModel &model, const std::vector<double> &snr_db_grid,
                                            int repetitions, int users, std::uint64_t seed);

// CSV with header "estimator,M,J,K,mean_ns,std_ns,snr_db".
void write_timing_csv(const std::vector<TimingRow> &rows, const std::filesystem::path &path);

} // namespace semiblind
