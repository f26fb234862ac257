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

#include "semiblind/simulator.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/parallel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>

namespace semiblind {

std::string_view pilot_type_name(PilotType type)
{
    return type == PilotType::dft ? "dft" : "identity";
}

std::string_view sweep_type_name(SweepType type)
{
    switch (type)
    {
    case SweepType::snr_db: return "snr";
    case SweepType::snapshots: return "snapshots";
    case SweepType::users: return "users";
    }
    return "unknown";
}

double SystemConfig::noise_variance() const
{
    return std::pow(10.0, -snr_db / 10.0);
}

RealVector SystemConfig::powers() const
{
    if (symbol_powers.empty())
        return RealVector::Constant(users, 1.0 / users);
    return Eigen::Map<const RealVector>(symbol_powers.data(), static_cast<Eigen::Index>(symbol_powers.size()));
}

void SystemConfig::validate() const
{
    require(antennas >= 1, "system needs at least one antenna");
    require(users >= 1 && users <= antennas, "user count J must satisfy 1 <= J <= M");
    require(snapshots >= 1, "snapshot count N must be at least 1");
    require(!std::isnan(snr_db), "SNR must be a number");
    if (!symbol_powers.empty())
    {
        require(static_cast<int>(symbol_powers.size()) == users, "symbol_powers must list one power per user");
        double sum = 0.0;
        for (double p : symbol_powers)
        {
            require(p >= 0.0, "symbol powers must be nonnegative");
            sum += p;
        }
        require(std::abs(sum - 1.0) <= 1e-12, "symbol powers must sum to 1");
    }
}

ScenarioRealization simulate_block(const SystemConfig &config, const ComplexMatrix &channels, RandomStream &rng)
{
    config.validate();
    const Eigen::Index m = config.antennas;
    const Eigen::Index j = config.users;
    if (channels.rows() != m || channels.cols() != j)
        fail(ErrorCode::dimension_mismatch, "channel matrix must be M x J");

    ScenarioRealization out;
    out.channels = channels;
    out.noise_variance = config.noise_variance();
    const double s2 = out.noise_variance;

    if (config.pilot_type == PilotType::identity)
    {
        out.pilot_observations = channels + rng.complex_normal_matrix(m, j, s2);
    }
    else
    {
        // DFT pilots with per-symbol power 1/J, so that P P^H = I and the
        // decorrelated noise N P^H keeps per-entry variance sigma^2.
        ComplexMatrix pilots(j, j);
        const double amplitude = 1.0 / std::sqrt(static_cast<double>(j));
        for (Eigen::Index u = 0; u < j; ++u)
            for (Eigen::Index n = 0; n < j; ++n)
                pilots(u, n) = std::polar(amplitude, -2.0 * kPi * static_cast<double>(u * n) / static_cast<double>(j));
        const ComplexMatrix received = channels * pilots + rng.complex_normal_matrix(m, j, s2);
        out.pilot_observations = received * pilots.adjoint();
    }

    const RealVector p = config.powers();
    ComplexMatrix symbols(j, config.snapshots);
    for (Eigen::Index n = 0; n < symbols.cols(); ++n)
        for (Eigen::Index u = 0; u < j; ++u)
            symbols(u, n) = rng.complex_normal(p(u));
    out.data_observations = channels * symbols + rng.complex_normal_matrix(m, config.snapshots, s2);
    return out;
}

double nmse(const std::vector<ComplexVector> &truths, const std::vector<ComplexVector> &estimates, Eigen::Index antennas)
{
    require(truths.size() == estimates.size(), "nmse: truths and estimates differ in length");
    require(!truths.empty(), "nmse: need at least one sample");
    require(antennas >= 1, "nmse: antenna count must be positive");
    double sum = 0.0;
    for (std::size_t t = 0; t < truths.size(); ++t)
    {
        if (truths[t].size() != estimates[t].size())
            fail(ErrorCode::dimension_mismatch, "nmse: sample " + std::to_string(t) + " has mismatched lengths");
        sum += (truths[t] - estimates[t]).squaredNorm();
    }
    return sum / (static_cast<double>(antennas) * static_cast<double>(truths.size()));
}

const std::vector<double> &SweepResult::curve(EstimatorKind kind) const
{
    for (const auto &[k, values] : nmse)
        if (k == kind)
            return values;
    fail(ErrorCode::invalid_argument, "estimator '" + std::string(estimator_name(kind)) + "' is not in the sweep");
}

namespace {

bool enabled(const std::vector<EstimatorKind> &list, EstimatorKind kind)
{
    return std::find(list.begin(), list.end(), kind) != list.end();
}

// Precomputation shared by every trial of one grid point.
struct GridPointFilters {
    std::optional<LmmseFilter> scov;
    std::optional<LmmseFilter> proj_scov;
    std::optional<PrecomputedGmmFilters> gmm;
    std::optional<PrecomputedGmmFilters> proj_gmm;
};

std::vector<Eigen::Index> draw_users(Eigen::Index pool, int users, RandomStream &rng)
{
    std::vector<Eigen::Index> index(static_cast<std::size_t>(pool));
    std::iota(index.begin(), index.end(), Eigen::Index{0});
    for (int u = 0; u < users; ++u)
    {
        const auto pick = u + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(pool - u)));
        std::swap(index[u], index[pick]);
    }
    index.resize(users);
    return index;
}

} // namespace

SweepResult run_sweep(const SystemConfig &base, const SweepSpec &spec, const ChannelDataset &train,
                      const ChannelDataset &test, const GmmModel &model)
{
    require(!spec.grid.empty(), "sweep grid is empty");
    require(!spec.estimators.empty(), "sweep has no estimators enabled");
    require(spec.trials >= 1, "sweep needs at least one trial");
    require(train.antennas == base.antennas && test.antennas == base.antennas,
            "datasets and system config disagree on the antenna count");

    const auto &kinds = spec.estimators;
    const bool any_gmm = enabled(kinds, EstimatorKind::gmm) || enabled(kinds, EstimatorKind::sub_gmm) ||
                         enabled(kinds, EstimatorKind::proj_gmm);
    const bool any_scov = enabled(kinds, EstimatorKind::scov) || enabled(kinds, EstimatorKind::sub_scov) ||
                          enabled(kinds, EstimatorKind::proj_scov);
    const bool any_data_aided = std::any_of(kinds.begin(), kinds.end(), is_data_aided);
    if (any_gmm && model.dimension() != base.antennas)
        fail(ErrorCode::dimension_mismatch, "GMM dimension does not match the antenna count");

    const ComplexMatrix train_cov = any_scov ? dataset_covariance(train) : ComplexMatrix();
    const Eigen::Index m = base.antennas;

    SweepResult result;
    result.swept = spec.type;
    result.grid = spec.grid;
    result.trials = spec.trials;
    result.seed = spec.seed;
    result.config = base;
    for (auto kind : kinds)
        result.nmse.emplace_back(kind, std::vector<double>());

    for (double point : spec.grid)
    {
        SystemConfig config = base;
        switch (spec.type)
        {
        case SweepType::snr_db: config.snr_db = point; break;
        case SweepType::snapshots: config.snapshots = static_cast<int>(std::lround(point)); break;
        case SweepType::users:
            config.users = static_cast<int>(std::lround(point));
            if (!base.symbol_powers.empty() && static_cast<int>(base.symbol_powers.size()) != config.users)
                config.symbol_powers.clear();
            break;
        }
        config.validate();
        const int j = config.users;
        if (test.count() < j)
            fail(ErrorCode::invalid_argument, "test set holds " + std::to_string(test.count()) +
                                                  " channels, fewer than J = " + std::to_string(j));
        const double s2 = config.noise_variance();
        require(s2 > 0.0, "sweeps need a finite SNR");
        const double s2_proj = projected_noise_variance(s2, j, m);

        GridPointFilters pre;
        if (enabled(kinds, EstimatorKind::scov))
            pre.scov.emplace(train_cov, s2);
        if (enabled(kinds, EstimatorKind::proj_scov))
            pre.proj_scov.emplace(train_cov, s2_proj);
        if (enabled(kinds, EstimatorKind::gmm))
            pre.gmm = build_gmm_filters(model, s2, spec.threads);
        if (enabled(kinds, EstimatorKind::proj_gmm))
            pre.proj_gmm = build_gmm_filters(model, s2_proj, spec.threads);

        // errors[trial * E + e]: squared error summed over the block's users.
        const std::size_t e_count = kinds.size();
        std::vector<double> errors(static_cast<std::size_t>(spec.trials) * e_count, 0.0);

        parallel_for(static_cast<std::size_t>(spec.trials), spec.threads, [&](std::size_t trial) {
            RandomStream rng(derive_seed(spec.seed, {trial}));
            const auto users = draw_users(test.count(), j, rng);
            ComplexMatrix h(m, j);
            for (int u = 0; u < j; ++u)
                h.col(u) = test.sample(users[u]);
            const ScenarioRealization block = simulate_block(config, h, rng);

            std::optional<SubspaceBasis> basis;
            std::optional<SubspaceGmmFilters> sub_gmm;
            std::optional<SubspaceLmmseFilter> sub_scov;
            if (any_data_aided)
            {
                basis = estimate_subspace(block.pilot_observations, block.data_observations, j, spec.include_pilots,
                                          spec.eigen_solver);
                if (enabled(kinds, EstimatorKind::sub_gmm))
                    sub_gmm = build_sub_gmm_filters(model, *basis, s2);
                if (enabled(kinds, EstimatorKind::sub_scov))
                    sub_scov = build_sub_scov_filter(train_cov, *basis, s2);
            }

            for (int u = 0; u < j; ++u)
            {
                EstimatorInput input;
                input.pilot_observation = block.pilot_observations.col(u);
                input.noise_variance = s2;
                input.subspace = basis ? &*basis : nullptr;
                input.user_count = j;
                const ComplexVector truth = h.col(u);

                for (std::size_t e = 0; e < e_count; ++e)
                {
                    ChannelEstimate est;
                    switch (kinds[e])
                    {
                    case EstimatorKind::ls: est = estimate_ls(input); break;
                    case EstimatorKind::ml: est = estimate_ml(input); break;
                    case EstimatorKind::scov: est = estimate_scov(input, *pre.scov); break;
                    case EstimatorKind::sub_scov: est = estimate_sub_scov(input, *sub_scov); break;
                    case EstimatorKind::proj_scov: est = estimate_proj_scov(input, *pre.proj_scov); break;
                    case EstimatorKind::gmm: est = estimate_gmm(input, model, *pre.gmm); break;
                    case EstimatorKind::sub_gmm: est = estimate_sub_gmm(input, *sub_gmm); break;
                    case EstimatorKind::proj_gmm: est = estimate_proj_gmm(input, model, *pre.proj_gmm); break;
                    }
                    errors[trial * e_count + e] += (truth - est.estimate).squaredNorm();
                }
            }
        });

        const double normalizer = static_cast<double>(m) * static_cast<double>(spec.trials) * static_cast<double>(j);
        for (std::size_t e = 0; e < e_count; ++e)
        {
            double sum = 0.0;
            for (int trial = 0; trial < spec.trials; ++trial)
                sum += errors[static_cast<std::size_t>(trial) * e_count + e];
            result.nmse[e].second.push_back(sum / normalizer);
        }
    }
    return result;
}

std::string format_number(double value)
{
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc())
        return std::to_string(value);
    return std::string(buffer, end);
}

void write_sweep_csv(const SweepResult &result, std::ostream &out)
{
    out << "param,estimator,nmse,trials,seed\n";
    for (std::size_t g = 0; g < result.grid.size(); ++g)
        for (const auto &[kind, values] : result.nmse)
            out << format_number(result.grid[g]) << ',' << estimator_name(kind) << ',' << format_number(values[g])
                << ',' << result.trials << ',' << result.seed << '\n';
}

void write_sweep_csv(const SweepResult &result, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
    write_sweep_csv(result, out);
    if (!out)
        fail(ErrorCode::io_error, "write to '" + path.string() + "' failed");
}

} // namespace semiblind
