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

#include "semiblind/errors.hpp"
#include "semiblind/simulator.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace semiblind {

namespace {

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats summarize(const std::vector<double> &samples)
{
    Stats s;
    for (double v : samples)
        s.mean += v;
    s.mean /= static_cast<double>(samples.size());
    if (samples.size() > 1)
    {
        double acc = 0.0;
        for (double v : samples)
            acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(samples.size() - 1));
    }
    return s;
}

template <typename F>
std::vector<double> time_calls(int repetitions, F &&call)
{
    using clock = std::chrono::steady_clock;
    call(0); // warm-up
    std::vector<double> ns;
    ns.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r)
    {
        const auto start = clock::now();
        call(r);
        const auto stop = clock::now();
        ns.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
    }
    return ns;
}

} // namespace

std::vector<TimingRow> benchmark_precompute(const GmmModel &model, const std::vector<double> &snr_db_grid,
                                            int repetitions, int users, std::uint64_t seed)
{
    model.validate(1e-9);
    require(repetitions >= 1, "benchmark repetitions must be at least 1");
    require(!snr_db_grid.empty(), "benchmark SNR grid is empty");
    const int m = model.dimension();
    const int k = model.components();
    require(users >= 1 && users <= m, "benchmark user count must satisfy 1 <= J <= M");

    // A small pool of random bases and observations; the subspace changes on
    // every call, as it would from one coherence block to the next.
    constexpr int kPool = 16;
    RandomStream rng(seed);
    std::vector<SubspaceBasis> bases(kPool);
    std::vector<ComplexVector> observations(kPool);
    for (int i = 0; i < kPool; ++i)
    {
        Eigen::HouseholderQR<ComplexMatrix> qr(rng.complex_normal_matrix(m, users));
        bases[i].basis = qr.householderQ() * ComplexMatrix::Identity(m, users);
        bases[i].eigenvalues = RealVector::Ones(users);
        observations[i] = rng.complex_normal_matrix(m, 1).col(0);
    }

    std::vector<TimingRow> rows;
    volatile double sink = 0.0;
    for (double snr_db : snr_db_grid)
    {
        const double s2 = std::pow(10.0, -snr_db / 10.0);
        require(s2 > 0.0 && std::isfinite(s2), "benchmark SNR must be finite");
        const PrecomputedGmmFilters plain = build_gmm_filters(model, s2);
        const PrecomputedGmmFilters projected = build_gmm_filters(model, projected_noise_variance(s2, users, m));

        auto input_for = [&](int r) {
            EstimatorInput in;
            in.pilot_observation = observations[r % kPool] * std::sqrt(1.0 + s2);
            in.noise_variance = s2;
            in.subspace = &bases[r % kPool];
            in.user_count = users;
            return in;
        };

        auto add = [&](const char *name, const std::vector<double> &ns) {
            const Stats s = summarize(ns);
            rows.push_back({name, m, users, k, s.mean, s.stddev, snr_db});
        };

        add("gmm", time_calls(repetitions, [&](int r) {
                sink = sink + estimate_gmm(input_for(r), model, plain).estimate(0).real();
            }));
        add("sub_gmm", time_calls(repetitions, [&](int r) {
                const EstimatorInput in = input_for(r);
                const SubspaceGmmFilters f = build_sub_gmm_filters(model, *in.subspace, s2);
                sink = sink + estimate_sub_gmm(in, f).estimate(0).real();
            }));
        add("proj_gmm", time_calls(repetitions, [&](int r) {
                sink = sink + estimate_proj_gmm(input_for(r), model, projected).estimate(0).real();
            }));
    }
    return rows;
}

void write_timing_csv(const std::vector<TimingRow> &rows, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
    out << "estimator,M,J,K,mean_ns,std_ns,snr_db\n";
    for (const auto &r : rows)
        out << r.estimator << ',' << r.antennas << ',' << r.users << ',' << r.components << ','
            << format_number(r.mean_ns) << ',' << format_number(r.std_ns) << ',' << format_number(r.snr_db) << '\n';
}

} // namespace semiblind
