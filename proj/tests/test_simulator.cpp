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

#include "doctest.h"
#include "test_support.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/simulator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace semiblind;
using namespace semiblind::testing;

namespace {

template <class F> ErrorCode error_code(F &&f)
{
    try
    {
        f();
    }
    catch (const Error &e)
    {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::io_error;
}

struct Fixture {
    ArrayGeometry geometry{2, 2, 1.0, 0.5};
    ChannelDataset train;
    ChannelDataset test;
    GmmModel model;

    Fixture()
    {
        const ClusterScenario s;
        train = generate_dataset(s, geometry, 2000, 4.0, 1);
        test = generate_dataset(s, geometry, 300, 4.0, 2);
        EmConfig cfg;
        cfg.component_count = 4;
        cfg.max_iterations = 40;
        model = fit(train, cfg).model;
    }
};

const Fixture &fixture()
{
    static const Fixture f;
    return f;
}

SystemConfig small_system()
{
    SystemConfig c;
    c.antennas = 4;
    c.users = 2;
    c.snapshots = 20;
    return c;
}

std::string csv_of(const SweepResult &r)
{
    std::ostringstream out;
    write_sweep_csv(r, out);
    return out.str();
}

} // namespace

TEST_CASE("system configuration")
{
    SystemConfig c;
    c.snr_db = 10.0;
    CHECK(c.noise_variance() == doctest::Approx(0.1).epsilon(1e-15));
    c.snr_db = std::numeric_limits<double>::infinity();
    CHECK(c.noise_variance() == 0.0);
    CHECK(c.powers().size() == 8);
    CHECK(std::abs(c.powers().sum() - 1.0) < 1e-12);
    c.symbol_powers = {0.5, 0.5};
    CHECK(error_code([&] { c.validate(); }) == ErrorCode::invalid_argument);
    c.users = 2;
    CHECK_NOTHROW(c.validate());
    c.symbol_powers = {0.7, 0.7};
    CHECK(error_code([&] { c.validate(); }) == ErrorCode::invalid_argument);
    c.symbol_powers.clear();
    c.users = 65;
    CHECK(error_code([&] { c.validate(); }) == ErrorCode::invalid_argument);
}

TEST_CASE("noiseless pilots equal the channels")
{
    RandomStream rng(1);
    for (PilotType p : {PilotType::identity, PilotType::dft})
    {
        SystemConfig c = small_system();
        c.snr_db = std::numeric_limits<double>::infinity();
        c.pilot_type = p;
        const ComplexMatrix h = rng.complex_normal_matrix(4, 2);
        const ScenarioRealization r = simulate_block(c, h, rng);
        CHECK(r.noise_variance == 0.0);
        CHECK((r.pilot_observations - h).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(r.channels == h);
    }
}

TEST_CASE("smallest block has one user and one snapshot")
{
    RandomStream rng(2);
    SystemConfig c;
    c.antennas = 3;
    c.users = 1;
    c.snapshots = 1;
    const ComplexMatrix h = rng.complex_normal_matrix(3, 1);
    const ScenarioRealization r = simulate_block(c, h, rng);
    CHECK(r.pilot_observations.cols() == 1);
    CHECK(r.data_observations.rows() == 3);
    CHECK(r.data_observations.cols() == 1);
}

TEST_CASE("pilot noise variance is calibrated on both pilot paths")
{
    double variance[2];
    int i = 0;
    for (PilotType p : {PilotType::identity, PilotType::dft})
    {
        RandomStream rng(3 + i);
        SystemConfig c;
        c.antennas = 100;
        c.users = 10;
        c.snapshots = 1;
        c.snr_db = -10.0 * std::log10(0.5);
        c.pilot_type = p;
        const ComplexMatrix h = rng.complex_normal_matrix(100, 10);
        double sum = 0.0;
        Eigen::Index entries = 0;
        while (entries < 100000)
        {
            const ScenarioRealization r = simulate_block(c, h, rng);
            sum += (r.pilot_observations - h).squaredNorm();
            entries += r.pilot_observations.size();
        }
        variance[i] = sum / static_cast<double>(entries);
        MESSAGE(pilot_type_name(p) << " pilot noise variance " << variance[i]);
        CHECK(variance[i] == doctest::Approx(0.5).epsilon(0.01));
        ++i;
    }
    CHECK(variance[0] == doctest::Approx(variance[1]).epsilon(0.01));
}

TEST_CASE("DFT pilot noise is white across users")
{
    RandomStream rng(30);
    SystemConfig c;
    c.antennas = 4;
    c.users = 4;
    c.snapshots = 1;
    c.pilot_type = PilotType::dft;
    const ComplexMatrix h = ComplexMatrix::Zero(4, 4);
    ComplexMatrix gram = ComplexMatrix::Zero(4, 4);
    const int blocks = 50000;
    for (int b = 0; b < blocks; ++b)
    {
        const ComplexMatrix n = simulate_block(c, h, rng).pilot_observations;
        gram += n.adjoint() * n;
    }
    gram /= static_cast<double>(4 * blocks);
    CHECK((gram - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("data symbols carry the configured powers")
{
    RandomStream rng(4);
    SystemConfig c;
    c.antennas = 2;
    c.users = 2;
    c.snapshots = 50000;
    c.snr_db = std::numeric_limits<double>::infinity();
    c.symbol_powers = {0.8, 0.2};
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = 1.0;
    const ScenarioRealization r = simulate_block(c, h, rng);
    CHECK(r.data_observations.row(0).squaredNorm() / 50000.0 == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("nmse examples")
{
    RandomStream rng(5);
    std::vector<ComplexVector> h{rng.complex_normal_matrix(4, 1).col(0), rng.complex_normal_matrix(4, 1).col(0)};
    CHECK(nmse(h, h, 4) == 0.0);
    std::vector<ComplexVector> zero{ComplexVector::Zero(4)};
    std::vector<ComplexVector> unit{ComplexVector::Constant(4, Complex(0, 1))};
    CHECK(nmse(zero, unit, 4) == 1.0);
    CHECK(error_code([&] { nmse(h, zero, 4); }) == ErrorCode::invalid_argument);
    CHECK(error_code([&] { nmse({}, {}, 4); }) == ErrorCode::invalid_argument);
}

TEST_CASE("LS at 0 dB has unit NMSE on normalized channels")
{
    const ChannelDataset test = generate_dataset(ClusterScenario{}, ArrayGeometry{}, 1000, 64.0, 9);
    RandomStream rng(6);
    std::vector<ComplexVector> truths, estimates;
    for (Eigen::Index t = 0; t < test.count(); ++t)
    {
        truths.push_back(test.sample(t));
        estimates.push_back(test.sample(t) + rng.complex_normal_matrix(64, 1, 1.0).col(0));
    }
    CHECK(nmse(truths, estimates, 64) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("LS sweep at 0 dB")
{
    const auto &f = fixture();
    SweepSpec spec;
    spec.grid = {0.0};
    spec.estimators = {EstimatorKind::ls};
    spec.trials = 1000;
    spec.seed = 7;
    const SweepResult r = run_sweep(small_system(), spec, f.train, f.test, f.model);
    CHECK(r.curve(EstimatorKind::ls).at(0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("users grid at M collapses data-aided estimators")
{
    const auto &f = fixture();
    SweepSpec spec;
    spec.type = SweepType::users;
    spec.grid = {4.0};
    spec.trials = 50;
    spec.seed = 8;
    const SweepResult r = run_sweep(small_system(), spec, f.train, f.test, f.model);
    for (auto kind : kAllEstimators)
    {
        if (!is_data_aided(kind))
            continue;
        const double a = r.curve(kind).at(0);
        const double b = r.curve(pilot_counterpart(kind)).at(0);
        CHECK(std::abs(a - b) <= 1e-6 * b);
    }
}

TEST_CASE("sweep rejects invalid requests")
{
    const auto &f = fixture();
    SweepSpec spec;
    spec.trials = 2;
    CHECK(error_code([&] { run_sweep(small_system(), spec, f.train, f.test, f.model); }) ==
          ErrorCode::invalid_argument);

    spec.grid = {0.0};
    ChannelDataset tiny = f.test;
    tiny.samples = f.test.samples.leftCols(1);
    CHECK(error_code([&] { run_sweep(small_system(), spec, f.train, tiny, f.model); }) ==
          ErrorCode::invalid_argument);

    spec.type = SweepType::users;
    spec.grid = {5.0};
    CHECK(error_code([&] { run_sweep(small_system(), spec, f.train, f.test, f.model); }) ==
          ErrorCode::invalid_argument);
}

TEST_CASE("sweeps are reproducible and thread-count independent")
{
    const auto &f = fixture();
    SweepSpec spec;
    spec.grid = {-5.0, 5.0};
    spec.trials = 40;
    spec.seed = 10;
    spec.threads = 1;
    const std::string a = csv_of(run_sweep(small_system(), spec, f.train, f.test, f.model));
    const std::string b = csv_of(run_sweep(small_system(), spec, f.train, f.test, f.model));
    spec.threads = 3;
    const std::string c = csv_of(run_sweep(small_system(), spec, f.train, f.test, f.model));
    CHECK(a == b);
    CHECK(a == c);
    spec.seed = 11;
    CHECK(csv_of(run_sweep(small_system(), spec, f.train, f.test, f.model)) != a);
}

TEST_CASE("sweep CSV layout")
{
    const auto &f = fixture();
    SweepSpec spec;
    spec.type = SweepType::snapshots;
    spec.grid = {5.0, 10.0};
    spec.estimators = {EstimatorKind::ls, EstimatorKind::sub_gmm};
    spec.trials = 3;
    spec.seed = 12;
    const SweepResult r = run_sweep(small_system(), spec, f.train, f.test, f.model);
    std::istringstream in(csv_of(r));
    std::string line;
    std::getline(in, line);
    CHECK(line == "param,estimator,nmse,trials,seed");
    std::vector<std::string> rows;
    while (std::getline(in, line))
        rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("5,ls,", 0) == 0);
    CHECK(rows[1].rfind("5,sub_gmm,", 0) == 0);
    CHECK(rows[3].rfind("10,sub_gmm,", 0) == 0);
    CHECK(rows[3].substr(rows[3].size() - 5) == ",3,12");
    for (const auto &[kind, curve] : r.nmse)
        for (double v : curve)
            CHECK(v >= 0.0);
}

TEST_CASE("format_number is shortest round trip")
{
    CHECK(format_number(5.0) == "5");
    CHECK(format_number(-12.5) == "-12.5");
    CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("benchmark report shape")
{
    RandomStream rng(13);
    const GmmModel model = random_model(8, 1, rng);
    const auto rows = benchmark_precompute(model, {0.0, 10.0}, 200, 2, 1);
    REQUIRE(rows.size() == 6);
    for (const auto &row : rows)
    {
        CHECK(row.antennas == 8);
        CHECK(row.users == 2);
        CHECK(row.components == 1);
        CHECK(row.mean_ns > 0.0);
        CHECK(row.std_ns >= 0.0);
    }
    CHECK(error_code([&] { benchmark_precompute(model, {0.0}, 0, 2, 1); }) == ErrorCode::invalid_argument);
    CHECK(error_code([&] { benchmark_precompute(model, {}, 10, 2, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("single-component proj. GMM costs about as much as GMM")
{
    RandomStream rng(14);
    const GmmModel model = random_model(32, 1, rng);
    const auto rows = benchmark_precompute(model, {0.0}, 2000, 4, 2);
    double gmm = 0.0, proj = 0.0;
    for (const auto &row : rows)
    {
        if (row.estimator == "gmm")
            gmm = row.mean_ns;
        if (row.estimator == "proj_gmm")
            proj = row.mean_ns;
    }
    MESSAGE("gmm " << gmm << " ns, proj_gmm " << proj << " ns");
    CHECK(proj < 2.0 * gmm);
    CHECK(gmm < 2.0 * proj);
}
