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
#include "semiblind/estimators.hpp"

#include <cmath>

using namespace semiblind;
using namespace semiblind::testing;

namespace {

EstimatorInput input_for(const ComplexVector &y, double s, const SubspaceBasis *b = nullptr)
{
    EstimatorInput in;
    in.pilot_observation = y;
    in.noise_variance = s;
    in.subspace = b;
    return in;
}

GmmModel single(const ComplexVector &mu, const ComplexMatrix &c)
{
    GmmModel m;
    m.weights = RealVector::Ones(1);
    m.means = {mu};
    m.covariances = {c};
    return m;
}

SubspaceBasis e1_basis(Eigen::Index m)
{
    SubspaceBasis b;
    b.basis = ComplexMatrix::Identity(m, 1);
    b.eigenvalues = RealVector::Ones(1);
    return b;
}

// Vector orthogonal to range(V).
ComplexVector orthogonal_to(const SubspaceBasis &b, RandomStream &rng)
{
    const ComplexVector z = rng.complex_normal_matrix(b.antennas(), 1).col(0);
    return z - b.basis * (b.basis.adjoint() * z);
}

ComplexVector proj_gmm(const ComplexVector &y, double s, const SubspaceBasis &b, const GmmModel &model)
{
    const auto filters =
        build_gmm_filters(model, projected_noise_variance(s, b.dimension(), b.antennas()));
    return estimate_proj_gmm(input_for(y, s, &b), model, filters).estimate;
}

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

} // namespace

TEST_CASE("estimator names round trip")
{
    for (auto kind : kAllEstimators)
        CHECK(parse_estimator(estimator_name(kind)) == kind);
    CHECK(estimator_name(EstimatorKind::sub_gmm) == "sub_gmm");
    CHECK_FALSE(parse_estimator("wiener").has_value());
    CHECK(pilot_counterpart(EstimatorKind::proj_gmm) == EstimatorKind::gmm);
    CHECK(pilot_counterpart(EstimatorKind::ml) == EstimatorKind::ls);
    CHECK_FALSE(is_data_aided(EstimatorKind::scov));
    CHECK(is_data_aided(EstimatorKind::sub_scov));
}

TEST_CASE("LS returns the pilot observation")
{
    RandomStream rng(1);
    CHECK(estimate_ls(input_for(ComplexVector::Zero(3), 1.0)).estimate == ComplexVector::Zero(3));
    const ComplexVector y = rng.complex_normal_matrix(5, 1).col(0);
    CHECK(estimate_ls(input_for(y, 0.3)).estimate == y);
}

TEST_CASE("ML projects onto the subspace")
{
    RandomStream rng(2);
    const SubspaceBasis b = e1_basis(2);
    ComplexVector y(2);
    y << Complex(3, 4), Complex(7, 0);
    const ComplexVector h = estimate_ml(input_for(y, 1.0, &b)).estimate;
    CHECK(h(0) == Complex(3, 4));
    CHECK(h(1) == Complex(0, 0));

    const SubspaceBasis full = random_basis(4, 4, rng);
    const ComplexVector y4 = rng.complex_normal_matrix(4, 1).col(0);
    CHECK(relative_error(estimate_ml(input_for(y4, 1.0, &full)).estimate, y4) < 1e-12);

    const SubspaceBasis v = random_basis(6, 2, rng);
    CHECK(estimate_ml(input_for(orthogonal_to(v, rng), 1.0, &v)).estimate.norm() < 1e-12);

    CHECK(error_code([&] { estimate_ml(input_for(y, 1.0)); }) == ErrorCode::invalid_argument);
}

TEST_CASE("s-cov examples")
{
    RandomStream rng(3);
    const ComplexVector y = rng.complex_normal_matrix(3, 1).col(0);
    CHECK(relative_error(estimate_scov(input_for(y, 1.0), ComplexMatrix::Identity(3, 3)).estimate, y / 2.0) < 1e-15);

    const ComplexMatrix c = random_pd(3, rng, 0.5);
    CHECK((estimate_scov(input_for(y, 1e-12), c).estimate - y).norm() < 1e-6 * y.norm());

    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    ComplexVector y2(2);
    y2 << 4.0, 4.0;
    const ComplexVector h = estimate_scov(input_for(y2, 1.0), d).estimate;
    CHECK(std::abs(h(0) - Complex(3, 0)) < 1e-14);
    CHECK(std::abs(h(1) - Complex(2, 0)) < 1e-14);

    const LmmseFilter f(d, 1.0);
    CHECK(estimate_scov(input_for(y2, 1.0), f).estimate == f.apply(y2));
    CHECK(error_code([&] { estimate_scov(input_for(y2, 2.0), f); }) == ErrorCode::invalid_state);
}

TEST_CASE("sub. s-cov examples")
{
    RandomStream rng(4);
    const ComplexMatrix c = random_pd(5, rng);
    const SubspaceBasis full = random_basis(5, 5, rng);
    const ComplexVector y = rng.complex_normal_matrix(5, 1, 2.0).col(0);
    CHECK(relative_error(estimate_sub_scov(input_for(y, 0.7, &full), c).estimate,
                         estimate_scov(input_for(y, 0.7), c).estimate) < 1e-8);

    const SubspaceBasis v = random_basis(5, 2, rng);
    const ComplexVector expect = v.basis * (v.basis.adjoint() * y) / 1.7;
    CHECK(relative_error(estimate_sub_scov(input_for(y, 0.7, &v), ComplexMatrix::Identity(5, 5)).estimate, expect) <
          1e-12);
    CHECK(estimate_sub_scov(input_for(orthogonal_to(v, rng), 0.7, &v), c).estimate.norm() < 1e-12);

    const SubspaceLmmseFilter f = build_sub_scov_filter(c, v, 0.7);
    CHECK(relative_error(estimate_sub_scov(input_for(y, 0.7, &v), f).estimate,
                         estimate_sub_scov(input_for(y, 0.7, &v), c).estimate) < 1e-14);
    const SubspaceBasis other = random_basis(5, 2, rng);
    CHECK(error_code([&] { estimate_sub_scov(input_for(y, 0.7, &other), f); }) == ErrorCode::invalid_state);
}

TEST_CASE("proj. s-cov examples")
{
    RandomStream rng(5);
    const ComplexMatrix c = random_pd(4, rng);
    const SubspaceBasis full = random_basis(4, 4, rng);
    const ComplexVector y = rng.complex_normal_matrix(4, 1, 2.0).col(0);
    CHECK(relative_error(estimate_proj_scov(input_for(y, 0.4, &full), c).estimate,
                         estimate_scov(input_for(y, 0.4), c).estimate) < 1e-8);

    const SubspaceBasis v = random_basis(4, 2, rng);
    const ComplexVector expect = (2.0 / 3.0) * v.basis * (v.basis.adjoint() * y);
    CHECK(relative_error(estimate_proj_scov(input_for(y, 1.0, &v), ComplexMatrix::Identity(4, 4)).estimate, expect) <
          1e-12);
    CHECK(estimate_proj_scov(input_for(orthogonal_to(v, rng), 1.0, &v), c).estimate.norm() < 1e-12);

    const LmmseFilter pre(c, 0.5);
    CHECK(relative_error(estimate_proj_scov(input_for(y, 1.0, &v), pre).estimate,
                         estimate_proj_scov(input_for(y, 1.0, &v), c).estimate) < 1e-14);
    const LmmseFilter wrong(c, 1.0);
    CHECK(error_code([&] { estimate_proj_scov(input_for(y, 1.0, &v), wrong); }) == ErrorCode::invalid_state);
}

TEST_CASE("GMM examples")
{
    const GmmModel one = single(ComplexVector::Zero(2), ComplexMatrix::Identity(2, 2));
    ComplexVector y(2);
    y << 2.0, 0.0;
    const auto filters = build_gmm_filters(one, 1.0);
    const ChannelEstimate e = estimate_gmm(input_for(y, 1.0), one, filters);
    CHECK(std::abs(e.estimate(0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(e.estimate(1)) < 1e-15);
    REQUIRE(e.responsibilities.has_value());
    CHECK((*e.responsibilities)(0) == 1.0);

    GmmModel sym;
    sym.weights = RealVector::Constant(2, 0.5);
    sym.means = {ComplexVector::Constant(2, Complex(1, -1)), ComplexVector::Constant(2, Complex(-1, 1))};
    sym.covariances = {ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)};
    const auto sf = build_gmm_filters(sym, 0.5);
    const ComplexVector zero = ComplexVector::Zero(2);
    const ComplexMatrix parts = gmm_component_estimates(sf, zero);
    const ChannelEstimate es = estimate_gmm(input_for(zero, 0.5), sym, sf);
    CHECK(relative_error(es.estimate, 0.5 * (parts.col(0) + parts.col(1))) < 1e-15);
    CHECK((*es.responsibilities)(0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(error_code([&] { estimate_gmm(input_for(y, 0.9), one, filters); }) == ErrorCode::invalid_state);
}

TEST_CASE("single zero-mean component equals s-cov")
{
    RandomStream rng(6);
    for (int rep = 0; rep < 10; ++rep)
    {
        const ComplexMatrix c = random_pd(6, rng);
        const GmmModel model = single(ComplexVector::Zero(6), c);
        const double s = rng.uniform(0.01, 3.0);
        const ComplexVector y = rng.complex_normal_matrix(6, 1, 2.0).col(0);
        const auto filters = build_gmm_filters(model, s);
        CHECK(relative_error(estimate_gmm(input_for(y, s), model, filters).estimate,
                             estimate_scov(input_for(y, s), c).estimate) < 1e-12);
    }
}

TEST_CASE("sub. GMM examples")
{
    RandomStream rng(7);
    const GmmModel model = random_model(5, 3, rng, 1.0);
    const SubspaceBasis full = random_basis(5, 5, rng);
    const ComplexVector y = rng.complex_normal_matrix(5, 1, 2.0).col(0);
    const auto filters = build_gmm_filters(model, 0.3);
    CHECK(relative_error(estimate_sub_gmm(input_for(y, 0.3, &full), model).estimate,
                         estimate_gmm(input_for(y, 0.3), model, filters).estimate) < 1e-8);

    const SubspaceBasis v = random_basis(5, 2, rng);
    const GmmModel id = single(ComplexVector::Zero(5), ComplexMatrix::Identity(5, 5));
    const ComplexVector vy = v.basis * (v.basis.adjoint() * y);
    CHECK(relative_error(estimate_sub_gmm(input_for(y, 0.3, &v), id).estimate, vy / 1.3) < 1e-12);
    CHECK((estimate_sub_gmm(input_for(y, 1e-12, &v), model).estimate - vy).norm() < 1e-6 * vy.norm());

    const SubspaceGmmFilters sf = build_sub_gmm_filters(model, v, 0.3);
    const ChannelEstimate direct = estimate_sub_gmm(input_for(y, 0.3, &v), model);
    const ChannelEstimate pre = estimate_sub_gmm(input_for(y, 0.3, &v), sf);
    CHECK(relative_error(direct.estimate, pre.estimate) < 1e-14);
    CHECK(error_code([&] { estimate_sub_gmm(input_for(y, 0.2, &v), sf); }) == ErrorCode::invalid_state);
}

TEST_CASE("sub. GMM responsibilities use the projected observation")
{
    RandomStream rng(77);
    const GmmModel model = random_model(6, 4, rng, 1.5);
    const SubspaceBasis v = random_basis(6, 2, rng);
    const ComplexVector y = rng.complex_normal_matrix(6, 1, 2.0).col(0);
    const double s = 0.4;
    RealVector logp(4);
    for (int k = 0; k < 4; ++k)
    {
        const ComplexMatrix a = v.basis.adjoint() * model.covariances[k] * v.basis;
        logp(k) = std::log(model.weights(k)) +
                  log_density_component(v.basis.adjoint() * model.means[k],
                                        a + s * ComplexMatrix::Identity(2, 2), v.basis.adjoint() * y);
    }
    const RealVector expect = (logp.array() - log_sum_exp(logp)).exp();
    const ChannelEstimate e = estimate_sub_gmm(input_for(y, s, &v), model);
    CHECK(((*e.responsibilities) - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("proj. GMM examples")
{
    RandomStream rng(8);
    const GmmModel model = random_model(4, 3, rng, 1.0);
    const SubspaceBasis full = random_basis(4, 4, rng);
    const ComplexVector y = rng.complex_normal_matrix(4, 1, 2.0).col(0);
    const auto filters = build_gmm_filters(model, 0.6);
    CHECK(relative_error(proj_gmm(y, 0.6, full, model), estimate_gmm(input_for(y, 0.6), model, filters).estimate) <
          1e-8);

    const SubspaceBasis v = random_basis(4, 1, rng);
    const GmmModel id = single(ComplexVector::Zero(4), ComplexMatrix::Identity(4, 4));
    const ComplexVector vy = v.basis * (v.basis.adjoint() * y);
    CHECK(relative_error(proj_gmm(y, 1.0, v, id), 0.8 * vy) < 1e-12);

    GmmModel zero_means = model;
    for (auto &mu : zero_means.means)
        mu.setZero();
    CHECK(proj_gmm(orthogonal_to(v, rng), 1.0, v, zero_means).norm() < 1e-12);

    CHECK(error_code([&] { estimate_proj_gmm(input_for(y, 0.6, &v), model, filters); }) ==
          ErrorCode::invalid_state);
}

TEST_CASE("filter construction")
{
    const GmmModel id = single(ComplexVector::Zero(3), ComplexMatrix::Identity(3, 3));
    const auto f = build_gmm_filters(id, 1.0);
    CHECK((f.filters[0] - 0.5 * ComplexMatrix::Identity(3, 3)).norm() < 1e-15);
    CHECK(f.biases[0].norm() == 0.0);
    CHECK(f.noise_variance == 1.0);
    CHECK(error_code([&] { build_gmm_filters(id, 0.0); }) == ErrorCode::invalid_argument);

    RandomStream rng(9);
    const GmmModel model = random_model(6, 5, rng, 1.0);
    const auto a = build_gmm_filters(model, 0.25);
    const auto b = build_gmm_filters(model, 0.25, 3);
    for (int k = 0; k < 5; ++k)
    {
        CHECK(a.filters[k] == b.filters[k]);
        CHECK(a.biases[k] == b.biases[k]);
    }
    for (int rep = 0; rep < 20; ++rep)
    {
        const ComplexVector y = rng.complex_normal_matrix(6, 1, 2.0).col(0);
        CHECK(relative_error(estimate_gmm(input_for(y, 0.25), model, a).estimate,
                             estimate_gmm_direct(input_for(y, 0.25), model).estimate) < 1e-10);
    }
}

TEST_CASE("full-rank subspace collapses every data-aided estimator")
{
    RandomStream rng(10);
    for (int rep = 0; rep < 5; ++rep)
    {
        const GmmModel model = random_model(5, 3, rng, 1.0);
        const ComplexMatrix c = random_pd(5, rng);
        const SubspaceBasis full = random_basis(5, 5, rng);
        const double s = rng.uniform(0.05, 2.0);
        const ComplexVector y = rng.complex_normal_matrix(5, 1, 2.0).col(0);
        const auto filters = build_gmm_filters(model, s);
        const auto in = input_for(y, s, &full);
        const ComplexVector gmm = estimate_gmm(in, model, filters).estimate;
        const ComplexVector scov = estimate_scov(in, c).estimate;
        CHECK(relative_error(estimate_sub_gmm(in, model).estimate, gmm) < 1e-8);
        CHECK(relative_error(estimate_proj_gmm(in, model, filters).estimate, gmm) < 1e-8);
        CHECK(relative_error(estimate_sub_scov(in, c).estimate, scov) < 1e-8);
        CHECK(relative_error(estimate_proj_scov(in, c).estimate, scov) < 1e-8);
        CHECK(relative_error(estimate_ml(in).estimate, estimate_ls(in).estimate) < 1e-8);
    }
}

TEST_CASE("GMM estimates are convex combinations of component estimates")
{
    RandomStream rng(11);
    const GmmModel model = random_model(4, 5, rng, 1.5);
    const auto filters = build_gmm_filters(model, 0.5);
    for (int rep = 0; rep < 20; ++rep)
    {
        const ComplexVector y = rng.complex_normal_matrix(4, 1, 3.0).col(0);
        const ComplexMatrix parts = gmm_component_estimates(filters, y);
        const ChannelEstimate e = estimate_gmm(input_for(y, 0.5), model, filters);
        const RealVector &r = *e.responsibilities;
        CHECK(std::abs(r.sum() - 1.0) < 1e-12);
        CHECK(relative_error(e.estimate, parts * r.cast<Complex>()) < 1e-13);
        for (int k = 0; k < 5; ++k)
        {
            // One-hot weighting reproduces the component LMMSE estimate.
            const ComplexVector ek = parts * RealVector::Unit(5, k).cast<Complex>();
            const ComplexVector direct =
                model.means[k] + model.covariances[k] *
                                     (model.covariances[k] + 0.5 * ComplexMatrix::Identity(4, 4))
                                         .llt()
                                         .solve(y - model.means[k]);
            CHECK(relative_error(ek, direct) < 1e-12);
        }
    }
}

TEST_CASE("s-cov NMSE matches the analytic MMSE for Gaussian channels")
{
    RandomStream rng(12);
    const Eigen::Index m = 8;
    const ComplexMatrix c = random_pd(m, rng, 0.01, 3.0);
    const double s = 0.5;
    const ComplexMatrix l = c.llt().matrixL();
    const LmmseFilter f(c, s);

    const int trials = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t)
    {
        const ComplexVector h = l * rng.complex_normal_matrix(m, 1).col(0);
        const ComplexVector y = h + rng.complex_normal_matrix(m, 1, s).col(0);
        const double e = (estimate_scov(input_for(y, s), f).estimate - h).squaredNorm();
        sum += e;
        sum_sq += e * e;
    }
    const double trace = c.trace().real();
    const double mean = sum / trials;
    const double se = std::sqrt((sum_sq / trials - mean * mean) / trials) / trace;
    const ComplexMatrix err = c - c * (c + s * ComplexMatrix::Identity(m, m)).inverse() * c;
    const double analytic = err.trace().real() / trace;
    MESSAGE("empirical " << mean / trace << " analytic " << analytic << " se " << se);
    CHECK(std::abs(mean / trace - analytic) < 3 * se);
}

TEST_CASE("LS NMSE at unit noise variance is one")
{
    RandomStream rng(13);
    const Eigen::Index m = 16;
    double err = 0.0, power = 0.0;
    for (int t = 0; t < 2000; ++t)
    {
        const ComplexVector h = rng.complex_normal_matrix(m, 1).col(0);
        const ComplexVector y = h + rng.complex_normal_matrix(m, 1, 1.0).col(0);
        err += (estimate_ls(input_for(y, 1.0)).estimate - h).squaredNorm();
        power += static_cast<double>(m);
    }
    CHECK(err / power == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("estimates stay finite over many random trials")
{
    RandomStream rng(14);
    const GmmModel model = random_model(4, 4, rng, 2.0);
    const ComplexMatrix c = random_pd(4, rng);
    bool finite = true;
    for (int t = 0; t < 10000; ++t)
    {
        const double s = std::pow(10.0, rng.uniform(-3.0, 3.0));
        const SubspaceBasis v = random_basis(4, 1 + static_cast<int>(rng.uniform_index(4)), rng);
        const ComplexVector y = rng.complex_normal_matrix(4, 1, std::pow(10.0, rng.uniform(-2.0, 4.0))).col(0);
        const auto in = input_for(y, s, &v);
        const auto f = build_gmm_filters(model, s);
        finite = finite && estimate_gmm(in, model, f).estimate.allFinite() &&
                 estimate_sub_gmm(in, model).estimate.allFinite() &&
                 proj_gmm(y, s, v, model).allFinite() && estimate_sub_scov(in, c).estimate.allFinite() &&
                 estimate_proj_scov(in, c).estimate.allFinite();
    }
    CHECK(finite);
}
