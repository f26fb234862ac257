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

#include "semiblind/estimators.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/parallel.hpp"

#include <cmath>
#include <string>

namespace semiblind {

std::string_view estimator_name(EstimatorKind kind)
{
    switch (kind)
    {
    case EstimatorKind::ls: return "ls";
    case EstimatorKind::ml: return "ml";
    case EstimatorKind::scov: return "scov";
    case EstimatorKind::sub_scov: return "sub_scov";
    case EstimatorKind::proj_scov: return "proj_scov";
    case EstimatorKind::gmm: return "gmm";
    case EstimatorKind::sub_gmm: return "sub_gmm";
    case EstimatorKind::proj_gmm: return "proj_gmm";
    }
    return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name)
{
    for (auto kind : kAllEstimators)
        if (estimator_name(kind) == name)
            return kind;
    return std::nullopt;
}

bool is_data_aided(EstimatorKind kind)
{
    return pilot_counterpart(kind) != kind;
}

EstimatorKind pilot_counterpart(EstimatorKind kind)
{
    switch (kind)
    {
    case EstimatorKind::ml: return EstimatorKind::ls;
    case EstimatorKind::sub_scov:
    case EstimatorKind::proj_scov: return EstimatorKind::scov;
    case EstimatorKind::sub_gmm:
    case EstimatorKind::proj_gmm: return EstimatorKind::gmm;
    default: return kind;
    }
}

double projected_noise_variance(double noise_variance, Eigen::Index j, Eigen::Index m)
{
    return noise_variance * static_cast<double>(j) / static_cast<double>(m);
}

namespace {

bool same_variance(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void check_input(const EstimatorInput &input, bool needs_subspace)
{
    require(input.noise_variance > 0.0 && std::isfinite(input.noise_variance), "noise variance must be positive");
    require(input.pilot_observation.size() > 0, "empty pilot observation");
    if (!needs_subspace)
        return;
    if (input.subspace == nullptr)
        fail(ErrorCode::invalid_argument, "data-aided estimator called without a subspace");
    if (input.subspace->antennas() != input.pilot_observation.size())
        fail(ErrorCode::dimension_mismatch, "subspace basis and pilot observation disagree on M");
    if (input.user_count != 0 && input.user_count != input.subspace->dimension())
        fail(ErrorCode::dimension_mismatch, "user count J disagrees with the subspace dimension");
}

void check_dimension(Eigen::Index expected, const EstimatorInput &input)
{
    if (expected != input.pilot_observation.size())
        fail(ErrorCode::dimension_mismatch, "observation has length " + std::to_string(input.pilot_observation.size()) +
                                                ", estimator expects " + std::to_string(expected));
}

// A (A + s I)^{-1} for Hermitian PD A + s I, via Cholesky. Since A and
// (A + s I)^{-1} commute, this equals ((A + s I)^{-1} A)^H.
ComplexMatrix lmmse_matrix(const ComplexMatrix &a, double s, int component)
{
    const Eigen::Index n = a.rows();
    ComplexGaussian g(ComplexVector::Zero(n), a + s * ComplexMatrix::Identity(n, n), component);
    return g.solve(a).adjoint();
}

RealVector responsibilities_at(const std::vector<ComplexGaussian> &densities, const RealVector &log_weights,
                               const ComplexVector &y)
{
    const auto k = static_cast<Eigen::Index>(densities.size());
    RealVector log_joint(k);
    for (Eigen::Index c = 0; c < k; ++c)
        log_joint(c) = log_weights(c) + densities[c].log_density(y);
    RealVector out(k);
    normalize_log_weights(log_joint, out);
    return out;
}

ChannelEstimate combine(const PrecomputedGmmFilters &filters, const ComplexVector &y)
{
    ChannelEstimate out;
    RealVector resp = gmm_responsibilities(filters, y);
    out.estimate = gmm_component_estimates(filters, y) * resp.cast<Complex>();
    out.responsibilities = std::move(resp);
    return out;
}

} // namespace

LmmseFilter::LmmseFilter(const ComplexMatrix &covariance, double noise_variance)
    : noise_variance_(noise_variance)
{
    require(covariance.rows() == covariance.cols() && covariance.rows() > 0, "covariance must be square");
    require(noise_variance > 0.0 && std::isfinite(noise_variance), "noise variance must be positive");
    matrix_ = lmmse_matrix(covariance, noise_variance, -1);
}

PrecomputedGmmFilters build_gmm_filters(const GmmModel &model, double effective_noise_variance, unsigned threads)
{
    model.validate(1e-9);
    require(effective_noise_variance > 0.0 && std::isfinite(effective_noise_variance),
            "effective noise variance must be positive");
    const int k = model.components();
    const Eigen::Index m = model.dimension();

    PrecomputedGmmFilters out;
    out.noise_variance = effective_noise_variance;
    out.log_weights = model.weights.array().log().matrix();
    out.filters.resize(k);
    out.biases.resize(k);
    std::vector<std::optional<ComplexGaussian>> densities(k);

    parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t ci) {
        const auto c = static_cast<int>(ci);
        const ComplexMatrix total =
            model.covariances[c] + effective_noise_variance * ComplexMatrix::Identity(m, m);
        densities[c].emplace(model.means[c], total, c);
        out.filters[c] = densities[c]->solve(model.covariances[c]).adjoint();
        out.biases[c] = model.means[c] - out.filters[c] * model.means[c];
    });
    out.observation_densities.reserve(k);
    for (auto &d : densities)
        out.observation_densities.push_back(std::move(*d));
    return out;
}

SubspaceGmmFilters build_sub_gmm_filters(const GmmModel &model, const SubspaceBasis &basis, double noise_variance)
{
    model.validate(1e-9);
    require(noise_variance > 0.0 && std::isfinite(noise_variance), "noise variance must be positive");
    if (basis.antennas() != model.dimension())
        fail(ErrorCode::dimension_mismatch, "subspace basis and GMM disagree on M");
    const int k = model.components();
    const Eigen::Index j = basis.dimension();
    const ComplexMatrix &v = basis.basis;

    SubspaceGmmFilters out;
    out.noise_variance = noise_variance;
    out.basis = v;
    out.log_weights = model.weights.array().log().matrix();
    out.filters.reserve(k);
    out.projected_means.reserve(k);
    out.observation_densities.reserve(k);
    for (int c = 0; c < k; ++c)
    {
        const ComplexMatrix reduced = hermitian_part(v.adjoint() * model.covariances[c] * v);
        ComplexGaussian density(v.adjoint() * model.means[c], reduced + noise_variance * ComplexMatrix::Identity(j, j),
                                c);
        out.filters.push_back(density.solve(reduced).adjoint());
        out.projected_means.push_back(density.mean());
        out.observation_densities.push_back(std::move(density));
    }
    return out;
}

SubspaceLmmseFilter build_sub_scov_filter(const ComplexMatrix &covariance, const SubspaceBasis &basis,
                                          double noise_variance)
{
    require(noise_variance > 0.0 && std::isfinite(noise_variance), "noise variance must be positive");
    if (basis.antennas() != covariance.rows())
        fail(ErrorCode::dimension_mismatch, "subspace basis and covariance disagree on M");
    const ComplexMatrix &v = basis.basis;
    SubspaceLmmseFilter out;
    out.noise_variance = noise_variance;
    out.basis = v;
    out.reduced_filter = lmmse_matrix(hermitian_part(v.adjoint() * covariance * v), noise_variance, -1);
    return out;
}

ComplexMatrix gmm_component_estimates(const PrecomputedGmmFilters &filters, const ComplexVector &y)
{
    ComplexMatrix out(y.size(), filters.components());
    for (int c = 0; c < filters.components(); ++c)
        out.col(c) = filters.filters[c] * y + filters.biases[c];
    return out;
}

RealVector gmm_responsibilities(const PrecomputedGmmFilters &filters, const ComplexVector &y)
{
    return responsibilities_at(filters.observation_densities, filters.log_weights, y);
}

// ---------------------------------------------------------------------------

ChannelEstimate estimate_ls(const EstimatorInput &input)
{
    check_input(input, false);
    return {input.pilot_observation, std::nullopt};
}

ChannelEstimate estimate_ml(const EstimatorInput &input)
{
    check_input(input, true);
    const ComplexMatrix &v = input.subspace->basis;
    return {v * (v.adjoint() * input.pilot_observation), std::nullopt};
}

ChannelEstimate estimate_scov(const EstimatorInput &input, const ComplexMatrix &covariance)
{
    check_input(input, false);
    check_dimension(covariance.rows(), input);
    return estimate_scov(input, LmmseFilter(covariance, input.noise_variance));
}

ChannelEstimate estimate_scov(const EstimatorInput &input, const LmmseFilter &filter)
{
    check_input(input, false);
    check_dimension(filter.matrix().rows(), input);
    if (!same_variance(filter.noise_variance(), input.noise_variance))
        fail(ErrorCode::invalid_state, "s-cov filter was built for a different noise variance");
    return {filter.apply(input.pilot_observation), std::nullopt};
}

ChannelEstimate estimate_sub_scov(const EstimatorInput &input, const ComplexMatrix &covariance)
{
    check_input(input, true);
    check_dimension(covariance.rows(), input);
    return estimate_sub_scov(input, build_sub_scov_filter(covariance, *input.subspace, input.noise_variance));
}

ChannelEstimate estimate_sub_scov(const EstimatorInput &input, const SubspaceLmmseFilter &filter)
{
    check_input(input, true);
    if (!same_variance(filter.noise_variance, input.noise_variance))
        fail(ErrorCode::invalid_state, "sub. s-cov filter was built for a different noise variance");
    if (filter.basis != input.subspace->basis)
        fail(ErrorCode::invalid_state, "sub. s-cov filter was built for a different subspace");
    const ComplexMatrix &v = filter.basis;
    return {v * (filter.reduced_filter * (v.adjoint() * input.pilot_observation)), std::nullopt};
}

ChannelEstimate estimate_proj_scov(const EstimatorInput &input, const ComplexMatrix &covariance)
{
    check_input(input, true);
    check_dimension(covariance.rows(), input);
    const double s = projected_noise_variance(input.noise_variance, input.subspace->dimension(), covariance.rows());
    return estimate_proj_scov(input, LmmseFilter(covariance, s));
}

ChannelEstimate estimate_proj_scov(const EstimatorInput &input, const LmmseFilter &filter)
{
    check_input(input, true);
    check_dimension(filter.matrix().rows(), input);
    const Eigen::Index m = input.pilot_observation.size();
    const double s = projected_noise_variance(input.noise_variance, input.subspace->dimension(), m);
    if (!same_variance(filter.noise_variance(), s))
        fail(ErrorCode::invalid_state, "proj. s-cov filter was not built for sigma^2 J / M");
    const ComplexMatrix &v = input.subspace->basis;
    return {filter.apply(v * (v.adjoint() * input.pilot_observation)), std::nullopt};
}

ChannelEstimate estimate_gmm(const EstimatorInput &input, const GmmModel &model, const PrecomputedGmmFilters &filters)
{
    check_input(input, false);
    check_dimension(model.dimension(), input);
    if (filters.components() != model.components() || filters.dimension() != model.dimension())
        fail(ErrorCode::invalid_state, "GMM filters were built for a different model");
    if (!same_variance(filters.noise_variance, input.noise_variance))
        fail(ErrorCode::invalid_state, "GMM filters were built for noise variance " +
                                           std::to_string(filters.noise_variance) + ", input has " +
                                           std::to_string(input.noise_variance));
    return combine(filters, input.pilot_observation);
}

ChannelEstimate estimate_gmm_direct(const EstimatorInput &input, const GmmModel &model)
{
    check_input(input, false);
    check_dimension(model.dimension(), input);
    const int k = model.components();
    const Eigen::Index m = model.dimension();
    const ComplexVector &y = input.pilot_observation;

    RealVector log_joint(k);
    ComplexMatrix components(m, k);
    for (int c = 0; c < k; ++c)
    {
        ComplexGaussian density(model.means[c],
                                model.covariances[c] + input.noise_variance * ComplexMatrix::Identity(m, m), c);
        log_joint(c) = std::log(model.weights(c)) + density.log_density(y);
        components.col(c) = model.covariances[c] * density.solve(y - model.means[c]) + model.means[c];
    }
    RealVector resp(k);
    normalize_log_weights(log_joint, resp);
    return {components * resp.cast<Complex>(), resp};
}

ChannelEstimate estimate_sub_gmm(const EstimatorInput &input, const GmmModel &model)
{
    check_input(input, true);
    check_dimension(model.dimension(), input);
    return estimate_sub_gmm(input, build_sub_gmm_filters(model, *input.subspace, input.noise_variance));
}

ChannelEstimate estimate_sub_gmm(const EstimatorInput &input, const SubspaceGmmFilters &filters)
{
    check_input(input, true);
    if (!same_variance(filters.noise_variance, input.noise_variance))
        fail(ErrorCode::invalid_state, "sub. GMM filters were built for a different noise variance");
    if (filters.basis != input.subspace->basis)
        fail(ErrorCode::invalid_state, "sub. GMM filters were built for a different subspace");

    const ComplexMatrix &v = filters.basis;
    const ComplexVector z = v.adjoint() * input.pilot_observation;
    RealVector resp = responsibilities_at(filters.observation_densities, filters.log_weights, z);

    ComplexVector reduced = ComplexVector::Zero(v.cols());
    for (int c = 0; c < filters.components(); ++c)
        reduced += resp(c) * (filters.filters[c] * (z - filters.projected_means[c]) + filters.projected_means[c]);
    return {v * reduced, std::move(resp)};
}

ChannelEstimate estimate_proj_gmm(const EstimatorInput &input, const GmmModel &model,
                                  const PrecomputedGmmFilters &filters)
{
    check_input(input, true);
    check_dimension(model.dimension(), input);
    if (filters.components() != model.components() || filters.dimension() != model.dimension())
        fail(ErrorCode::invalid_state, "GMM filters were built for a different model");
    const double s = projected_noise_variance(input.noise_variance, input.subspace->dimension(), model.dimension());
    if (!same_variance(filters.noise_variance, s))
        fail(ErrorCode::invalid_state, "proj. GMM filters were not built for sigma^2 J / M");
    const ComplexMatrix &v = input.subspace->basis;
    return combine(filters, v * (v.adjoint() * input.pilot_observation));
}

} // namespace semiblind
