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

#include "semiblind/cgmm.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/parallel.hpp"
#include "semiblind/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace semiblind {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string component_label(int component)
{
    return component >= 0 ? "component " + std::to_string(component) : "covariance";
}

} // namespace

double log_sum_exp(const Eigen::Ref<const RealVector> &v)
{
    if (v.size() == 0)
        return kNegInf;
    const double peak = v.maxCoeff();
    if (!std::isfinite(peak))
        return peak;
    return peak + std::log((v.array() - peak).exp().sum());
}

bool normalize_log_weights(const Eigen::Ref<const RealVector> &log_weights, Eigen::Ref<RealVector> out)
{
    const double lse = log_sum_exp(log_weights);
    if (!std::isfinite(lse))
    {
        out.setConstant(1.0 / static_cast<double>(log_weights.size()));
        return false;
    }
    // Posteriors below ~1e-250 are flushed to zero so later products never
    // reach subnormal range.
    constexpr double kFlush = -575.0;
    out = (log_weights.array() - lse).unaryExpr([](double d) { return d < kFlush ? 0.0 : std::exp(d); });
    out /= out.sum();
    return true;
}

// ---------------------------------------------------------------------------

ComplexGaussian::ComplexGaussian(ComplexVector mean, const ComplexMatrix &covariance, int component)
    : mean_(std::move(mean))
{
    if (covariance.rows() != mean_.size() || covariance.cols() != mean_.size())
        fail(ErrorCode::dimension_mismatch, component_label(component) + ": covariance shape does not match mean");
    Eigen::LLT<ComplexMatrix> llt(covariance);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::numerical_error,
             component_label(component) + ": covariance is not positive definite (Cholesky failed)");
    lower_ = llt.matrixL();
    log_det_ = 0.0;
    for (Eigen::Index i = 0; i < lower_.rows(); ++i)
    {
        const double d = lower_(i, i).real();
        if (!(d > 0.0) || !std::isfinite(d))
            fail(ErrorCode::numerical_error,
                 component_label(component) + ": covariance is not positive definite (Cholesky failed)");
        log_det_ += 2.0 * std::log(d);
    }
}

double ComplexGaussian::log_density(const Eigen::Ref<const ComplexVector> &x) const
{
    ComplexVector z = x - mean_;
    lower_.triangularView<Eigen::Lower>().solveInPlace(z);
    return -static_cast<double>(dimension()) * std::log(kPi) - log_det_ - z.squaredNorm();
}

RealVector ComplexGaussian::log_density_columns(const Eigen::Ref<const ComplexMatrix> &x) const
{
    ComplexMatrix z = x.colwise() - mean_;
    lower_.triangularView<Eigen::Lower>().solveInPlace(z);
    const double constant = -static_cast<double>(dimension()) * std::log(kPi) - log_det_;
    return (constant - z.colwise().squaredNorm().array()).matrix().transpose();
}

ComplexMatrix ComplexGaussian::solve(const Eigen::Ref<const ComplexMatrix> &rhs) const
{
    ComplexMatrix z = lower_.triangularView<Eigen::Lower>().solve(rhs);
    lower_.adjoint().triangularView<Eigen::Upper>().solveInPlace(z);
    return z;
}

double log_density_component(const ComplexVector &mean, const ComplexMatrix &covariance, const ComplexVector &x)
{
    return ComplexGaussian(mean, covariance).log_density(x);
}

// ---------------------------------------------------------------------------

void GmmModel::validate(double tol) const
{
    const int k = components();
    require(k >= 1, "GMM needs at least one component");
    require(static_cast<int>(means.size()) == k && static_cast<int>(covariances.size()) == k,
            "GMM weights, means and covariances disagree on the component count");
    const Eigen::Index m = dimension();
    require(m >= 1, "GMM dimension must be positive");
    require((weights.array() >= 0.0).all(), "GMM weights must be nonnegative");
    require(std::abs(weights.sum() - 1.0) <= tol, "GMM weights must sum to one");
    for (int i = 0; i < k; ++i)
    {
        require(means[i].size() == m, "GMM mean " + std::to_string(i) + " has the wrong length");
        require(covariances[i].rows() == m && covariances[i].cols() == m,
                "GMM covariance " + std::to_string(i) + " has the wrong shape");
        require(hermitian_defect(covariances[i]) <= tol * std::max(1.0, covariances[i].cwiseAbs().maxCoeff()),
                "GMM covariance " + std::to_string(i) + " is not Hermitian");
    }
}

double GmmModel::log_density(const ComplexVector &x) const
{
    RealVector terms(components());
    for (int k = 0; k < components(); ++k)
        terms(k) = std::log(weights(k)) + ComplexGaussian(means[k], covariances[k], k).log_density(x);
    // Sorted so the floating-point sum does not depend on component order.
    std::sort(terms.begin(), terms.end());
    return log_sum_exp(terms);
}

void EmConfig::validate() const
{
    require(component_count >= 1, "EM needs at least one component");
    require(max_iterations >= 1, "EM max_iterations must be at least 1");
    require(rel_tolerance > 0.0, "EM rel_tolerance must be positive");
    require(covariance_floor > 0.0, "EM covariance_floor must be positive");
    require(kmeans_iterations >= 0, "kmeans_iterations must be nonnegative");
    require(chunk_size >= 1, "EM chunk_size must be positive");
}

// ---------------------------------------------------------------------------

namespace {

struct ChunkGrid {
    Eigen::Index total;
    Eigen::Index size;

    Eigen::Index count() const { return (total + size - 1) / size; }
    Eigen::Index begin(Eigen::Index c) const { return c * size; }
    Eigen::Index length(Eigen::Index c) const { return std::min(size, total - c * size); }
};

// Squared distances ||x_t - c_k||^2 for t in [begin, begin + n).
RealMatrix squared_distances(const ComplexMatrix &x, const ComplexMatrix &centers, Eigen::Index begin, Eigen::Index n)
{
    const auto block = x.middleCols(begin, n);
    const RealVector x_norm = block.colwise().squaredNorm().transpose();
    const RealVector c_norm = centers.colwise().squaredNorm().transpose();
    const RealMatrix cross = (block.adjoint() * centers).real(); // n x K
    RealMatrix d = (-2.0 * cross).colwise() + x_norm;
    d.rowwise() += c_norm.transpose();
    return d.cwiseMax(0.0);
}

// k-means++ seeding followed by Lloyd iterations; returns hard assignments.
std::vector<int> kmeans_assignments(const ComplexMatrix &x, int k, int lloyd_iterations, RandomStream &rng,
                                    const ChunkGrid &grid, unsigned threads)
{
    const Eigen::Index t_count = x.cols();
    ComplexMatrix centers(x.rows(), k);

    centers.col(0) = x.col(static_cast<Eigen::Index>(rng.uniform_index(t_count)));
    RealVector nearest = (x.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c)
    {
        const double total = nearest.sum();
        Eigen::Index pick = 0;
        if (total > 0.0)
        {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = t_count - 1;
            for (Eigen::Index t = 0; t < t_count; ++t)
            {
                acc += nearest(t);
                if (acc > target)
                {
                    pick = t;
                    break;
                }
            }
        }
        else
        {
            pick = static_cast<Eigen::Index>(rng.uniform_index(t_count));
        }
        centers.col(c) = x.col(pick);
        nearest = nearest.cwiseMin((x.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }

    std::vector<int> assignment(t_count, -1);
    for (int iter = 0; iter <= lloyd_iterations; ++iter)
    {
        std::vector<char> changed(grid.count(), 0);
        parallel_for(grid.count(), threads, [&](std::size_t ci) {
            const auto c = static_cast<Eigen::Index>(ci);
            const RealMatrix d = squared_distances(x, centers, grid.begin(c), grid.length(c));
            for (Eigen::Index i = 0; i < d.rows(); ++i)
            {
                Eigen::Index best;
                d.row(i).minCoeff(&best);
                int &slot = assignment[grid.begin(c) + i];
                if (slot != static_cast<int>(best))
                {
                    slot = static_cast<int>(best);
                    changed[ci] = 1;
                }
            }
        });
        if (iter == lloyd_iterations || std::none_of(changed.begin(), changed.end(), [](char v) { return v; }))
            break;

        ComplexMatrix sums = ComplexMatrix::Zero(x.rows(), k);
        std::vector<Eigen::Index> counts(k, 0);
        for (Eigen::Index t = 0; t < t_count; ++t)
        {
            sums.col(assignment[t]) += x.col(t);
            ++counts[assignment[t]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0)
                centers.col(c) = sums.col(c) / static_cast<double>(counts[c]);
    }
    return assignment;
}

struct EStepResult {
    RealMatrix responsibilities; // T x K
    double log_likelihood = 0.0;
    int underflow_rows = 0;
};

EStepResult e_step(const ComplexMatrix &x, const std::vector<ComplexGaussian> &gaussians, const RealVector &log_weights,
                   const ChunkGrid &grid, unsigned threads)
{
    const Eigen::Index t_count = x.cols();
    const int k = static_cast<int>(gaussians.size());
    RealMatrix log_joint(t_count, k);

    const auto chunks = static_cast<std::size_t>(grid.count());
    parallel_for(chunks * k, threads, [&](std::size_t task) {
        const int comp = static_cast<int>(task % k);
        const auto c = static_cast<Eigen::Index>(task / k);
        log_joint.col(comp).segment(grid.begin(c), grid.length(c)) =
            (gaussians[comp].log_density_columns(x.middleCols(grid.begin(c), grid.length(c))).array() + log_weights(comp))
                .matrix();
    });

    EStepResult out;
    out.responsibilities.resize(t_count, k);
    RealVector row_lse(t_count);
    std::vector<char> underflow(t_count, 0);
    parallel_for(chunks, threads, [&](std::size_t ci) {
        const auto c = static_cast<Eigen::Index>(ci);
        RealVector row(k);
        for (Eigen::Index t = grid.begin(c); t < grid.begin(c) + grid.length(c); ++t)
        {
            const RealVector lj = log_joint.row(t).transpose();
            row_lse(t) = log_sum_exp(lj);
            if (!normalize_log_weights(lj, row))
                underflow[t] = 1;
            out.responsibilities.row(t) = row.transpose();
        }
    });

    double ll = 0.0;
    for (Eigen::Index t = 0; t < t_count; ++t)
    {
        ll += row_lse(t);
        out.underflow_rows += underflow[t];
    }
    out.log_likelihood = ll;
    return out;
}

ComplexMatrix weighted_scatter(const ComplexMatrix &x, const ComplexVector &center, const Eigen::Ref<const RealVector> &w,
                               const ChunkGrid &grid)
{
    ComplexMatrix scatter = ComplexMatrix::Zero(x.rows(), x.rows());
    ComplexMatrix y(x.rows(), 0);
    for (Eigen::Index c = 0; c < grid.count(); ++c)
    {
        const Eigen::Index b = grid.begin(c);
        const Eigen::Index n = grid.length(c);
        // Only samples with nonzero weight contribute.
        Eigen::Index used = 0;
        for (Eigen::Index t = b; t < b + n; ++t)
            used += w(t) > 0.0;
        if (used == 0)
            continue;
        y.resize(x.rows(), used);
        Eigen::Index col = 0;
        for (Eigen::Index t = b; t < b + n; ++t)
            if (w(t) > 0.0)
                y.col(col++) = (x.col(t) - center) * std::sqrt(w(t));
        scatter.noalias() += y * y.adjoint();
    }
    return scatter;
}

} // namespace

FitResult fit(const ComplexMatrix &x, const EmConfig &config)
{
    config.validate();
    const Eigen::Index t_count = x.cols();
    const Eigen::Index dim = x.rows();
    const int k = config.component_count;
    require(dim >= 1, "EM input has zero-length samples");
    if (t_count < k)
        fail(ErrorCode::invalid_argument, "EM needs at least as many samples (" + std::to_string(t_count) +
                                              ") as components (" + std::to_string(k) + ")");
    if (!x.allFinite())
        fail(ErrorCode::invalid_argument, "EM input contains non-finite entries");

    const ChunkGrid grid{t_count, config.chunk_size};
    const unsigned threads = config.threads;
    RandomStream rng(config.seed);

    const double avg_power = x.colwise().squaredNorm().sum() / static_cast<double>(t_count * dim);
    const double floor = config.covariance_floor * (avg_power > 0.0 ? avg_power : 1.0);
    const ComplexMatrix ridge = floor * ComplexMatrix::Identity(dim, dim);

    // Initial responsibilities.
    RealMatrix resp = RealMatrix::Zero(t_count, k);
    if (k == 1)
    {
        resp.setOnes();
    }
    else if (config.init_strategy == InitStrategy::kmeans_plus_plus)
    {
        const auto assignment = kmeans_assignments(x, k, config.kmeans_iterations, rng, grid, threads);
        for (Eigen::Index t = 0; t < t_count; ++t)
            resp(t, assignment[t]) = 1.0;
    }
    else
    {
        for (Eigen::Index t = 0; t < t_count; ++t)
            for (int c = 0; c < k; ++c)
                resp(t, c) = rng.uniform(1e-3, 1.0);
        resp = resp.array().colwise() / resp.rowwise().sum().array();
    }

    FitResult result;
    result.report.covariance_floor = floor;
    GmmModel &model = result.model;
    model.weights.resize(k);
    model.means.assign(k, ComplexVector::Zero(dim));
    model.covariances.assign(k, ComplexMatrix::Zero(dim, dim));

    const ComplexVector global_mean = x.rowwise().mean();
    const ComplexMatrix global_cov =
        hermitian_part(weighted_scatter(x, global_mean, RealVector::Ones(t_count), grid) / static_cast<double>(t_count)) +
        ridge;

    for (int iter = 1; iter <= config.max_iterations; ++iter)
    {
        // M-step.
        RealVector mass(k);
        for (int c = 0; c < k; ++c)
        {
            double s = 0.0;
            for (Eigen::Index t = 0; t < t_count; ++t)
                s += resp(t, c);
            mass(c) = s;
        }

        std::vector<char> starved(k, 0);
        parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t ci) {
            const auto c = static_cast<int>(ci);
            if (mass(c) < 1e-12 * static_cast<double>(t_count))
            {
                starved[c] = 1;
                return;
            }
            model.means[c] = x * resp.col(c) / mass(c);
            model.covariances[c] =
                hermitian_part(weighted_scatter(x, model.means[c], resp.col(c), grid) / mass(c)) + ridge;
        });
        model.weights = mass / static_cast<double>(t_count);

        if (std::any_of(starved.begin(), starved.end(), [](char v) { return v; }))
        {
            const RealVector max_resp = resp.rowwise().maxCoeff();
            std::vector<Eigen::Index> order(t_count);
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](Eigen::Index a, Eigen::Index b) { return max_resp(a) < max_resp(b); });
            std::size_t next = 0;
            for (int c = 0; c < k; ++c)
            {
                if (!starved[c])
                    continue;
                const Eigen::Index s = order[next++];
                model.means[c] = x.col(s);
                model.covariances[c] = global_cov;
                model.weights(c) = 1.0 / k;
                result.report.reinitializations.push_back({iter, c, s});
            }
            model.weights /= model.weights.sum();
        }

        // E-step.
        std::vector<ComplexGaussian> gaussians;
        gaussians.reserve(k);
        for (int c = 0; c < k; ++c)
            gaussians.emplace_back(model.means[c], model.covariances[c], c);
        const RealVector log_weights = model.weights.array().log().matrix();
        EStepResult e = e_step(x, gaussians, log_weights, grid, threads);
        resp = std::move(e.responsibilities);

        const double ll = e.log_likelihood;
        const bool have_previous = !result.report.log_likelihood.empty();
        const double previous = have_previous ? result.report.log_likelihood.back() : 0.0;
        result.report.log_likelihood.push_back(ll);

        if (k == 1)
        {
            // Closed form: the first M-step is already the maximum.
            result.report.converged = true;
            break;
        }
        if (have_previous && (ll - previous) < config.rel_tolerance * std::abs(previous))
        {
            result.report.converged = true;
            break;
        }
    }
    return result;
}

FitResult fit(const ChannelDataset &dataset, const EmConfig &config)
{
    return fit(dataset.samples, config);
}

Responsibilities responsibilities(const GmmModel &model, const ComplexMatrix &observations,
                                  const ComplexMatrix &noise_covariance, unsigned threads)
{
    model.validate(1e-9);
    const int m = model.dimension();
    if (observations.rows() != m)
        fail(ErrorCode::dimension_mismatch, "observations have length " + std::to_string(observations.rows()) +
                                                ", model expects " + std::to_string(m));
    if (noise_covariance.rows() != m || noise_covariance.cols() != m)
        fail(ErrorCode::dimension_mismatch, "noise covariance shape does not match the model dimension");

    const int k = model.components();
    std::vector<ComplexGaussian> gaussians;
    gaussians.reserve(k);
    for (int c = 0; c < k; ++c)
        gaussians.emplace_back(model.means[c], model.covariances[c] + noise_covariance, c);

    const RealVector log_weights = model.weights.array().log().matrix();
    const ChunkGrid grid{observations.cols(), 2048};
    EStepResult e = e_step(observations, gaussians, log_weights, grid, threads);
    return {std::move(e.responsibilities), e.underflow_rows};
}

} // namespace semiblind
