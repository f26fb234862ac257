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

#include "semiblind/channel_scenarios.hpp"
#include "semiblind/types.hpp"

#include <cstdint>
#include <vector>

namespace semiblind {

// log(sum_i exp(v_i)); -inf for an empty or all -inf input.
double log_sum_exp(const Eigen::Ref<const RealVector> &v);

// Circularly-symmetric complex Gaussian N_C(mean, covariance), held through the
// lower Cholesky factor of its covariance. Construction throws numerical_error
// if the covariance is not positive definite; `component` (when >= 0) is named
// in the message.
class ComplexGaussian {
public:
    ComplexGaussian(ComplexVector mean, const ComplexMatrix &covariance, int component = -1);

    // -M log(pi) - log det C - (x - mu)^H C^{-1} (x - mu)
    double log_density(const Eigen::Ref<const ComplexVector> &x) const;
    // Column-wise log-density of a batch of observations.
    RealVector log_density_columns(const Eigen::Ref<const ComplexMatrix> &x) const;
    // C^{-1} rhs via the Cholesky factor.
    ComplexMatrix solve(const Eigen::Ref<const ComplexMatrix> &rhs) const;

    Eigen::Index dimension() const noexcept { return mean_.size(); }
    double log_det() const noexcept { return log_det_; }
    const ComplexVector &mean() const noexcept { return mean_; }
    const ComplexMatrix &lower() const noexcept { return lower_; }

private:
    ComplexVector mean_;
    ComplexMatrix lower_;
    double log_det_ = 0.0;
};

double log_density_component(const ComplexVector &mean, const ComplexMatrix &covariance, const ComplexVector &x);

struct GmmModel {
    RealVector weights;                     // p(k)
    std::vector<ComplexVector> means;       // mu_k
    std::vector<ComplexMatrix> covariances; // C_k, Hermitian PD

    int components() const noexcept { return static_cast<int>(weights.size()); }
    int dimension() const noexcept { return means.empty() ? 0 : static_cast<int>(means.front().size()); }

    // Checks shapes, weights (nonnegative, sum 1 within tol) and Hermitian
    // covariances (elementwise within tol). Throws invalid_argument.
    void validate(double tol = 1e-12) const;

    // log f(x) of the mixture.
    double log_density(const ComplexVector &x) const;
};

enum class InitStrategy { kmeans_plus_plus, random_responsibility };

struct EmConfig {
    int component_count = 1;
    int max_iterations = 300;
    double rel_tolerance = 1e-6;
    // Ridge added to every covariance, relative to the average per-antenna
    // sample power of the training data.
    double covariance_floor = 1e-6;
    InitStrategy init_strategy = InitStrategy::kmeans_plus_plus;
    std::uint64_t seed = 0;
    int kmeans_iterations = 20;
    // Samples per work item. The chunking fixes the reduction order, so for
    // a given chunk_size results are bit-identical for any thread count.
    Eigen::Index chunk_size = 2048;
    unsigned threads = 0;

    void validate() const;
};

struct ReinitEvent {
    int iteration;
    int component;
    Eigen::Index sample;
};

struct FitReport {
    std::vector<double> log_likelihood; // total data log-likelihood per iteration
    std::vector<ReinitEvent> reinitializations;
    bool converged = false;
    double covariance_floor = 0.0; // absolute ridge actually applied

    int iterations() const noexcept { return static_cast<int>(log_likelihood.size()); }
};

struct FitResult {
    GmmModel model;
    FitReport report;
};

// Expectation-maximization for a complex GMM on the columns of `samples`.
FitResult fit(const ComplexMatrix &samples, const EmConfig &config);
FitResult fit(const ChannelDataset &dataset, const EmConfig &config);

struct Responsibilities {
    RealMatrix values;      // T x K, rows sum to 1
    int underflow_rows = 0; // rows where every component underflowed; set uniform
};

// p(k | y_t) for y_t = h + n with n ~ N_C(0, noise_covariance).
Responsibilities responsibilities(const GmmModel &model, const ComplexMatrix &observations,
                                  const ComplexMatrix &noise_covariance, unsigned threads = 0);

// Normalizes log-weights into a probability vector with log-sum-exp.
// Returns false (and a uniform vector) if every entry is -inf or NaN.
bool normalize_log_weights(const Eigen::Ref<const RealVector> &log_weights, Eigen::Ref<RealVector> out);

} // namespace semiblind
