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
#include "semiblind/subspace.hpp"
#include "semiblind/types.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace semiblind {

enum class EstimatorKind { ls, ml, scov, sub_scov, proj_scov, gmm, sub_gmm, proj_gmm };

inline constexpr std::array<EstimatorKind, 8> kAllEstimators = {
    EstimatorKind::ls,        EstimatorKind::ml,  EstimatorKind::scov,    EstimatorKind::sub_scov,
    EstimatorKind::proj_scov, EstimatorKind::gmm, EstimatorKind::sub_gmm, EstimatorKind::proj_gmm,
};

std::string_view estimator_name(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator(std::string_view name);
bool is_data_aided(EstimatorKind kind);
// The pilot-only estimator a data-aided variant collapses to when J = M.
EstimatorKind pilot_counterpart(EstimatorKind kind);

struct EstimatorInput {
    ComplexVector pilot_observation; // y_p = h + n
    double noise_variance = 1.0;     // sigma^2, SNR = 1 / sigma^2
    const SubspaceBasis *subspace = nullptr; // non-owning; required by data-aided estimators
    int user_count = 0;                       // J; 0 means "take it from the subspace"
};

struct ChannelEstimate {
    ComplexVector estimate;
    std::optional<RealVector> responsibilities; // GMM variants only
};

// Noise variance seen after projecting onto a J-dimensional subspace of C^M,
// approximating E[P] by (J/M) I.
double projected_noise_variance(double noise_variance, Eigen::Index j, Eigen::Index m);

// Zero-mean LMMSE filter W = C (C + sigma^2 I)^{-1}.
class LmmseFilter {
public:
    LmmseFilter(const ComplexMatrix &covariance, double noise_variance);

    ComplexVector apply(const ComplexVector &y) const { return matrix_ * y; }
    const ComplexMatrix &matrix() const noexcept { return matrix_; }
    double noise_variance() const noexcept { return noise_variance_; }

private:
    ComplexMatrix matrix_;
    double noise_variance_;
};

// Per-component affine filters h_k = W_k y + b_k with W_k = C_k (C_k + s I)^{-1}
// and b_k = mu_k - W_k mu_k, plus the observation densities N_C(mu_k, C_k + s I)
// needed for the responsibilities. Valid only for the noise variance s they
// were built for.
struct PrecomputedGmmFilters {
    double noise_variance = 0.0;
    RealVector log_weights;
    std::vector<ComplexMatrix> filters;
    std::vector<ComplexVector> biases;
    std::vector<ComplexGaussian> observation_densities;

    int components() const noexcept { return static_cast<int>(filters.size()); }
    Eigen::Index dimension() const noexcept { return filters.empty() ? 0 : filters.front().rows(); }
};

PrecomputedGmmFilters build_gmm_filters(const GmmModel &model, double effective_noise_variance,
                                        unsigned threads = 1);

// Filters of the subspace GMM for one basis V: everything lives in the
// J-dimensional coordinates V^H y. Must be rebuilt for every new V.
struct SubspaceGmmFilters {
    double noise_variance = 0.0;
    ComplexMatrix basis; // V
    RealVector log_weights;
    std::vector<ComplexMatrix> filters;          // A_k (A_k + sigma^2 I_J)^{-1}, A_k = V^H C_k V
    std::vector<ComplexVector> projected_means;  // V^H mu_k
    std::vector<ComplexGaussian> observation_densities; // N_C(V^H mu_k, A_k + sigma^2 I_J)

    int components() const noexcept { return static_cast<int>(filters.size()); }
};

SubspaceGmmFilters build_sub_gmm_filters(const GmmModel &model, const SubspaceBasis &basis, double noise_variance);

// Sub. s-cov filter for one basis: V (A (A + sigma^2 I_J)^{-1}) V^H, A = V^H C V.
struct SubspaceLmmseFilter {
    double noise_variance = 0.0;
    ComplexMatrix basis;
    ComplexMatrix reduced_filter; // J x J
};

SubspaceLmmseFilter build_sub_scov_filter(const ComplexMatrix &covariance, const SubspaceBasis &basis,
                                          double noise_variance);

// ---- pilot-only -----------------------------------------------------------

ChannelEstimate estimate_ls(const EstimatorInput &input);

ChannelEstimate estimate_scov(const EstimatorInput &input, const ComplexMatrix &covariance);
ChannelEstimate estimate_scov(const EstimatorInput &input, const LmmseFilter &filter);

// Precomputed-filter path: O(K M^2) per call.
ChannelEstimate estimate_gmm(const EstimatorInput &input, const GmmModel &model, const PrecomputedGmmFilters &filters);
// Direct path: Cholesky solves per call, no precomputation.
ChannelEstimate estimate_gmm_direct(const EstimatorInput &input, const GmmModel &model);

// ---- data-aided -----------------------------------------------------------

ChannelEstimate estimate_ml(const EstimatorInput &input);

ChannelEstimate estimate_sub_scov(const EstimatorInput &input, const ComplexMatrix &covariance);
ChannelEstimate estimate_sub_scov(const EstimatorInput &input, const SubspaceLmmseFilter &filter);

ChannelEstimate estimate_proj_scov(const EstimatorInput &input, const ComplexMatrix &covariance);
// `filter` must be built for projected_noise_variance(sigma^2, J, M).
ChannelEstimate estimate_proj_scov(const EstimatorInput &input, const LmmseFilter &filter);

ChannelEstimate estimate_sub_gmm(const EstimatorInput &input, const GmmModel &model);
ChannelEstimate estimate_sub_gmm(const EstimatorInput &input, const SubspaceGmmFilters &filters);

// `filters` must be built for projected_noise_variance(sigma^2, J, M).
ChannelEstimate estimate_proj_gmm(const EstimatorInput &input, const GmmModel &model,
                                  const PrecomputedGmmFilters &filters);

// ---- building blocks exposed for inspection and tests ---------------------

// Column k is the k-th per-component LMMSE estimate for observation y.
ComplexMatrix gmm_component_estimates(const PrecomputedGmmFilters &filters, const ComplexVector &y);
RealVector gmm_responsibilities(const PrecomputedGmmFilters &filters, const ComplexVector &y);

} // namespace semiblind
