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

#include "semiblind/types.hpp"

#include <cstdint>

namespace semiblind {

// Orthonormal basis of an estimated J-dimensional channel subspace together
// with the corresponding eigenvalues of the receive sample covariance.
struct SubspaceBasis {
    ComplexMatrix basis;    // M x J, orthonormal columns
    RealVector eigenvalues; // J, descending, nonnegative

    Eigen::Index antennas() const noexcept { return basis.rows(); }
    Eigen::Index dimension() const noexcept { return basis.cols(); }
};

enum class EigenSolverMethod {
    full,               // dense Hermitian eigendecomposition
    subspace_iteration, // block power iteration with Rayleigh-Ritz, O(J M^2) per sweep
};

struct SubspaceIterationOptions {
    int max_iterations = 20000;
    double tolerance = 1e-14; // on the change of the iterated subspace
    std::uint64_t seed = 0x5eed;
};

// (1/N) Y Y^H, symmetrized.
ComplexMatrix sample_covariance(const ComplexMatrix &observations);

// Eigenvectors of the J largest eigenvalues. When the spectrum is degenerate
// at the cut, any orthonormal basis of a valid invariant subspace may be
// returned; only the projector is unique. Subspace iteration falls back to the
// full decomposition if it does not settle within max_iterations.
SubspaceBasis dominant_eigenbasis(const ComplexMatrix &covariance, Eigen::Index j,
                                  EigenSolverMethod method = EigenSolverMethod::full,
                                  const SubspaceIterationOptions &options = {});

// P = V V^H
ComplexMatrix projector(const SubspaceBasis &basis);

// Blind subspace estimate from one coherence block. The sample covariance is
// taken over the data observations, plus the pilot observations when
// include_pilots is set.
SubspaceBasis estimate_subspace(const ComplexMatrix &pilot_observations, const ComplexMatrix &data_observations,
                                Eigen::Index j, bool include_pilots = false,
                                EigenSolverMethod method = EigenSolverMethod::full);

} // namespace semiblind
