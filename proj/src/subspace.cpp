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

#include "semiblind/subspace.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/random.hpp"

#include <algorithm>
#include <string>

namespace semiblind {

ComplexMatrix sample_covariance(const ComplexMatrix &observations)
{
    require(observations.cols() >= 1, "sample covariance needs at least one observation");
    ComplexMatrix c = observations * observations.adjoint() / static_cast<double>(observations.cols());
    return hermitian_part(c);
}

namespace {

SubspaceBasis full_decomposition(const ComplexMatrix &covariance, Eigen::Index j)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(covariance);
    if (solver.info() != Eigen::Success)
        fail(ErrorCode::numerical_error, "Hermitian eigendecomposition failed");
    const Eigen::Index m = covariance.rows();

    // Eigen sorts ascending; take the last J columns in reverse.
    SubspaceBasis out;
    out.basis.resize(m, j);
    out.eigenvalues.resize(j);
    for (Eigen::Index i = 0; i < j; ++i)
    {
        out.basis.col(i) = solver.eigenvectors().col(m - 1 - i);
        out.eigenvalues(i) = std::max(0.0, solver.eigenvalues()(m - 1 - i));
    }
    return out;
}

ComplexMatrix orthonormalize(const ComplexMatrix &a)
{
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    return qr.householderQ() * ComplexMatrix::Identity(a.rows(), a.cols());
}

} // namespace

SubspaceBasis dominant_eigenbasis(const ComplexMatrix &covariance, Eigen::Index j, EigenSolverMethod method,
                                  const SubspaceIterationOptions &options)
{
    const Eigen::Index m = covariance.rows();
    require(covariance.cols() == m && m >= 1, "covariance must be a non-empty square matrix");
    require(j >= 1 && j <= m, "subspace dimension J must satisfy 1 <= J <= M (J = " + std::to_string(j) + ")");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    require(hermitian_defect(covariance) <= 1e-10 * scale, "covariance is not Hermitian");

    const ComplexMatrix c = hermitian_part(covariance);
    if (method == EigenSolverMethod::full || j == m)
        return full_decomposition(c, j);

    RandomStream rng(options.seed);
    ComplexMatrix q = orthonormalize(rng.complex_normal_matrix(m, j));
    bool settled = false;
    for (int iter = 0; iter < options.max_iterations; ++iter)
    {
        ComplexMatrix next = orthonormalize(c * q);
        // Component of the new basis outside the old subspace.
        const double change = (next - q * (q.adjoint() * next)).norm();
        q = std::move(next);
        if (change <= options.tolerance * std::sqrt(static_cast<double>(j)))
        {
            settled = true;
            break;
        }
    }
    if (!settled)
        return full_decomposition(c, j);

    // Rayleigh-Ritz: rotate into eigenvectors of the projected matrix.
    const ComplexMatrix reduced = hermitian_part(q.adjoint() * c * q);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> small(reduced);
    SubspaceBasis out;
    out.basis.resize(m, j);
    out.eigenvalues.resize(j);
    const ComplexMatrix rotated = q * small.eigenvectors();
    for (Eigen::Index i = 0; i < j; ++i)
    {
        out.basis.col(i) = rotated.col(j - 1 - i);
        out.eigenvalues(i) = std::max(0.0, small.eigenvalues()(j - 1 - i));
    }
    return out;
}

ComplexMatrix projector(const SubspaceBasis &basis)
{
    return hermitian_part(basis.basis * basis.basis.adjoint());
}

SubspaceBasis estimate_subspace(const ComplexMatrix &pilot_observations, const ComplexMatrix &data_observations,
                                Eigen::Index j, bool include_pilots, EigenSolverMethod method)
{
    require(data_observations.cols() >= 1, "subspace estimation needs at least one data observation");
    if (!include_pilots || pilot_observations.cols() == 0)
        return dominant_eigenbasis(sample_covariance(data_observations), j, method);

    if (pilot_observations.rows() != data_observations.rows())
        fail(ErrorCode::dimension_mismatch, "pilot and data observations have different antenna counts");
    ComplexMatrix all(data_observations.rows(), pilot_observations.cols() + data_observations.cols());
    all << pilot_observations, data_observations;
    return dominant_eigenbasis(sample_covariance(all), j, method);
}

} // namespace semiblind
