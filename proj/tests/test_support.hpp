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
#include "semiblind/random.hpp"
#include "semiblind/subspace.hpp"

#include <cstring>
#include <filesystem>
#include <string>

namespace semiblind::testing {

// Random Hermitian PD matrix with eigenvalues spread over [floor, floor + spread].
inline ComplexMatrix random_pd(Eigen::Index m, RandomStream &rng, double floor = 0.1, double spread = 2.0)
{
    const ComplexMatrix a = rng.complex_normal_matrix(m, m);
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    const ComplexMatrix q = qr.householderQ();
    RealVector ev(m);
    for (Eigen::Index i = 0; i < m; ++i)
        ev(i) = floor + spread * rng.uniform();
    return hermitian_part(q * ev.cast<Complex>().asDiagonal() * q.adjoint());
}

inline SubspaceBasis random_basis(Eigen::Index m, Eigen::Index j, RandomStream &rng)
{
    Eigen::HouseholderQR<ComplexMatrix> qr(rng.complex_normal_matrix(m, j));
    SubspaceBasis b;
    b.basis = qr.householderQ() * ComplexMatrix::Identity(m, j);
    b.eigenvalues = RealVector::Ones(j);
    return b;
}

inline GmmModel random_model(Eigen::Index m, int k, RandomStream &rng, double mean_scale = 0.5)
{
    GmmModel model;
    model.weights.resize(k);
    for (int c = 0; c < k; ++c)
        model.weights(c) = 0.2 + rng.uniform();
    model.weights /= model.weights.sum();
    for (int c = 0; c < k; ++c)
    {
        model.means.push_back(rng.complex_normal_matrix(m, 1, mean_scale).col(0));
        model.covariances.push_back(random_pd(m, rng));
    }
    return model;
}

// Draws columns from the mixture.
inline ComplexMatrix sample_model(const GmmModel &model, Eigen::Index count, RandomStream &rng)
{
    const Eigen::Index m = model.dimension();
    std::vector<ComplexMatrix> lower;
    for (const auto &c : model.covariances)
        lower.push_back(Eigen::LLT<ComplexMatrix>(c).matrixL());
    ComplexMatrix out(m, count);
    for (Eigen::Index t = 0; t < count; ++t)
    {
        double u = rng.uniform();
        int k = 0;
        while (k + 1 < model.components() && u > model.weights(k))
            u -= model.weights(k++);
        out.col(t) = model.means[k] + lower[k] * rng.complex_normal_matrix(m, 1).col(0);
    }
    return out;
}

inline double relative_error(const ComplexVector &a, const ComplexVector &b)
{
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string &name)
{
    auto dir = std::filesystem::temp_directory_path() / ("semiblind_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace semiblind::testing
