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

#include <Eigen/Dense>

#include <complex>

namespace semiblind {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd; // column-major
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Largest elementwise deviation of a square matrix from its conjugate transpose.
inline double hermitian_defect(const ComplexMatrix &a)
{
    if (a.size() == 0)
        return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline ComplexMatrix hermitian_part(const ComplexMatrix &a)
{
    return (a + a.adjoint()) * 0.5;
}

} // namespace semiblind
