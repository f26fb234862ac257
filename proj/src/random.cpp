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

#include "semiblind/random.hpp"

#include <cmath>

namespace semiblind {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = splitmix64(master);
    for (auto index : path)
        s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return s;
}

RandomStream::RandomStream(std::uint64_t seed)
    : seed_(seed), engine_(splitmix64(seed))
{
}

double RandomStream::uniform(double lo, double hi)
{
    // 53 random mantissa bits, independent of the standard library's
    // uniform_real_distribution implementation.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double RandomStream::normal(double mean, double stddev)
{
    return mean + stddev * normal_(engine_);
}

std::uint64_t RandomStream::uniform_index(std::uint64_t count)
{
    std::uniform_int_distribution<std::uint64_t> dist(0, count - 1);
    return dist(engine_);
}

Complex RandomStream::complex_normal(double variance)
{
    const double s = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

ComplexMatrix RandomStream::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance)
{
    ComplexMatrix out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            out(r, c) = complex_normal(variance);
    return out;
}

} // namespace semiblind
