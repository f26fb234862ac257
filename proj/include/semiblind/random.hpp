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
#include <initializer_list>
#include <random>

namespace semiblind {

using RandomEngine = std::mt19937_64;

// Deterministic seed derivation. Mixing a master seed with a sequence of
// indices (sample number, trial number, ...) gives every unit of work its own
// stream, so results do not depend on the order or thread that consumes them.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    RandomStream split(std::uint64_t index) const { return RandomStream(derive_seed(seed_, {index})); }
    std::uint64_t seed() const noexcept { return seed_; }

    double uniform(double lo = 0.0, double hi = 1.0);
    double normal(double mean = 0.0, double stddev = 1.0);
    std::uint64_t uniform_index(std::uint64_t count); // in [0, count)

    // Circularly-symmetric complex Gaussian CN(0, variance).
    Complex complex_normal(double variance = 1.0);
    ComplexMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

    RandomEngine &engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    RandomEngine engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace semiblind
