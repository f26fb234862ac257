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

#include "semiblind/random.hpp"
#include "semiblind/types.hpp"

#include <cstdint>
#include <vector>

namespace semiblind {

// Uniform rectangular array. Element (v, h) sits at row v, column h and is
// stored at index v * horizontal_count + h. Spacings are in wavelengths.
struct ArrayGeometry {
    int vertical_count = 4;
    int horizontal_count = 16;
    double vertical_spacing = 1.0;
    double horizontal_spacing = 0.5;

    int antennas() const noexcept { return vertical_count * horizontal_count; }
    void validate() const;

    bool operator==(const ArrayGeometry &) const = default;
};

enum class PathGainModel {
    rayleigh,     // CN(0, cluster power / paths)
    unit_modulus, // fixed magnitude sqrt(cluster power / paths), uniform phase
};

struct AngleInterval {
    double lo = 0.0; // radians
    double hi = 0.0;
};

// Cluster-based generative model for user channels. Every user sees between
// cluster_count_min and cluster_count_max clusters; each cluster contributes
// paths_per_cluster plane waves whose angles scatter around the cluster
// center with a Gaussian spread.
struct ClusterScenario {
    int cluster_count_min = 1;
    int cluster_count_max = 3;
    int paths_per_cluster = 20;
    double angular_spread = 5.0 * kPi / 180.0;
    AngleInterval azimuth{-60.0 * kPi / 180.0, 60.0 * kPi / 180.0};
    AngleInterval elevation{-15.0 * kPi / 180.0, 15.0 * kPi / 180.0};
    // Relative power of cluster c. Empty: drawn per user from Exp(1). The
    // fractions in use are renormalized over the drawn cluster count.
    std::vector<double> cluster_power_fractions;
    PathGainModel gain_model = PathGainModel::rayleigh;

    void validate() const;
};

struct ChannelDataset {
    int antennas = 0;
    ComplexMatrix samples; // antennas x count, one channel per column
    double normalization = 0.0;

    Eigen::Index count() const noexcept { return samples.cols(); }
    auto sample(Eigen::Index t) const { return samples.col(t); }
    double mean_power() const;
};

ComplexVector steering_vector(const ArrayGeometry &geometry, double azimuth, double elevation);

ComplexVector sample_user_channel(const ClusterScenario &scenario, const ArrayGeometry &geometry,
                                  RandomStream &rng);

// Sample t is drawn from the stream derive_seed(seed, {t}), so the output is
// identical for any thread count. The dataset is rescaled so that its
// empirical mean squared norm equals `normalization`.
ChannelDataset generate_dataset(const ClusterScenario &scenario, const ArrayGeometry &geometry,
                                std::int64_t count, double normalization, std::uint64_t seed,
                                unsigned threads = 0);

// C = (1/T) sum_t h_t h_t^H over all samples.
ComplexMatrix dataset_covariance(const ChannelDataset &dataset);

} // namespace semiblind
