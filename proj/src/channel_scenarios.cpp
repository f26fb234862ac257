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

#include "semiblind/channel_scenarios.hpp"

#include "semiblind/errors.hpp"
#include "semiblind/parallel.hpp"

#include <cmath>
#include <numeric>

namespace semiblind {

void ArrayGeometry::validate() const
{
    require(vertical_count > 0 && horizontal_count > 0, "array geometry needs at least one element per axis");
    require(vertical_spacing > 0.0 && horizontal_spacing > 0.0, "array spacings must be strictly positive");
}

void ClusterScenario::validate() const
{
    require(cluster_count_min >= 1 && cluster_count_max >= cluster_count_min,
            "cluster count range must satisfy 1 <= min <= max");
    require(paths_per_cluster >= 1, "paths per cluster must be at least 1");
    require(angular_spread > 0.0, "angular spread must be strictly positive");
    require(azimuth.hi >= azimuth.lo && elevation.hi >= elevation.lo, "angle intervals must have lo <= hi");
    if (!cluster_power_fractions.empty())
    {
        require(static_cast<int>(cluster_power_fractions.size()) >= cluster_count_max,
                "cluster_power_fractions must list a power for every possible cluster");
        for (double p : cluster_power_fractions)
            require(p > 0.0 && std::isfinite(p), "cluster power fractions must be positive");
    }
}

double ChannelDataset::mean_power() const
{
    if (count() == 0)
        return 0.0;
    return samples.colwise().squaredNorm().sum() / static_cast<double>(count());
}

ComplexVector steering_vector(const ArrayGeometry &geometry, double azimuth, double elevation)
{
    const double vertical_step = geometry.vertical_spacing * std::sin(elevation);
    const double horizontal_step = geometry.horizontal_spacing * std::cos(elevation) * std::sin(azimuth);

    ComplexVector a(geometry.antennas());
    for (int v = 0; v < geometry.vertical_count; ++v)
        for (int h = 0; h < geometry.horizontal_count; ++h)
        {
            const double phase = 2.0 * kPi * (v * vertical_step + h * horizontal_step);
            a(v * geometry.horizontal_count + h) = std::polar(1.0, phase);
        }
    return a;
}

ComplexVector sample_user_channel(const ClusterScenario &scenario, const ArrayGeometry &geometry,
                                  RandomStream &rng)
{
    const int clusters = scenario.cluster_count_min +
                         static_cast<int>(rng.uniform_index(
                             static_cast<std::uint64_t>(scenario.cluster_count_max - scenario.cluster_count_min + 1)));

    std::vector<double> power(clusters);
    for (int c = 0; c < clusters; ++c)
        power[c] = scenario.cluster_power_fractions.empty()
                       ? -std::log(1.0 - rng.uniform())
                       : scenario.cluster_power_fractions[c];
    const double total = std::accumulate(power.begin(), power.end(), 0.0);
    for (double &p : power)
        p /= total;

    ComplexVector h = ComplexVector::Zero(geometry.antennas());
    for (int c = 0; c < clusters; ++c)
    {
        const double center_az = rng.uniform(scenario.azimuth.lo, scenario.azimuth.hi);
        const double center_el = rng.uniform(scenario.elevation.lo, scenario.elevation.hi);
        const double path_power = power[c] / scenario.paths_per_cluster;
        for (int p = 0; p < scenario.paths_per_cluster; ++p)
        {
            const double az = rng.normal(center_az, scenario.angular_spread);
            const double el = rng.normal(center_el, scenario.angular_spread);
            Complex gain;
            if (scenario.gain_model == PathGainModel::unit_modulus)
                gain = std::polar(std::sqrt(path_power), rng.uniform(0.0, 2.0 * kPi));
            else
                gain = rng.complex_normal(path_power);
            h += gain * steering_vector(geometry, az, el);
        }
    }
    return h;
}

ChannelDataset generate_dataset(const ClusterScenario &scenario, const ArrayGeometry &geometry,
                                std::int64_t count, double normalization, std::uint64_t seed,
                                unsigned threads)
{
    require(count > 0, "dataset sample count must be positive");
    require(normalization > 0.0 && std::isfinite(normalization), "normalization target must be positive");
    geometry.validate();
    scenario.validate();

    ChannelDataset dataset;
    dataset.antennas = geometry.antennas();
    dataset.normalization = normalization;
    dataset.samples.resize(geometry.antennas(), count);

    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t t) {
        RandomStream rng(derive_seed(seed, {t}));
        dataset.samples.col(static_cast<Eigen::Index>(t)) = sample_user_channel(scenario, geometry, rng);
    });

    const double power = dataset.mean_power();
    if (!(power > 0.0) || !std::isfinite(power))
        fail(ErrorCode::numerical_error, "generated channels have zero or non-finite power");
    dataset.samples *= std::sqrt(normalization / power);
    return dataset;
}

ComplexMatrix dataset_covariance(const ChannelDataset &dataset)
{
    require(dataset.count() > 0, "covariance of an empty dataset");
    ComplexMatrix c = dataset.samples * dataset.samples.adjoint() / static_cast<double>(dataset.count());
    return hermitian_part(c);
}

} // namespace semiblind
