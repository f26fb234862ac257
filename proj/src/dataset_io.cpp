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

#include "semiblind/dataset_io.hpp"

#include "binary_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

namespace semiblind {

namespace {

void write_cvd1(const ComplexMatrix &columns, const std::filesystem::path &path)
{
    detail::ByteWriter w;
    w.bytes("CVD1", 4);
    w.u32(static_cast<std::uint32_t>(columns.rows()));
    w.u64(static_cast<std::uint64_t>(columns.cols()));
    for (Eigen::Index t = 0; t < columns.cols(); ++t)
        for (Eigen::Index m = 0; m < columns.rows(); ++m)
            w.c128(columns(m, t));
    w.save(path);
}

} // namespace

void write_dataset(const ChannelDataset &dataset, const std::filesystem::path &path)
{
    require(dataset.samples.rows() == dataset.antennas, "dataset antenna count disagrees with sample length");
    write_cvd1(dataset.samples, path);
}

void write_columns(const ComplexMatrix &columns, const std::filesystem::path &path)
{
    write_cvd1(columns, path);
}

ChannelDataset read_dataset(const std::filesystem::path &path, std::optional<int> expected_antennas)
{
    detail::ByteReader r(path, "CVD1");
    r.expect_magic("CVD1");
    const std::uint32_t antennas = r.header_u32();
    const std::uint64_t count = r.header_u64();
    if (antennas == 0)
        fail(ErrorCode::format_error, "CVD1: header declares zero antennas");
    if (expected_antennas && static_cast<int>(antennas) != *expected_antennas)
        fail(ErrorCode::dimension_mismatch, "CVD1: file has " + std::to_string(antennas) + " antennas, expected " +
                                                std::to_string(*expected_antennas));

    const std::uint64_t entry_bytes = 16;
    const std::uint64_t available = r.remaining() / entry_bytes / antennas;
    if (count > available)
        fail(ErrorCode::truncated_payload, "CVD1: header declares " + std::to_string(count) +
                                               " samples but payload holds " + std::to_string(available));
    if (r.remaining() != count * antennas * entry_bytes)
        fail(ErrorCode::format_error, "CVD1: trailing bytes after the declared payload");

    ChannelDataset dataset;
    dataset.antennas = static_cast<int>(antennas);
    dataset.samples.resize(antennas, static_cast<Eigen::Index>(count));
    for (Eigen::Index t = 0; t < dataset.samples.cols(); ++t)
        for (Eigen::Index m = 0; m < dataset.samples.rows(); ++m)
            dataset.samples(m, t) = r.c128();
    dataset.normalization = dataset.mean_power();
    return dataset;
}

void write_dataset_csv(const ChannelDataset &dataset, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (int m = 0; m < dataset.antennas; ++m)
        out << (m ? "," : "") << "re_" << m << ",im_" << m;
    out << '\n';
    for (Eigen::Index t = 0; t < dataset.count(); ++t)
    {
        for (int m = 0; m < dataset.antennas; ++m)
            out << (m ? "," : "") << dataset.samples(m, t).real() << ',' << dataset.samples(m, t).imag();
        out << '\n';
    }
}

} // namespace semiblind
