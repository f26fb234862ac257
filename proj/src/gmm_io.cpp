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

#include "semiblind/gmm_io.hpp"

#include "binary_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

namespace semiblind {

void write_model(const GmmModel &model, const std::filesystem::path &path)
{
    model.validate(1e-9);
    const int m = model.dimension();
    const int k = model.components();

    detail::ByteWriter w;
    w.bytes("GMM1", 4);
    w.u32(static_cast<std::uint32_t>(m));
    w.u32(static_cast<std::uint32_t>(k));
    for (int c = 0; c < k; ++c)
        w.f64(model.weights(c));
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < m; ++i)
            w.c128(model.means[c](i));
    for (int c = 0; c < k; ++c)
        for (int col = 0; col < m; ++col)
            for (int row = 0; row < m; ++row)
                w.c128(model.covariances[c](row, col));
    w.save(path);
}

GmmModel read_model(const std::filesystem::path &path)
{
    detail::ByteReader r(path, "GMM1");
    r.expect_magic("GMM1");
    const std::uint64_t m = r.header_u32();
    const std::uint64_t k = r.header_u32();
    if (m == 0 || k == 0)
        fail(ErrorCode::format_error, "GMM1: header declares an empty model");

    const std::uint64_t expected = 8 * k + 16 * k * m + 16 * k * m * m;
    if (r.remaining() < expected)
        fail(ErrorCode::truncated_payload, "GMM1: payload holds " + std::to_string(r.remaining()) +
                                               " bytes, header requires " + std::to_string(expected));
    if (r.remaining() > expected)
        fail(ErrorCode::format_error, "GMM1: trailing bytes after the declared payload");

    const auto mi = static_cast<Eigen::Index>(m);
    GmmModel model;
    model.weights.resize(static_cast<Eigen::Index>(k));
    for (std::uint64_t c = 0; c < k; ++c)
        model.weights(static_cast<Eigen::Index>(c)) = r.f64();
    model.means.assign(k, ComplexVector(mi));
    for (auto &mean : model.means)
        for (Eigen::Index i = 0; i < mi; ++i)
            mean(i) = r.c128();
    model.covariances.assign(k, ComplexMatrix(mi, mi));
    for (auto &cov : model.covariances)
        for (Eigen::Index col = 0; col < mi; ++col)
            for (Eigen::Index row = 0; row < mi; ++row)
                cov(row, col) = r.c128();

    try
    {
        model.validate(1e-9);
    }
    catch (const Error &e)
    {
        fail(ErrorCode::format_error, std::string("GMM1: ") + e.what());
    }
    return model;
}

void write_fit_report_csv(const FitReport &report, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "iteration,log_likelihood\n";
    for (std::size_t i = 0; i < report.log_likelihood.size(); ++i)
        out << (i + 1) << ',' << report.log_likelihood[i] << '\n';
}

} // namespace semiblind
