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

// Little-endian encoding helpers shared by the CVD1 and GMM1 containers.

#include "semiblind/errors.hpp"
#include "semiblind/types.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace semiblind::detail {

class ByteWriter {
public:
    void bytes(const char *data, std::size_t n) { buffer_.insert(buffer_.end(), data, data + n); }

    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i)
            buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void c128(Complex z)
    {
        f64(z.real());
        f64(z.imag());
    }

    void save(const std::filesystem::path &path) const
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
        out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        if (!out)
            fail(ErrorCode::io_error, "write to '" + path.string() + "' failed");
    }

private:
    std::vector<char> buffer_;
};

class ByteReader {
public:
    ByteReader(const std::filesystem::path &path, std::string what) : what_(std::move(what))
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail(ErrorCode::io_error, "cannot open " + what_ + " file '" + path.string() + "'");
        buffer_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::size_t remaining() const noexcept { return buffer_.size() - pos_; }

    void expect_magic(const char (&magic)[5])
    {
        if (remaining() < 4 || std::memcmp(buffer_.data() + pos_, magic, 4) != 0)
            fail(ErrorCode::format_error, what_ + ": bad magic bytes, expected '" + std::string(magic) + "'");
        pos_ += 4;
    }

    // For header fields: running out here means the header itself is malformed.
    std::uint32_t header_u32()
    {
        need_header(4);
        return static_cast<std::uint32_t>(raw(4));
    }

    std::uint64_t header_u64()
    {
        need_header(8);
        return raw(8);
    }

    double f64() { return std::bit_cast<double>(raw(8)); }

    Complex c128()
    {
        const double re = f64();
        const double im = f64();
        return {re, im};
    }

private:
    void need_header(std::size_t n) const
    {
        if (remaining() < n)
            fail(ErrorCode::format_error, what_ + ": header is shorter than its declared layout");
    }

    std::uint64_t raw(int n)
    {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buffer_[pos_ + i])) << (8 * i);
        pos_ += n;
        return v;
    }

    std::string what_;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
};

} // namespace semiblind::detail
