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

#include <stdexcept>
#include <string>
#include <string_view>

namespace semiblind {

enum class ErrorCode {
    invalid_argument,
    format_error,       // malformed header or magic bytes
    truncated_payload,  // header promises more data than the file holds
    dimension_mismatch,
    numerical_error,    // factorization failure, non-PD input
    invalid_state,      // e.g. filters built for a different noise variance
    io_error,
    config_error,
};

std::string_view to_string(ErrorCode code);

// Process exit status used by the CLI for each error code.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string &message);

inline void require(bool condition, const std::string &message)
{
    if (!condition)
        fail(ErrorCode::invalid_argument, message);
}

} // namespace semiblind
