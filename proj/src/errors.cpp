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

#include "semiblind/errors.hpp"

namespace semiblind {

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::format_error: return "format_error";
    case ErrorCode::truncated_payload: return "truncated_payload";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::numerical_error: return "numerical_error";
    case ErrorCode::invalid_state: return "invalid_state";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::config_error: return "config_error";
    }
    return "unknown";
}

int exit_status(ErrorCode code)
{
    return 2 + static_cast<int>(code);
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(message), code_(code)
{
}

void fail(ErrorCode code, const std::string &message)
{
    throw Error(code, message);
}

} // namespace semiblind
