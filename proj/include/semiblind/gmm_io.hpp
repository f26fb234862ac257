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

#include "semiblind/cgmm.hpp"

#include <filesystem>

namespace semiblind {

// GMM1 container, little-endian:
//   "GMM1" | u32 M | u32 K | K f64 weights | K*M complex128 means |
//   K*M*M complex128 covariances (column-major per component).
void write_model(const GmmModel &model, const std::filesystem::path &path);
GmmModel read_model(const std::filesystem::path &path);

// CSV with header "iteration,log_likelihood"; iterations count from 1.
void write_fit_report_csv(const FitReport &report, const std::filesystem::path &path);

} // namespace semiblind
