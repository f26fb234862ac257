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

#include "semiblind/channel_scenarios.hpp"

#include <filesystem>
#include <optional>

namespace semiblind {

// CVD1 container:
//   "CVD1" | u32 LE antennas | u64 LE sample count |
//   count * antennas * (f64 LE real, f64 LE imag), sample-major.
// The normalization field is not stored; read_dataset recomputes it as the
// empirical mean power.
void write_dataset(const ChannelDataset &dataset, const std::filesystem::path &path);

// Throws Error with format_error (bad magic, short header, trailing bytes),
// truncated_payload, dimension_mismatch (when expected_antennas is given and
// differs) or io_error.
ChannelDataset read_dataset(const std::filesystem::path &path,
                            std::optional<int> expected_antennas = std::nullopt);

// Debug export: one sample per row, columns re_0,im_0,...,re_{M-1},im_{M-1}.
void write_dataset_csv(const ChannelDataset &dataset, const std::filesystem::path &path);

// Dump the columns of any complex matrix as a CVD1 file (e.g. a subspace basis).
void write_columns(const ComplexMatrix &columns, const std::filesystem::path &path);

} // namespace semiblind
