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

#include <cstddef>
#include <functional>

namespace semiblind {

// Number of worker threads used by library routines that accept a thread
// count of 0 ("use the default"). Starts at 1.
void set_default_threads(unsigned threads);
unsigned default_threads();

// Runs body(i) for i in [0, count) on up to `threads` threads with a static
// block partition. Callers write results into per-index slots and reduce them
// serially afterwards, so output never depends on the thread count.
// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body);

} // namespace semiblind
