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

#include "semiblind/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace semiblind {

namespace {
std::atomic<unsigned> g_default_threads{1};
}

void set_default_threads(unsigned threads)
{
    g_default_threads = std::max(1u, threads);
}

unsigned default_threads()
{
    return g_default_threads;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body)
{
    if (threads == 0)
        threads = default_threads();
    const std::size_t workers = std::min<std::size_t>(threads, count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t per = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        const std::size_t begin = w * per;
        const std::size_t end = std::min(count, begin + per);
        pool.emplace_back([&, begin, end] {
            try
            {
                for (std::size_t i = begin; i < end; ++i)
                    body(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace semiblind
