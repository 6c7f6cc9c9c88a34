// SPDX-License-Identifier: Apache-2.0
//
// rdars-pwm: joint beamforming and mode switching for RDARS-aided MIMO downlinks
// Copyright (C) 2026 The rdars-pwm authors
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

#ifndef RDARS_PARALLEL_HPP
#define RDARS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rdars
{

/// Worker count: RDARS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
inline int worker_count()
{
    if (const char *env = std::getenv("RDARS_THREADS"))
    {
        try
        {
            const int n = std::stoi(env);
            if (n > 0)
                return n;
        }
        catch (const std::exception &)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on a pool of workers; results land at their
/// index so the outcome does not depend on scheduling. The first exception
/// (lowest index) is rethrown after all workers stop.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn &&fn, int workers = worker_count())
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                out[i] = fn(i);
            }
            catch (...)
            {
                errs[i] = std::current_exception();
            }
        }
    };
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
    if (w <= 1)
        work();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < w; ++t)
            pool.emplace_back(work);
        for (auto &t : pool)
            t.join();
    }
    for (auto &e : errs)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace rdars

#endif
