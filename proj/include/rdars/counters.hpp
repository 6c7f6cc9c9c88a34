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

#ifndef RDARS_COUNTERS_HPP
#define RDARS_COUNTERS_HPP

#include <cstdint>

namespace rdars
{

/// Operation tallies for one solve. Each thread owns its own copy; a solver
/// resets it on entry and snapshots it into the trace on exit.
struct OpCounters
{
    std::int64_t linear_solves = 0;      // right-hand sides solved through a factorisation
    std::int64_t factorizations = 0;     // Cholesky factorisations
    std::int64_t matvecs = 0;            // dense matrix-vector products in iterative kernels
    std::int64_t power_method_iters = 0; // eigenvalue power-method iterations
    std::int64_t eig_calls = 0;          // max-eigenvalue evaluations
    std::int64_t inner_pi_steps = 0;     // phase power-iteration steps
};

inline OpCounters &counters()
{
    thread_local OpCounters c;
    return c;
}

inline void reset_counters() { counters() = OpCounters{}; }

} // namespace rdars

#endif
