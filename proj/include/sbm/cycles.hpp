/*
Copyright 2026 The sbmthresh Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "sbm/graph.hpp"
#include "sbm/model.hpp"

#include <cstdint>
#include <vector>

namespace sbm {

struct CycleStats {
    int m = 3;
    std::uint64_t count = 0;
    double mu_Q = 0.0; ///< d^m / (2m)
    double mu_P = 0.0; ///< d^m tr(T^m) / (2m)
};

inline constexpr int kMinCycleLength = 3;
inline constexpr int kMaxCycleLength = 12;

/// Exact simple-cycle counts for m = 3..m_max. Each cycle is found once from
/// its smallest vertex, with orientation fixed by requiring the second vertex
/// to be smaller than the last. Poisson means are left zero; see
/// cycle_stats() to attach them.
std::vector<CycleStats> count_cycles(const Graph& g, int m_max);

/// Reference implementation: same enumeration, single thread.
std::vector<CycleStats> count_cycles_serial(const Graph& g, int m_max);

/// Fill mu_Q and mu_P for the given model.
void attach_poisson_means(std::vector<CycleStats>& stats, const ModelParams& params);

struct CycleCheckRow {
    int m = 3;
    double mean_P = 0.0, se_P = 0.0, target_P = 0.0;
    double mean_Q = 0.0, se_Q = 0.0, target_Q = 0.0;
};

/// Monte Carlo: reps graphs from each of G(n, M/n, pi) and G(n, d/n), cycle
/// counts averaged per length. Replica r uses seed derive_seed(seed, r); the
/// result does not depend on the thread count.
std::vector<CycleCheckRow> cycle_poisson_check(const ModelParams& params, std::size_t n, int m_max,
                                               int reps, std::uint64_t seed);

} // namespace sbm
