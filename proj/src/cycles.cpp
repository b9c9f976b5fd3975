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

#include "sbm/cycles.hpp"

#include "sbm/error.hpp"
#include "sbm/rng.hpp"

#include <cmath>

namespace sbm {

namespace {

void check_range(int m_max)
{
    require(m_max >= kMinCycleLength && m_max <= kMaxCycleLength,
            "m_max must lie in [3, 12]");
}

// Count cycles whose smallest vertex is `start`. counts[len] accumulates.
struct CycleWalker {
    const Graph& g;
    int m_max;
    std::vector<std::uint64_t>& counts;
    std::vector<Vertex> path;
    std::vector<char> on_path;

    void from(Vertex start)
    {
        path.assign(1, start);
        on_path[start] = 1;
        extend(start);
        on_path[start] = 0;
    }

    void extend(Vertex start)
    {
        const Vertex tail = path.back();
        const auto len = static_cast<int>(path.size());
        for (Vertex w : g.neighbors(tail)) {
            if (w == start) {
                // Closing edge; orientation canonical when path[1] < path.back().
                if (len >= kMinCycleLength && path[1] < tail) ++counts[len];
                continue;
            }
            if (w < start || on_path[w] || len >= m_max) continue;
            path.push_back(w);
            on_path[w] = 1;
            extend(start);
            on_path[w] = 0;
            path.pop_back();
        }
    }
};

std::vector<CycleStats> to_stats(const std::vector<std::uint64_t>& counts, int m_max)
{
    std::vector<CycleStats> out;
    for (int m = kMinCycleLength; m <= m_max; ++m) out.push_back({m, counts[m], 0.0, 0.0});
    return out;
}

} // namespace

std::vector<CycleStats> count_cycles_serial(const Graph& g, int m_max)
{
    check_range(m_max);
    std::vector<std::uint64_t> counts(m_max + 1, 0);
    CycleWalker walker{g, m_max, counts, {}, std::vector<char>(g.n(), 0)};
    for (Vertex s = 0; s < g.n(); ++s) walker.from(s);
    return to_stats(counts, m_max);
}

std::vector<CycleStats> count_cycles(const Graph& g, int m_max)
{
    check_range(m_max);
    std::vector<std::uint64_t> total(m_max + 1, 0);
    const auto n = static_cast<std::int64_t>(g.n());
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(m_max + 1, 0);
        CycleWalker walker{g, m_max, local, {}, std::vector<char>(g.n(), 0)};
#pragma omp for schedule(dynamic, 64) nowait
        for (std::int64_t s = 0; s < n; ++s) walker.from(static_cast<Vertex>(s));
#pragma omp critical
        for (int m = 0; m <= m_max; ++m) total[m] += local[m];
    }
    return to_stats(total, m_max);
}

void attach_poisson_means(std::vector<CycleStats>& stats, const ModelParams& params)
{
    for (auto& s : stats) {
        const double base = std::pow(params.d(), s.m) / (2.0 * s.m);
        s.mu_Q = base;
        s.mu_P = base * trace_power(params, s.m);
    }
}

std::vector<CycleCheckRow> cycle_poisson_check(const ModelParams& params, std::size_t n, int m_max,
                                               int reps, std::uint64_t seed)
{
    check_range(m_max);
    require(reps >= 30, "cycle_poisson_check needs reps >= 30");
    const int lengths = m_max - kMinCycleLength + 1;
    // counts[r][model][m]
    std::vector<double> counts(static_cast<std::size_t>(reps) * 2 * lengths, 0.0);

#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
        const auto planted = sample_sbm(params, n, derive_seed(rs, 0)).graph;
        const auto null = sample_er(n, params.d(), derive_seed(rs, 1));
        const auto cp = count_cycles_serial(planted, m_max);
        const auto cq = count_cycles_serial(null, m_max);
        for (int k = 0; k < lengths; ++k) {
            counts[(static_cast<std::size_t>(r) * 2 + 0) * lengths + k] = static_cast<double>(cp[k].count);
            counts[(static_cast<std::size_t>(r) * 2 + 1) * lengths + k] = static_cast<double>(cq[k].count);
        }
    }

    std::vector<CycleCheckRow> rows;
    for (int k = 0; k < lengths; ++k) {
        CycleCheckRow row;
        row.m = k + kMinCycleLength;
        double stat[2][2] = {{0, 0}, {0, 0}}; // [model][sum, sumsq]
        for (int r = 0; r < reps; ++r)
            for (int model = 0; model < 2; ++model) {
                const double x = counts[(static_cast<std::size_t>(r) * 2 + model) * lengths + k];
                stat[model][0] += x;
                stat[model][1] += x * x;
            }
        auto mean_se = [&](int model, double& mean, double& se) {
            mean = stat[model][0] / reps;
            const double var = std::max(0.0, (stat[model][1] - reps * mean * mean) / (reps - 1));
            se = std::sqrt(var / reps);
        };
        mean_se(0, row.mean_P, row.se_P);
        mean_se(1, row.mean_Q, row.se_Q);
        row.target_Q = std::pow(params.d(), row.m) / (2.0 * row.m);
        row.target_P = row.target_Q * trace_power(params, row.m);
        rows.push_back(row);
    }
    return rows;
}

} // namespace sbm
