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

// Wall-clock timings of the OpenMP kernels against their serial references.
// Usage: bench_kernels [reps]

#include "sbm/cycles.hpp"
#include "sbm/detection.hpp"
#include "sbm/graph.hpp"
#include "sbm/qfunctional.hpp"
#include "sbm/second_moment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace sbm;

namespace {

double best_of(int reps, const std::function<void()>& fn)
{
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void report(const char* name, int reps, const std::function<void()>& parallel, const std::function<void()>& serial)
{
    const double p = best_of(reps, parallel);
    const double s = best_of(reps, serial);
    std::printf("%-28s %10.4f %10.4f %8.2fx\n", name, s, p, s / p);
}

volatile double sink = 0.0;

} // namespace

int main(int argc, char** argv)
{
    const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::printf("threads %d, best of %d\n", omp_get_max_threads(), reps);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "openmp s", "speedup");

    const auto cyc_params = build_symmetric(2, 3.0, 0.6);
    const Graph g = sample_sbm(cyc_params, 20000, 1).graph;
    report("cycles n=20000 m<=7", reps, [&] { sink = double(count_cycles(g, 7).back().count); },
           [&] { sink = double(count_cycles_serial(g, 7).back().count); });

    const auto post_params = build_symmetric(2, 4.0, 0.7);
    const Graph small = sample_sbm(post_params, 18, 2).graph;
    report("posterior n=18 q=2", reps, [&] { sink = exact_posteriors(small, post_params, true)(1, 0); },
           [&] { sink = exact_posteriors_serial(small, post_params, true)(1, 0); });

    const auto sm_params = build_symmetric(3, 2.0, 0.3);
    report("second moment q=3 n=24", reps, [&] { sink = exact_second_moment(sm_params, 24).exact_value; },
           [&] { sink = exact_second_moment_serial(sm_params, 24).exact_value; });

    const auto q_params = build_symmetric(5, 0.9 * 1.0 / 0.09, 0.3);
    OptimizerOptions opts;
    opts.restarts = 32;
    report("Q q=5 32 restarts", reps,
           [&] { sink = q_value(q_params.pi(), scaled_connectivity(q_params), opts).value; },
           [&] { sink = q_value_serial(q_params.pi(), scaled_connectivity(q_params), opts).value; });
    return 0;
}
