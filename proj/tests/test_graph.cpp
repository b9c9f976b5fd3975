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

#include "oracles.hpp"

#include "sbm/cycles.hpp"
#include "sbm/error.hpp"
#include "sbm/graph.hpp"
#include "sbm/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace sbm;
using doctest::Approx;

namespace {

Graph complete_graph(std::size_t n)
{
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph(n, e);
}

Graph petersen()
{
    std::vector<Edge> e;
    for (Vertex i = 0; i < 5; ++i) {
        e.emplace_back(i, (i + 1) % 5);
        e.emplace_back(i, i + 5);
        e.emplace_back(i + 5, (i + 2) % 5 + 5);
    }
    return Graph(10, e);
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        worst = std::max(worst, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return worst;
}

} // namespace

TEST_CASE("graph construction drops loops and duplicates")
{
    Graph g(4, {{0, 1}, {1, 0}, {2, 2}, {3, 1}});
    CHECK(g.num_edges() == 2);
    CHECK(g.has_edge(1, 0));
    CHECK(g.has_edge(1, 3));
    CHECK_FALSE(g.has_edge(2, 2));
    CHECK(g.degree(1) == 2);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), ValidationError);
}

TEST_CASE("edge list and labeling round trip")
{
    const auto s = sample_sbm(build_symmetric(3, 4.0, 0.3), 200, 11);
    std::stringstream ss;
    write_edge_list(ss, s.graph);
    CHECK(read_edge_list(ss) == s.graph);

    std::stringstream ls;
    write_labeling(ls, s.sigma);
    CHECK(read_labeling(ls, 3).values == s.sigma.values);

    std::stringstream bad("0 1\n");
    CHECK_THROWS_AS(read_edge_list(bad), ValidationError);
}

TEST_CASE("samplers are deterministic in the seed")
{
    const auto p = build_symmetric(2, 3.0, 0.4);
    auto text = [&](std::uint64_t seed) {
        std::stringstream ss;
        write_edge_list(ss, sample_sbm(p, 500, seed).graph);
        return ss.str();
    };
    CHECK(text(5) == text(5));
    CHECK(text(5) != text(6));
    CHECK(sample_er(500, 3.0, 9) == sample_er(500, 3.0, 9));
}

TEST_CASE("sample_sbm corner cases")
{
    CHECK(sample_sbm(build_symmetric(2, 0.0, 0.3), 300, 1).graph.num_edges() == 0);
    const auto s = sample_sbm(build_symmetric(2, 3.0, 1.0), 1000, 2);
    CHECK(s.graph.num_edges() > 0);
    for (const auto& [u, v] : s.graph.edges()) CHECK(s.sigma.values[u] == s.sigma.values[v]);
    CHECK_THROWS_AS(sample_sbm(build_symmetric(2, 3.0, 1.0), 5, 1), ValidationError);
}

TEST_CASE("sample_er validation and edge count")
{
    CHECK(sample_er(100, 0.0, 1).num_edges() == 0);
    CHECK_THROWS_AS(sample_er(10, 11.0, 1), ValidationError);
    CHECK_THROWS_AS(sample_er(10, -1.0, 1), ValidationError);
    const double m = sample_er(10000, 3.0, 4).num_edges();
    CHECK(std::abs(m - 15000.0) < 4.0 * std::sqrt(15000.0));
}

TEST_CASE("mean degree and label frequencies of the planted model")
{
    const auto p = build_symmetric(2, 3.0, 0.6);
    const std::size_t n = 10000;
    double deg = 0.0, zeros = 0.0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const auto s = sample_sbm(p, n, derive_seed(77, r));
        deg += 2.0 * s.graph.num_edges() / n;
        zeros += std::count(s.sigma.values.begin(), s.sigma.values.end(), 0);
    }
    deg /= reps;
    CHECK(std::abs(deg - 3.0) < 4.0 * std::sqrt(2.0 * 3.0 / n / reps));
    const double total = double(n) * reps;
    CHECK(std::abs(zeros / total - 0.5) < 4.0 * std::sqrt(0.25 / total));
}

TEST_CASE("planted model at lambda = 0 matches the null edge-count law")
{
    const auto p = build_symmetric(3, 3.0, 0.0);
    // 20 independent tests at level 0.01; more than 3 rejections has probability below 1e-4.
    int rejections = 0;
    for (int t = 0; t < 20; ++t) {
        std::vector<double> a, b;
        for (int r = 0; r < 200; ++r) {
            a.push_back(sample_sbm(p, 2000, derive_seed(100 + t, r)).graph.num_edges());
            b.push_back(sample_er(2000, 3.0, derive_seed(200 + t, r)).num_edges());
        }
        if (ks_statistic(a, b) >= 1.628 * std::sqrt(2.0 / 200.0)) ++rejections;
    }
    CHECK(rejections <= 3);
}

TEST_CASE("fixed edge-count variant")
{
    const auto p = build_symmetric(2, 3.0, 0.5);
    const auto sigma = sample_labels(p.pi(), 400, 3);
    const auto empty = sample_sbm_fixed_m(p, 400, 0, sigma, 1);
    CHECK(empty.graph.num_edges() == 0);
    CHECK(empty.simple);

    const auto assort = build_symmetric(2, 3.0, 1.0);
    const auto all_in = sample_sbm_fixed_m(assort, 400, 300, sigma, 2);
    for (const auto& [u, v] : all_in.graph.edges()) CHECK(sigma.values[u] == sigma.values[v]);

    // Within-group share (1 + (q-1) lambda) / q.
    double within = 0.0, total = 0.0;
    for (int r = 0; r < 50; ++r) {
        const auto g = sample_sbm_fixed_m(p, 400, 400, sigma, derive_seed(8, r)).graph;
        for (const auto& [u, v] : g.edges()) within += sigma.values[u] == sigma.values[v];
        total += g.num_edges();
    }
    CHECK(std::abs(within / total - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / total));

    Labeling lopsided{2, std::vector<int>(400, 0)};
    CHECK_THROWS_AS(sample_sbm_fixed_m(p, 400, 10, lopsided, 1), ValidationError);
}

TEST_CASE("cycle counts on small graphs")
{
    auto k3 = count_cycles(complete_graph(3), 3);
    CHECK(k3[0].m == 3);
    CHECK(k3[0].count == 1);

    auto k4 = count_cycles(complete_graph(4), 4);
    CHECK(k4[0].count == 4);
    CHECK(k4[1].count == 3);

    // Petersen graph: girth 5, twelve pentagons, ten hexagons.
    auto pet = count_cycles(petersen(), 6);
    CHECK(pet[0].count == 0);
    CHECK(pet[1].count == 0);
    CHECK(pet[2].count == 12);
    CHECK(pet[3].count == 10);

    CHECK_THROWS_AS(count_cycles(petersen(), 2), ValidationError);
    CHECK_THROWS_AS(count_cycles(petersen(), 13), ValidationError);
}

TEST_CASE("cycle counts agree with brute force and the serial kernel")
{
    for (int r = 0; r < 10; ++r) {
        const auto g = sample_er(40, 6.0, derive_seed(12, r));
        const auto par = count_cycles(g, 7);
        const auto ser = count_cycles_serial(g, 7);
        for (std::size_t k = 0; k < par.size(); ++k) {
            CHECK(par[k].count == ser[k].count);
            CHECK(par[k].count == oracle::cycles_bruteforce(g, par[k].m));
        }
    }
}

TEST_CASE("Poisson means")
{
    auto stats = count_cycles(complete_graph(4), 3);
    attach_poisson_means(stats, build_symmetric(2, 3.0, 0.5));
    CHECK(stats[0].mu_Q == Approx(4.5));
    CHECK(stats[0].mu_P == Approx(5.0625));

    const auto rows = cycle_poisson_check(build_symmetric(2, 0.0, 0.5), 200, 4, 30, 1);
    for (const auto& r : rows) {
        CHECK(r.mean_P == 0.0);
        CHECK(r.mean_Q == 0.0);
        CHECK(r.target_P == 0.0);
        CHECK(r.target_Q == 0.0);
    }
    CHECK_THROWS_AS(cycle_poisson_check(build_symmetric(2, 3.0, 0.5), 200, 4, 10, 1), ValidationError);
}
