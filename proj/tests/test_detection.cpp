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

#include "sbm/detection.hpp"
#include "sbm/error.hpp"
#include "sbm/qfunctional.hpp"
#include "sbm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <omp.h>
#include <set>

using namespace sbm;
using doctest::Approx;

namespace {

Labeling make(int q, std::vector<int> v) { return Labeling{q, std::move(v)}; }

Labeling relabel(const Labeling& l, const std::vector<int>& rho)
{
    Labeling out = l;
    for (auto& x : out.values) x = rho[x];
    return out;
}

Graph random_graph(std::size_t n, double p, Rng& rng)
{
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (rng.uniform() < p) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
}

// Canonical balanced labelings by filtering every labeling with vertex 0 in group 0.
std::vector<Labeling> canonical_balanced_slow(std::size_t n, int q)
{
    std::vector<Labeling> out;
    std::uint64_t total = 1;
    for (std::size_t v = 1; v < n; ++v) total *= q;
    for (std::uint64_t code = 0; code < total; ++code) {
        Labeling l{q, std::vector<int>(n, 0)};
        std::uint64_t c = code;
        for (std::size_t v = 1; v < n; ++v, c /= q) l.values[v] = static_cast<int>(c % q);
        int next = 0;
        bool canon = true;
        for (int x : l.values) {
            if (x > next) canon = false;
            if (x == next) ++next;
        }
        if (canon && l.balanced()) out.push_back(std::move(l));
    }
    return out;
}

} // namespace

TEST_CASE("overlap examples")
{
    const auto s = make(2, {0, 0, 1, 1});
    CHECK(overlap(s, s) == Approx(0.5));
    CHECK(overlap(s, make(2, {1, 1, 0, 0})) == Approx(0.5));
    CHECK(overlap(s, make(2, {0, 1, 0, 1})) == Approx(0.0).scale(1));
    CHECK(overlap(s, make(2, {0, 0, 0, 0})) == Approx(0.0).scale(1));
    const auto t = make(3, {0, 1, 2, 0, 1, 2});
    CHECK(overlap(t, t) == Approx(2.0 / 3));
    CHECK_THROWS_AS(overlap(s, make(2, {0, 1})), ValidationError);
}

TEST_CASE("overlap matches the permutation oracle and is symmetric")
{
    Rng rng(5);
    for (int t = 0; t < 300; ++t) {
        const int q = 2 + static_cast<int>(rng.below(4));
        const std::size_t n = 1 + rng.below(30);
        Labeling a{q, std::vector<int>(n)}, b{q, std::vector<int>(n)};
        for (std::size_t v = 0; v < n; ++v) {
            a.values[v] = static_cast<int>(rng.below(q));
            b.values[v] = static_cast<int>(rng.below(q));
        }
        const double o = overlap(a, b);
        CHECK(o == Approx(oracle::overlap_bruteforce(a, b)).scale(1).epsilon(1e-12));
        CHECK(o == Approx(overlap(b, a)).scale(1).epsilon(1e-12));
        std::vector<int> rho(q);
        for (int i = 0; i < q; ++i) rho[i] = (i + 1) % q;
        CHECK(o == Approx(overlap(relabel(a, rho), b)).scale(1).epsilon(1e-12));
        CHECK(o >= -1e-12);
        CHECK(o <= 1.0 - 1.0 / q + 1e-12);
    }
}

TEST_CASE("overlap matrix is doubly stochastic")
{
    const auto s = oracle::random_balanced(3, 12, 1);
    const auto t = oracle::random_balanced(3, 12, 2);
    const auto m = overlap_matrix(s, t);
    CHECK((m.alpha.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((m.alpha.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(m.frobenius_sq == Approx(m.alpha.squaredNorm()));
    CHECK(overlap_matrix(s, s).alpha.isApprox(Matrix::Identity(3, 3)));
    CHECK_THROWS_AS(overlap_matrix(make(2, {0, 0, 1}), make(2, {0, 1, 1})), ValidationError);
    const auto j = joint_counts(s, t);
    CHECK(j.sum() == Approx(12.0));
}

TEST_CASE("Birkhoff and entropy bounds on random balanced pairs")
{
    Rng rng(9);
    for (int t = 0; t < 2000; ++t) {
        const int q = 2 + static_cast<int>(rng.below(5));
        const std::size_t n = q * (1 + rng.below(20));
        const auto a = oracle::random_balanced(q, n, rng());
        const auto b = oracle::random_balanced(q, n, rng());
        const auto chk = birkhoff_bound_check(a, b);
        CHECK(chk.ok);
        CHECK(chk.frobenius_sq <= chk.bound + 1e-12);
        const auto m = overlap_matrix(a, b);
        CHECK(average_row_entropy(m.alpha) <= entropy_at_overlap(q, overlap(a, b)) + 1e-12);
    }
}

TEST_CASE("entropy at overlap corners")
{
    CHECK(entropy_at_overlap(3, 0.0) == Approx(std::log(3.0)));
    CHECK(std::abs(entropy_at_overlap(3, 2.0 / 3)) < 1e-12);
    CHECK(entropy_at_overlap(2, 0.25) == Approx(-(0.75 * std::log(0.75) + 0.25 * std::log(0.25))));
}

TEST_CASE("goodness counts")
{
    // Two triangles joined by one edge.
    const Graph g(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
    const SymmetricParams p{2, 2.0, 0.5};
    const auto good = goodness(g, make(2, {0, 0, 0, 1, 1, 1}), p, 10.0);
    CHECK(good.m_in == 6);
    CHECK(good.m_out == 1);
    CHECK(good.target_in == Approx(p.cin() * 6 / 4));
    CHECK(good.target_out == Approx(p.cout() * 6 / 4));
    CHECK(good.is_good);
    const auto tight = goodness(g, make(2, {0, 0, 0, 1, 1, 1}), p, 0.0);
    CHECK_FALSE(tight.is_good);
    CHECK(default_slack(1000) == Approx(100.0));
}

TEST_CASE("balance_labeling")
{
    const Graph g(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
    const auto l = balance_labeling(g, make(2, {0, 0, 0, 0, 1, 1}));
    CHECK(l.balanced());
    for (std::size_t v = 4; v < 6; ++v) CHECK(l.values[v] == 1);
    // The moved vertex has minimum degree within the oversized group.
    CHECK(l.values[0] == 0);
    CHECK(l.values[3] == 1);
    CHECK_THROWS_AS(balance_labeling(Graph(5, {}), make(2, {0, 0, 0, 1, 1})), ValidationError);
}

TEST_CASE("canonical balanced enumeration")
{
    CHECK(count_canonical_balanced(4, 2) == 3);
    CHECK(count_canonical_balanced(6, 3) == 15);
    CHECK(count_canonical_balanced(8, 2) == canonical_balanced_slow(8, 2).size());
    CHECK(count_canonical_balanced(9, 3) == canonical_balanced_slow(9, 3).size());
}

TEST_CASE("exhaustive good search matches filtering")
{
    Rng rng(12);
    for (int t = 0; t < 6; ++t) {
        const int q = t % 2 ? 3 : 2;
        const std::size_t n = q == 2 ? 10 : 9;
        const Graph g = random_graph(n, 0.35, rng);
        const SymmetricParams p{q, 3.0, 0.6};
        const double slack = 1.5;
        const auto found = exhaustive_good_search(g, p, slack);
        std::set<std::vector<int>> got;
        for (const auto& l : found) {
            CHECK(goodness(g, l, p, slack).is_good);
            got.insert(l.values);
        }
        std::size_t expected = 0;
        for (const auto& l : canonical_balanced_slow(n, q))
            if (goodness(g, l, p, slack).is_good) {
                ++expected;
                CHECK(got.count(l.values) == 1);
            }
        CHECK(found.size() == expected);
    }
}

TEST_CASE("posterior two-vertex example")
{
    const auto p = build_symmetric(2, 1.0, 0.5);
    const Graph g(2, {{0, 1}});
    const auto post = exact_posteriors(g, p, true);
    CHECK(post(0, 0) == Approx(1.0));
    CHECK(post(1, 0) == Approx(1.5 / 2.0).epsilon(1e-14));
    const auto free = exact_posteriors(g, p);
    CHECK(free(1, 0) == Approx(0.5));
}

TEST_CASE("posterior is the prior at lambda = 0")
{
    Rng rng(4);
    Vector pi(3);
    pi << 0.5, 0.3, 0.2;
    const ModelParams flat(pi, Matrix::Constant(3, 3, 2.0));
    for (int t = 0; t < 10; ++t) {
        const Graph g = random_graph(7, 0.3, rng);
        const auto post = exact_posteriors(g, flat);
        for (int v = 0; v < 7; ++v)
            for (int i = 0; i < 3; ++i) CHECK(std::abs(post(v, i) - pi[i]) < 1e-12);
    }
}

TEST_CASE("posterior matches direct products")
{
    Rng rng(6);
    Vector pi(2);
    pi << 0.6, 0.4;
    Matrix M(2, 2);
    M << 3.0, 0.5, 0.5, 4.25;
    const ModelParams general(pi, M);
    for (const auto& p : {build_symmetric(2, 2.0, 0.7), build_symmetric(3, 2.0, -0.3), general}) {
        const Graph g = random_graph(7, 0.3, rng);
        const auto fast = exact_posteriors(g, p);
        const auto slow = oracle::posterior_slow(g, p);
        for (int v = 0; v < 7; ++v) {
            for (int i = 0; i < p.q(); ++i) CHECK(fast(v, i) == Approx(slow[v][i]).epsilon(1e-12));
            const auto one = exact_posterior(g, p, v);
            for (int i = 0; i < p.q(); ++i) CHECK(one[i] == Approx(slow[v][i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("parallel posterior equals serial")
{
    Rng rng(7);
    const Graph g = random_graph(14, 0.25, rng);
    const auto p = build_symmetric(2, 3.0, 0.5);
    for (bool pin : {true, false}) {
        const Matrix par = exact_posteriors(g, p, pin);
        CHECK((par - exact_posteriors_serial(g, p, pin)).cwiseAbs().maxCoeff() < 1e-13);
        // Fixed blocks make the result independent of the thread count.
        const int threads = omp_get_max_threads();
        omp_set_num_threads(3);
        const Matrix three = exact_posteriors(g, p, pin);
        omp_set_num_threads(threads);
        CHECK(par == three);
    }
}

TEST_CASE("posterior budget guard")
{
    const auto p = build_symmetric(2, 3.0, 0.5);
    CHECK_THROWS_AS(exact_posteriors(Graph(40, {}), p), BudgetExceeded);
    CHECK_THROWS_AS(exact_posteriors(Graph(18, {}), build_symmetric(3, 3.0, 0.5)), BudgetExceeded);
}

TEST_CASE("Bayes overlap")
{
    const auto zero = bayes_overlap_experiment(build_symmetric(2, 4.0, 0.0), 10, 20, 1);
    CHECK(zero.reps == 20);
    CHECK(zero.mean == 0.0);
    CHECK(zero.ci_low <= 0.0);
    CHECK(zero.ci_high >= 0.0);
    const auto a = bayes_overlap_experiment(build_symmetric(2, 4.0, 0.8), 10, 20, 1);
    const auto b = bayes_overlap_experiment(build_symmetric(2, 4.0, 0.8), 10, 20, 1);
    CHECK(a.per_rep == b.per_rep);
    CHECK(a.mean > 0.0);
}
