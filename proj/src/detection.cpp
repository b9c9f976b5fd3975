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

#include "sbm/detection.hpp"

#include "sbm/assignment.hpp"
#include "sbm/error.hpp"
#include "sbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace sbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;

void check_pair(const Labeling& sigma, const Labeling& tau)
{
    require(sigma.n() == tau.n(), "labelings differ in length");
    require(sigma.q == tau.q, "labelings differ in q");
    require(sigma.n() > 0, "labelings are empty");
}

double safe_mul(double count, double logv)
{
    return count == 0.0 ? 0.0 : count * logv;
}

// Log joint density log P_n(G, x) for one labeling x, in O(n + |E| + q^2).
class LogDensity {
public:
    LogDensity(const Graph& g, const ModelParams& params)
        : g_(g), q_(params.q()), log_pi_(q_), l0_(q_ * q_), l1_(q_ * q_), counts_(q_), edge_counts_(q_ * q_)
    {
        const double n = static_cast<double>(g.n());
        require(params.M().maxCoeff() <= n, "M entries must not exceed n");
        for (int a = 0; a < q_; ++a) {
            log_pi_[a] = std::log(params.pi()[a]);
            for (int b = 0; b < q_; ++b) {
                const double p = params.M()(a, b) / n;
                l0_[a * q_ + b] = std::log1p(-p);
                l1_[a * q_ + b] = std::log(p);
            }
        }
    }

    double operator()(const int* x)
    {
        std::fill(counts_.begin(), counts_.end(), 0.0);
        std::fill(edge_counts_.begin(), edge_counts_.end(), 0.0);
        for (std::size_t v = 0; v < g_.n(); ++v) counts_[x[v]] += 1.0;
        for (const auto& [u, v] : g_.edges()) {
            int a = x[u], b = x[v];
            if (a > b) std::swap(a, b);
            edge_counts_[a * q_ + b] += 1.0;
        }
        double lw = 0.0;
        for (int a = 0; a < q_; ++a) {
            lw += safe_mul(counts_[a], log_pi_[a]);
            for (int b = a; b < q_; ++b) {
                const double pairs = a == b ? counts_[a] * (counts_[a] - 1.0) / 2.0 : counts_[a] * counts_[b];
                const double e = edge_counts_[a * q_ + b];
                lw += safe_mul(pairs - e, l0_[a * q_ + b]) + safe_mul(e, l1_[a * q_ + b]);
            }
        }
        return std::isnan(lw) ? kNegInf : lw;
    }

private:
    const Graph& g_;
    int q_;
    std::vector<double> log_pi_, l0_, l1_, counts_, edge_counts_;
};

// Streaming log-sum-exp over labelings, with per-(vertex, label) partial sums.
struct PosteriorAccumulator {
    std::size_t n = 0;
    int q = 2;
    double shift = kNegInf;
    double z = 0.0;
    std::vector<double> mass;

    PosteriorAccumulator(std::size_t n_, int q_) : n(n_), q(q_), mass(n_ * q_, 0.0) {}

    void rescale(double new_shift)
    {
        const double f = shift == kNegInf ? 0.0 : std::exp(shift - new_shift);
        z *= f;
        for (auto& m : mass) m *= f;
        shift = new_shift;
    }

    void add(double lw, const int* x)
    {
        if (lw == kNegInf) return;
        if (lw > shift) rescale(lw);
        const double w = std::exp(lw - shift);
        z += w;
        for (std::size_t v = 0; v < n; ++v) mass[v * q + x[v]] += w;
    }

    void merge(const PosteriorAccumulator& o)
    {
        if (o.shift == kNegInf) return;
        if (o.shift > shift) rescale(o.shift);
        const double f = std::exp(o.shift - shift);
        z += f * o.z;
        for (std::size_t k = 0; k < mass.size(); ++k) mass[k] += f * o.mass[k];
    }

    Matrix posteriors() const
    {
        if (!(z > 0.0)) throw NumericalError("every labeling has zero probability");
        Matrix out(n, q);
        for (std::size_t v = 0; v < n; ++v)
            for (int i = 0; i < q; ++i) out(v, i) = mass[v * q + i] / z;
        return out;
    }
};

std::uint64_t state_count(std::size_t free_vertices, int q)
{
    const double states = std::pow(static_cast<double>(q), static_cast<double>(free_vertices));
    if (states > kMaxPosteriorStates)
        throw BudgetExceeded("exact posterior needs q^n <= 2^26 labelings");
    return static_cast<std::uint64_t>(std::llround(states));
}

// Visit labelings with index in [begin, end); digits for vertices [first, n).
template <class Visit>
void enumerate_block(std::size_t n, int q, std::size_t first, std::uint64_t begin, std::uint64_t end, Visit&& visit)
{
    std::vector<int> x(n, 0);
    std::uint64_t idx = begin;
    for (std::size_t v = first; v < n; ++v) {
        x[v] = static_cast<int>(idx % q);
        idx /= q;
    }
    for (std::uint64_t k = begin; k < end; ++k) {
        visit(x.data());
        for (std::size_t v = first; v < n; ++v) {
            if (++x[v] < q) break;
            x[v] = 0;
        }
    }
}

Matrix posteriors_impl(const Graph& g, const ModelParams& params, bool pin, bool parallel)
{
    const std::size_t n = g.n();
    require(n >= 1, "graph has no vertices");
    const int q = params.q();
    const std::size_t first = pin ? 1 : 0;
    const std::uint64_t total = state_count(n - first, q);

    if (!parallel) {
        PosteriorAccumulator acc(n, q);
        LogDensity density(g, params);
        enumerate_block(n, q, first, 0, total, [&](const int* x) { acc.add(density(x), x); });
        return acc.posteriors();
    }

    const std::uint64_t blocks = std::min<std::uint64_t>(256, total);
    std::vector<PosteriorAccumulator> partial(blocks, PosteriorAccumulator(n, q));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        LogDensity density(g, params);
        const std::uint64_t lo = total * b / blocks, hi = total * (b + 1) / blocks;
        auto& acc = partial[b];
        enumerate_block(n, q, first, lo, hi, [&](const int* x) { acc.add(density(x), x); });
    }
    PosteriorAccumulator acc(n, q);
    for (const auto& p : partial) acc.merge(p);
    return acc.posteriors();
}

} // namespace

Matrix joint_counts(const Labeling& sigma, const Labeling& tau)
{
    check_pair(sigma, tau);
    Matrix N = Matrix::Zero(sigma.q, sigma.q);
    for (std::size_t v = 0; v < sigma.n(); ++v) {
        require(sigma.values[v] >= 0 && sigma.values[v] < sigma.q && tau.values[v] >= 0 && tau.values[v] < tau.q,
                "label out of range");
        N(sigma.values[v], tau.values[v]) += 1.0;
    }
    return N;
}

double overlap(const Labeling& sigma, const Labeling& tau)
{
    const Matrix N = joint_counts(sigma, tau);
    const double n = static_cast<double>(sigma.n());
    const Vector r = N.rowwise().sum();
    const Vector c = N.colwise().sum().transpose();
    const Matrix score = N - r * c.transpose() / n;
    return max_weight_assignment(score).value / n;
}

OverlapMatrix overlap_matrix(const Labeling& sigma, const Labeling& tau)
{
    require(sigma.balanced() && tau.balanced(), "overlap_matrix needs balanced labelings");
    OverlapMatrix out;
    out.alpha = joint_counts(sigma, tau) * (static_cast<double>(sigma.q) / static_cast<double>(sigma.n()));
    out.frobenius_sq = out.alpha.squaredNorm();
    return out;
}

BirkhoffCheck birkhoff_bound_check(const Labeling& sigma, const Labeling& tau)
{
    const auto om = overlap_matrix(sigma, tau);
    BirkhoffCheck out;
    out.frobenius_sq = om.frobenius_sq;
    out.bound = 1.0 + sigma.q * overlap(sigma, tau);
    out.ok = out.frobenius_sq <= out.bound + 1e-12;
    return out;
}

double entropy_at_overlap(int q, double beta)
{
    auto g = [](double t) { return t > 0.0 ? -t * std::log(t) : 0.0; };
    const double x = 1.0 / q + beta;
    return g(x) + g(1.0 - x) + (1.0 - x) * std::log(q - 1.0);
}

double default_slack(std::size_t n)
{
    return std::pow(static_cast<double>(n), 2.0 / 3.0);
}

GoodnessCheck goodness(const Graph& g, const Labeling& tau, const SymmetricParams& params, double slack)
{
    require(tau.n() == g.n(), "labeling length must equal n");
    require(tau.q == params.q, "labeling q must match params");
    require(tau.balanced(), "goodness needs a balanced labeling");
    GoodnessCheck out;
    for (const auto& [u, v] : g.edges()) {
        if (tau.values[u] == tau.values[v]) ++out.m_in;
        else ++out.m_out;
    }
    const double n = static_cast<double>(g.n());
    out.target_in = params.cin() * n / (2.0 * params.q);
    out.target_out = (params.q - 1) * params.cout() * n / (2.0 * params.q);
    out.slack = slack;
    out.is_good = std::abs(static_cast<double>(out.m_in) - out.target_in) < slack &&
                  std::abs(static_cast<double>(out.m_out) - out.target_out) < slack;
    return out;
}

Labeling balance_labeling(const Graph& g, const Labeling& labeling)
{
    require(labeling.n() == g.n(), "labeling length must equal n");
    require(labeling.n() % labeling.q == 0, "balancing needs q | n");
    Labeling out = labeling;
    const auto target = out.n() / out.q;
    auto counts = out.counts();
    // Vertices ordered by (degree, index); each surplus group gives up its lowest-degree members.
    std::vector<Vertex> order(out.n());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });
    int deficit = 0;
    for (Vertex v : order) {
        const int from = out.values[v];
        if (counts[from] <= target) continue;
        while (deficit < out.q && counts[deficit] >= target) ++deficit;
        if (deficit == out.q) break;
        out.values[v] = deficit;
        --counts[from];
        ++counts[deficit];
    }
    return out;
}

namespace {

template <class Leaf>
void enumerate_canonical_balanced(std::size_t n, int q, Leaf&& leaf)
{
    require(n % q == 0, "balanced labelings need q | n");
    require(std::pow(static_cast<double>(q), static_cast<double>(n)) <= 4294967296.0,
            "exhaustive search needs q^n <= 2^32");
    const auto target = n / q;
    std::vector<int> x(n, 0);
    std::vector<std::size_t> counts(q, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t v, int used) {
        if (v == n) {
            leaf(x);
            return;
        }
        const int top = std::min(used + 1, q);
        for (int label = 0; label < top; ++label) {
            if (counts[label] == target) continue;
            // Labels not yet used must still fit in the remaining vertices.
            const int new_used = std::max(used, label + 1);
            if (static_cast<std::size_t>(q - new_used) * target > n - v - 1) continue;
            x[v] = label;
            ++counts[label];
            rec(v + 1, new_used);
            --counts[label];
        }
    };
    rec(0, 0);
}

} // namespace

std::vector<Labeling> exhaustive_good_search(const Graph& g, const SymmetricParams& params, double slack)
{
    std::vector<Labeling> good;
    enumerate_canonical_balanced(g.n(), params.q, [&](const std::vector<int>& x) {
        Labeling tau{params.q, x};
        if (goodness(g, tau, params, slack).is_good) good.push_back(std::move(tau));
    });
    return good;
}

std::uint64_t count_canonical_balanced(std::size_t n, int q)
{
    std::uint64_t count = 0;
    enumerate_canonical_balanced(n, q, [&](const std::vector<int>&) { ++count; });
    return count;
}

Matrix exact_posteriors(const Graph& g, const ModelParams& params, bool pin_vertex0)
{
    return posteriors_impl(g, params, pin_vertex0, true);
}

Matrix exact_posteriors_serial(const Graph& g, const ModelParams& params, bool pin_vertex0)
{
    return posteriors_impl(g, params, pin_vertex0, false);
}

std::vector<double> exact_posterior(const Graph& g, const ModelParams& params, Vertex u)
{
    require(u < g.n(), "vertex out of range");
    const Matrix post = exact_posteriors(g, params, false);
    std::vector<double> out(params.q());
    for (int i = 0; i < params.q(); ++i) out[i] = post(u, i);
    return out;
}

BayesOverlapResult bayes_overlap_experiment(const ModelParams& params, std::size_t n, int reps, std::uint64_t seed)
{
    require(reps >= 2, "need at least two replicates");
    require(n >= 2, "need at least two vertices");
    state_count(n - 1, params.q());
    BayesOverlapResult out;
    out.reps = reps;
    out.per_rep.assign(reps, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < reps; ++r) {
        const auto sample = sample_sbm(params, n, derive_seed(seed, static_cast<std::uint64_t>(r)));
        const Matrix post = exact_posteriors_serial(sample.graph, params, true);
        Labeling guess{params.q(), std::vector<int>(n, 0)};
        for (std::size_t v = 0; v < n; ++v) {
            int best = 0;
            for (int i = 1; i < params.q(); ++i)
                if (post(v, i) > post(v, best) + kTieTol) best = i;
            guess.values[v] = best;
        }
        out.per_rep[r] = overlap(sample.sigma, guess);
    }
    const double sum = std::accumulate(out.per_rep.begin(), out.per_rep.end(), 0.0);
    out.mean = sum / reps;
    double ss = 0.0;
    for (double x : out.per_rep) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (reps - 1) / reps);
    out.ci_low = out.mean - 1.96 * out.se;
    out.ci_high = out.mean + 1.96 * out.se;
    return out;
}

} // namespace sbm
