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

#include "sbm/graph.hpp"

#include "sbm/error.hpp"
#include "sbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace sbm {

Graph::Graph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges))
{
    require(n <= std::numeric_limits<Vertex>::max(), "graph too large for 32-bit vertex ids");
    for (auto& [u, v] : edges_) {
        require(u < n && v < n, "edge endpoint out of range");
        if (u > v) std::swap(u, v);
    }
    std::erase_if(edges_, [](const Edge& e) { return e.first == e.second; });
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges_) {
        ++offsets_[u + 1];
        ++offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
        adj_[fill[u]++] = v;
        adj_[fill[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i) std::sort(adj_.begin() + offsets_[i], adj_.begin() + offsets_[i + 1]);
}

bool Graph::has_edge(Vertex u, Vertex v) const
{
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::size_t> Labeling::counts() const
{
    std::vector<std::size_t> c(q, 0);
    for (int x : values) ++c[x];
    return c;
}

bool Labeling::balanced() const
{
    if (values.size() % q != 0) return false;
    const auto target = values.size() / q;
    const auto c = counts();
    return std::all_of(c.begin(), c.end(), [&](std::size_t x) { return x == target; });
}

namespace {

// Calls emit(k) for each index k in [0, total) kept with probability p.
template <class Emit>
void skip_sample(std::uint64_t total, double p, Rng& rng, Emit&& emit)
{
    if (p <= 0.0 || total == 0) return;
    if (p >= 1.0) {
        for (std::uint64_t k = 0; k < total; ++k) emit(k);
        return;
    }
    double k = -1.0;
    while (true) {
        k += 1.0 + rng.geometric_skip(p);
        if (k >= static_cast<double>(total)) return;
        emit(static_cast<std::uint64_t>(k));
    }
}

// Inverse of k = v(v-1)/2 + u for 0 <= u < v.
std::pair<std::uint64_t, std::uint64_t> triangular_pair(std::uint64_t k)
{
    auto v = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
    while (v * (v - 1) / 2 > k) --v;
    while ((v + 1) * v / 2 <= k) ++v;
    return {k - v * (v - 1) / 2, v};
}

int draw_categorical(const std::vector<double>& cdf, Rng& rng)
{
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
}

std::vector<double> cumulative(const double* w, std::size_t k)
{
    std::vector<double> cdf(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) cdf[i] = (acc += w[i]);
    return cdf;
}

} // namespace

Labeling sample_labels(const Vector& pi, std::size_t n, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, 1));
    const auto cdf = cumulative(pi.data(), pi.size());
    Labeling l{static_cast<int>(pi.size()), std::vector<int>(n)};
    for (auto& x : l.values) x = draw_categorical(cdf, rng);
    return l;
}

LabeledSample sample_sbm(const ModelParams& params, std::size_t n, std::uint64_t seed)
{
    require(n >= 1, "n must be at least 1");
    const int q = params.q();
    require(params.M().maxCoeff() <= static_cast<double>(n),
            "M entries must not exceed n (edge probabilities M/n above 1)");

    Labeling sigma = sample_labels(params.pi(), n, seed);
    std::vector<std::vector<Vertex>> groups(q);
    for (std::size_t v = 0; v < n; ++v) groups[sigma.values[v]].push_back(static_cast<Vertex>(v));

    Rng rng(derive_seed(seed, 2));
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(params.d() * n / 2 * 1.2) + 16);
    for (int a = 0; a < q; ++a) {
        const auto& ga = groups[a];
        const double pa = params.M()(a, a) / static_cast<double>(n);
        const std::uint64_t within = ga.size() * (ga.size() - (ga.empty() ? 0 : 1)) / 2;
        skip_sample(within, pa, rng, [&](std::uint64_t k) {
            auto [i, j] = triangular_pair(k);
            edges.emplace_back(ga[i], ga[j]);
        });
        for (int b = a + 1; b < q; ++b) {
            const auto& gb = groups[b];
            const double pab = params.M()(a, b) / static_cast<double>(n);
            skip_sample(static_cast<std::uint64_t>(ga.size()) * gb.size(), pab, rng, [&](std::uint64_t k) {
                edges.emplace_back(ga[k / gb.size()], gb[k % gb.size()]);
            });
        }
    }
    return {Graph(n, std::move(edges)), std::move(sigma)};
}

Graph sample_er(std::size_t n, double d, std::uint64_t seed)
{
    require(d >= 0.0, "d must be nonnegative");
    require(n >= 1, "n must be at least 1");
    const double p = d / static_cast<double>(n);
    require(p <= 1.0, "d/n must not exceed 1");
    Rng rng(derive_seed(seed, 3));
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(d * n / 2 * 1.2) + 16);
    skip_sample(static_cast<std::uint64_t>(n) * (n - 1) / 2, p, rng, [&](std::uint64_t k) {
        auto [u, v] = triangular_pair(k);
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    });
    return Graph(n, std::move(edges));
}

FixedEdgeSample sample_sbm_fixed_m(const ModelParams& params, std::size_t n, std::size_t m,
                                   const Labeling& sigma, std::uint64_t seed)
{
    const int q = params.q();
    require(sigma.n() == n, "labeling length must equal n");
    require(sigma.q == q, "labeling q must match params");
    std::vector<std::vector<Vertex>> groups(q);
    for (std::size_t v = 0; v < n; ++v) {
        require(sigma.values[v] >= 0 && sigma.values[v] < q, "label out of range");
        groups[sigma.values[v]].push_back(static_cast<Vertex>(v));
    }

    std::vector<double> mass(static_cast<std::size_t>(q) * q);
    for (int r = 0; r < q; ++r)
        for (int s = 0; s < q; ++s) {
            const double w = params.pi()[r] * params.M()(r, s) * params.pi()[s];
            mass[r * q + s] = w;
            if (w > 0.0 && (groups[r].empty() || groups[s].empty()))
                throw ValidationError("group " + std::to_string(groups[r].empty() ? r : s) +
                                      " is empty but has positive edge mass");
        }
    FixedEdgeSample out;
    if (m == 0) {
        out.graph = Graph(n, {});
        return out;
    }
    const auto cdf = cumulative(mass.data(), mass.size());
    require(cdf.back() > 0.0, "model has no edge mass");

    Rng rng(derive_seed(seed, 4));
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t e = 0; e < m; ++e) {
        const int rs = draw_categorical(cdf, rng);
        const auto& gr = groups[rs / q];
        const auto& gs = groups[rs % q];
        Vertex u = gr[rng.below(gr.size())];
        Vertex v = gs[rng.below(gs.size())];
        if (u == v) out.simple = false;
        if (u > v) std::swap(u, v);
        edges.emplace_back(u, v);
    }
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) out.simple = false;
    out.graph = Graph(n, std::move(edges));
    return out;
}

void write_edge_list(std::ostream& os, const Graph& g)
{
    os << "# n=" << g.n() << '\n';
    for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& is)
{
    std::string line;
    std::size_t n = 0;
    bool have_n = false;
    std::vector<Edge> edges;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("n=");
            if (pos != std::string::npos) {
                n = std::stoull(line.substr(pos + 2));
                have_n = true;
            }
            continue;
        }
        std::istringstream ls(line);
        long long u = -1, v = -1;
        if (!(ls >> u >> v) || u < 0 || v < 0) throw ValidationError("malformed edge line: " + line);
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    require(have_n, "edge list is missing the '# n=<n>' header");
    return Graph(n, std::move(edges));
}

void write_labeling(std::ostream& os, const Labeling& l)
{
    for (int x : l.values) os << x << '\n';
}

Labeling read_labeling(std::istream& is, int q)
{
    Labeling l{q, {}};
    long long x;
    while (is >> x) {
        require(x >= 0 && x < q, "label out of range");
        l.values.push_back(static_cast<int>(x));
    }
    require(is.eof(), "malformed labeling file");
    return l;
}

} // namespace sbm
