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

#include "sbm/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace sbm {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph. Edges are stored sorted with u < v; the CSR
/// adjacency is built once at construction.
class Graph {
public:
    Graph() = default;
    /// Drops self-loops and duplicates; throws on out-of-range endpoints.
    Graph(std::size_t n, std::vector<Edge> edges);

    std::size_t n() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const Vertex> neighbors(Vertex v) const
    {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(Vertex u, Vertex v) const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Vertex> adj_;
};

/// Vertex labels in [0, q).
struct Labeling {
    int q = 2;
    std::vector<int> values;

    std::size_t n() const { return values.size(); }
    std::vector<std::size_t> counts() const;
    bool balanced() const;
};

struct LabeledSample {
    Graph graph;
    Labeling sigma;
};

/// G(n, M/n, pi): labels i.i.d. from pi, then each pair independently with
/// probability M(sigma_u, sigma_v) / n. O(n d) via geometric skipping.
LabeledSample sample_sbm(const ModelParams& params, std::size_t n, std::uint64_t seed);

/// G(n, d/n).
Graph sample_er(std::size_t n, double d, std::uint64_t seed);

struct FixedEdgeSample {
    Graph graph;
    /// False if the drawn multigraph had a self-loop or a repeated pair.
    bool simple = true;
};

/// m edges drawn independently: ordered group pair (r, s) with probability
/// proportional to pi_r M_rs pi_s, then endpoints uniform in sigma^{-1}(r),
/// sigma^{-1}(s) with replacement.
FixedEdgeSample sample_sbm_fixed_m(const ModelParams& params, std::size_t n, std::size_t m,
                                   const Labeling& sigma, std::uint64_t seed);

/// Draw sigma i.i.d. from pi.
Labeling sample_labels(const Vector& pi, std::size_t n, std::uint64_t seed);

// Edge-list format: "# n=<n>" header, then one "u v" line per edge with u < v.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);
// One label per line.
void write_labeling(std::ostream& os, const Labeling& l);
Labeling read_labeling(std::istream& is, int q);

} // namespace sbm
