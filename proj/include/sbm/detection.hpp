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
#include <optional>
#include <vector>

namespace sbm {

/// Chance-corrected agreement maximised over label permutations:
/// (1/n) max_rho sum_i (|s^-1(i) & t^-1(rho i)| - |s^-1(i)| |t^-1(rho i)| / n).
double overlap(const Labeling& sigma, const Labeling& tau);

/// q x q joint type counts N_ij = |{v : sigma_v = i, tau_v = j}|.
Matrix joint_counts(const Labeling& sigma, const Labeling& tau);

struct OverlapMatrix {
    Matrix alpha; ///< alpha_st = (q/n) |sigma^-1(s) & tau^-1(t)|
    double frobenius_sq = 0.0;
};

/// Requires balanced sigma and tau; the result is doubly stochastic.
OverlapMatrix overlap_matrix(const Labeling& sigma, const Labeling& tau);

struct BirkhoffCheck {
    double frobenius_sq = 0.0;
    double bound = 0.0; ///< 1 + q * overlap
    bool ok = true;
};

/// |alpha|^2 <= 1 + q olap(sigma, tau) for balanced labelings.
BirkhoffCheck birkhoff_bound_check(const Labeling& sigma, const Labeling& tau);

/// h(1/q + beta) + (1 - 1/q - beta) log(q - 1): the largest average row
/// entropy of a doubly stochastic alpha at overlap beta.
double entropy_at_overlap(int q, double beta);

struct GoodnessCheck {
    std::size_t m_in = 0;
    std::size_t m_out = 0;
    double target_in = 0.0;  ///< cin n / (2q)
    double target_out = 0.0; ///< (q-1) cout n / (2q)
    double slack = 0.0;
    bool is_good = false;
};

/// n^{2/3}.
double default_slack(std::size_t n);

GoodnessCheck goodness(const Graph& g, const Labeling& tau, const SymmetricParams& params, double slack);

/// Move minimum-degree vertices out of oversized groups into undersized ones
/// until every group has n/q vertices. Requires q | n.
Labeling balance_labeling(const Graph& g, const Labeling& labeling);

/// All good balanced labelings up to global label permutation (vertex 0 has
/// label 0, labels appear in first-seen order). Guard: q^n <= 2^32.
std::vector<Labeling> exhaustive_good_search(const Graph& g, const SymmetricParams& params, double slack);

/// Number of canonical balanced labelings visited by exhaustive_good_search.
std::uint64_t count_canonical_balanced(std::size_t n, int q);

inline constexpr double kMaxPosteriorStates = 67108864.0; // 2^26

/// n x q matrix of P(sigma_v = i | G), exact by summing the joint density over
/// every labeling. When pin_vertex0 is set the sum runs only over labelings
/// with sigma_0 = 0, which breaks the global label symmetry.
Matrix exact_posteriors(const Graph& g, const ModelParams& params, bool pin_vertex0 = false);

/// Serial reference for exact_posteriors.
Matrix exact_posteriors_serial(const Graph& g, const ModelParams& params, bool pin_vertex0 = false);

std::vector<double> exact_posterior(const Graph& g, const ModelParams& params, Vertex u);

struct BayesOverlapResult {
    double mean = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int reps = 0;
    std::vector<double> per_rep;
};

/// Per replicate: sample (G, sigma), label each vertex by the argmax of its
/// exact posterior given sigma_0 = 0 (ties to the lowest label), and score the
/// overlap with sigma. CI is mean +/- 1.96 se.
BayesOverlapResult bayes_overlap_experiment(const ModelParams& params, std::size_t n, int reps, std::uint64_t seed);

} // namespace sbm
