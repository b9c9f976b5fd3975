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
#include <optional>
#include <span>
#include <vector>

namespace sbm {

/// Joint type counts N_ij = |{v : sigma_v = i, tau_v = j}|, row-major.
struct CountMatrix {
    int q = 2;
    std::vector<int> N;

    int operator()(int i, int j) const { return N[static_cast<std::size_t>(i) * q + j]; }
    int n() const;
    /// X_ij = (N_ij - n pi_i pi_j) / sqrt(n).
    Matrix X(const Vector& pi) const;
};

/// prod_{u<v} E_Q[W_uv(sigma) W_uv(tau)] for any pair (sigma, tau) with type counts N.
double pair_weight(const ModelParams& params, int n, const CountMatrix& N);
double log_pair_weight(const ModelParams& params, int n, const CountMatrix& N);

double log_multinomial(std::span<const int> counts);
/// Exact for sum(counts) <= 30.
unsigned __int128 exact_multinomial(std::span<const int> counts);

double default_window(int n);

struct SecondMomentOptions {
    std::optional<double> a_n; ///< defaults to n^{2/3}
    double max_matrices = 5e8;
};

struct SecondMomentRecord {
    int n = 0;
    double exact_value = 0.0;
    double asymptote = 0.0; ///< prod psi(d lambda_i lambda_j)
    double a_n = 0.0;
    double omega_probability = 0.0; ///< P(sigma in Omega_n)
    double conditioned_value = 0.0; ///< exact_value / P(Omega_n)^2
    std::uint64_t matrices = 0;
};

/// Number of q x q nonnegative integer matrices with entries summing to n.
double count_matrix_total(int q, int n);

SecondMomentRecord exact_second_moment(const ModelParams& params, int n, const SecondMomentOptions& opts = {});

SecondMomentRecord exact_second_moment_serial(const ModelParams& params, int n, const SecondMomentOptions& opts = {});

} // namespace sbm
