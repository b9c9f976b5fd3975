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

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <span>
#include <string>

namespace sbm {

/// sum p_i log(p_i / pt_i) with 0 log 0 = 0. Returns +inf when pt_i = 0 < p_i.
double kl_divergence(std::span<const double> p, std::span<const double> pt);

/// Average row entropy of alpha / q: -(1/q) sum alpha_rs log alpha_rs.
double average_row_entropy(const Matrix& alpha);

/// Alternate row/column scaling of a positive matrix until its marginals are
/// (row, col). Throws NumericalError if the marginal error stays above 1e-12.
Matrix sinkhorn(Matrix positive, const Vector& row, const Vector& col);

/// A point of the transportation polytope: nonnegative q x q matrix with both
/// marginals equal to pi.
struct CouplingMatrix {
    Vector pi;
    Matrix alpha;

    static CouplingMatrix product(const Vector& pi);
    double marginal_error() const;
};

struct OptimizerOptions {
    int restarts = 32;
    std::uint64_t seed = 0;
    int max_iter = 4000;
};

struct QResult {
    double value = 0.0;
    CouplingMatrix argmax;
    /// Second-order quotient at alpha = pi (x) pi; equals d lambda_2^2 for (M - dJ)/sqrt(2d).
    double hessian_ratio = 0.0;
    int restarts_used = 0;
    int restarts_converged = 0;
    bool converged = false;
};

/// (M - dJ) / sqrt(2d); zero matrix when d = 0.
Matrix scaled_connectivity(const ModelParams& params);

/// Quotient (alpha - p)^T (A (x) A) (alpha - p) / D(alpha, p); at alpha = p the
/// Hessian-ratio limit is returned.
double q_quotient(const Vector& pi, const Matrix& A_scaled, const Matrix& alpha);

/// sup over the tangent space at p of the second-order quotient.
double hessian_ratio(const Vector& pi, const Matrix& A_scaled);

/// Numerical sup of q_quotient over the transportation polytope: the larger of
/// hessian_ratio and the best multi-start mirror ascent. A lower bound on the
/// true supremum.
QResult q_value(const Vector& pi, const Matrix& A_scaled, const OptimizerOptions& opts = {});

/// Serial reference for q_value: identical starts, one thread.
QResult q_value_serial(const Vector& pi, const Matrix& A_scaled, const OptimizerOptions& opts = {});

/// H(alpha) - log q + (d lambda^2 / 2)(|alpha|_F^2 - 1) on doubly stochastic alpha.
double phi(const Matrix& alpha, double d, double lambda);

struct PhiMaxResult {
    double value = 0.0;
    Matrix argmax;
    int restarts_used = 0;
    int restarts_converged = 0;
};

/// Multi-start ascent of phi over the Birkhoff polytope. Always includes J/q.
PhiMaxResult phi_max(int q, double d, double lambda, const OptimizerOptions& opts = {});

/// f(r) from the Achlioptas-Naor entropy bound; r in [1/q, 1].
double an_f(int q, double r);

/// Upper bound on H(alpha) over doubly stochastic alpha with |alpha|_F^2 = rho.
double an_entropy_bound(int q, double rho);

struct AnCheckResult {
    bool holds = true;
    double worst_violation = 0.0; ///< max of lhs - rhs over the grid
    double worst_rho = 1.0;
    double worst_m = 0.0;
};

/// Grid check of delta (rho - 1)/(q-1)^2 <= (1 - m/q)(f(1/q) - f((q rho - m)/(q(q - m)))).
AnCheckResult an_inequality_check(int q, double delta, int rho_grid, int m_grid);

/// psi(x) = (1 - x)^{-1/2} exp(-x/2 - x^2/4) for x < 1.
double psi(double x);
double log_psi(double x);

/// prod_{i,j >= 2} psi(d lambda_i lambda_j); +inf once any argument reaches 1.
double second_moment_product(const ModelParams& params);

struct NuTerms {
    double nu1 = 0.0; ///< -(d/2) tr(B)^2
    double nu2 = 0.0; ///< -(d^2/4) tr(B^2)^2
    double nu1_eig = 0.0; ///< -(1/2) sum d lambda_i lambda_j
    double nu2_eig = 0.0; ///< -(1/4) sum (d lambda_i lambda_j)^2
};

NuTerms nu_terms(const ModelParams& params);

struct IdentityCheck {
    double lhs = 0.0; ///< truncated sum_{m=3}^{m_trunc} mu_m delta_m^2
    double rhs = 0.0; ///< sum_{i,j>=2} log psi(d lambda_i lambda_j)
    double gap = 0.0;
    bool divergent = false;
};

IdentityCheck small_subgraph_identity(const ModelParams& params, int m_trunc);

enum class Verdict { contiguous_nondetectable, second_moment_diverges, boundary };
std::string to_string(Verdict v);

inline constexpr double kBoundaryBand = 1e-3;

struct SufficiencyResult {
    Verdict verdict = Verdict::boundary;
    QResult q;
};

SufficiencyResult sufficiency_verdict(const ModelParams& params, const OptimizerOptions& opts = {});

nlohmann::json to_json(const QResult& r);

} // namespace sbm
