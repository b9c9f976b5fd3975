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

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <vector>

namespace sbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymmetricParams {
    int q = 2;
    double d = 1.0;
    double lambda = 0.0;

    double cin() const { return d * (1.0 + (q - 1) * lambda); }
    double cout() const { return d * (1.0 - lambda); }
};

/// Block model (q, pi, M) with the quantities every other module needs
/// precomputed at construction. M is on the n*probability scale.
///
/// T = diag(pi) M / d. Its spectrum is real because T is similar to the
/// symmetric matrix diag(pi)^{1/2} M diag(pi)^{1/2} / d, which is what the
/// eigensolver sees.
class ModelParams {
public:
    ModelParams(Vector pi, Matrix M);

    int q() const { return static_cast<int>(pi_.size()); }
    const Vector& pi() const { return pi_; }
    const Matrix& M() const { return M_; }
    double d() const { return d_; }
    const Matrix& T() const { return T_; }
    /// A = M - d J.
    Matrix A() const;
    /// B = diag(pi) A / d = T - pi 1^T.
    Matrix B() const;

    /// Eigenvalues of T by decreasing |.|, first entry exactly 1.
    const std::vector<double>& eigenvalues() const { return eig_; }
    double lambda2() const { return eig_.size() > 1 ? eig_[1] : 0.0; }

    /// Set when built by build_symmetric.
    const std::optional<SymmetricParams>& symmetric() const { return sym_; }

private:
    friend ModelParams build_symmetric(int q, double d, double lambda);

    Vector pi_;
    Matrix M_;
    double d_ = 0.0;
    Matrix T_;
    std::vector<double> eig_;
    std::optional<SymmetricParams> sym_;
};

ModelParams build_symmetric(int q, double d, double lambda);
inline ModelParams build_symmetric(const SymmetricParams& s) { return build_symmetric(s.q, s.d, s.lambda); }

std::vector<double> spectrum(const ModelParams& params);

/// tr(T^m) = sum_i lambda_i^m.
double trace_power(const ModelParams& params, int m);

/// Parse either {q, d, lambda} or {pi: [...], M: [[...]]}.
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& params);

} // namespace sbm
