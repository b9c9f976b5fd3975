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

#include "sbm/model.hpp"

#include "sbm/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace sbm {

namespace {

constexpr double kDegreeRelTol = 1e-9;
constexpr double kTopEigenTol = 1e-8;

std::vector<double> symmetrized_spectrum(const Vector& pi, const Matrix& M, double d)
{
    const int q = static_cast<int>(pi.size());
    if (d == 0.0) {
        // M = 0: T is undefined; treat the model as pure noise with spectrum {1, 0, ...}.
        std::vector<double> eig(q, 0.0);
        eig[0] = 1.0;
        return eig;
    }
    const Vector s = pi.array().sqrt();
    const Matrix S = s.asDiagonal() * M * s.asDiagonal() / d;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    std::vector<double> eig(solver.eigenvalues().data(), solver.eigenvalues().data() + q);
    std::stable_sort(eig.begin(), eig.end(), [](double a, double b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return a > b;
    });
    // The Perron root is 1 exactly; a near-tie with -1 can put it second.
    auto top = std::min_element(eig.begin(), eig.end(), [](double a, double b) {
        return std::abs(a - 1.0) < std::abs(b - 1.0);
    });
    if (std::abs(*top - 1.0) > kTopEigenTol)
        throw NumericalError("top eigenvalue of T is " + std::to_string(*top) + ", expected 1");
    *top = 1.0;
    std::rotate(eig.begin(), top, top + 1);
    return eig;
}

} // namespace

ModelParams::ModelParams(Vector pi, Matrix M)
    : pi_(std::move(pi)), M_(std::move(M))
{
    const auto q = pi_.size();
    require(q >= 2, "q must be at least 2");
    require(M_.rows() == static_cast<Eigen::Index>(q) && M_.cols() == static_cast<Eigen::Index>(q),
            "M must be q x q");
    require((pi_.array() > 0.0).all(), "pi entries must be positive");
    require(std::abs(pi_.sum() - 1.0) <= 1e-12, "pi must sum to 1");
    require((M_.array() >= 0.0).all(), "M entries must be nonnegative");
    require(M_.allFinite(), "M entries must be finite");
    require((M_ - M_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, M_.cwiseAbs().maxCoeff()),
            "M must be symmetric");

    const Vector degree = M_ * pi_;
    d_ = degree.mean();
    const double scale = std::max(std::abs(d_), 1e-300);
    for (Eigen::Index i = 0; i < degree.size(); ++i) {
        if (std::abs(degree[i] - d_) > kDegreeRelTol * scale && std::abs(degree[i] - d_) > 1e-300) {
            throw ValidationError("expected degree differs across groups: row " + std::to_string(i) +
                                  " has " + std::to_string(degree[i]) + ", mean is " + std::to_string(d_));
        }
    }
    T_ = d_ > 0.0 ? Matrix(pi_.asDiagonal() * M_ / d_) : Matrix(pi_ * Vector::Ones(q).transpose());
    eig_ = symmetrized_spectrum(pi_, M_, d_);
}

Matrix ModelParams::A() const
{
    return M_.array() - d_;
}

Matrix ModelParams::B() const
{
    if (d_ == 0.0) return Matrix::Zero(q(), q());
    return pi_.asDiagonal() * A() / d_;
}

ModelParams build_symmetric(int q, double d, double lambda)
{
    require(q >= 2, "q must be at least 2");
    require(d >= 0.0 && std::isfinite(d), "d must be finite and nonnegative");
    const double lo = -1.0 / (q - 1);
    require(lambda >= lo && lambda <= 1.0,
            "lambda must lie in [-1/(q-1), 1]; got " + std::to_string(lambda));
    SymmetricParams s{q, d, lambda};
    // Clamp rounding at the corners so cin/cout are never negative.
    const double cin = std::max(0.0, s.cin());
    const double cout = std::max(0.0, s.cout());
    Matrix M = Matrix::Constant(q, q, cout);
    M.diagonal().setConstant(cin);
    ModelParams p(Vector::Constant(q, 1.0 / q), std::move(M));
    // Closed-form spectrum {1, lambda x (q-1)}; avoids eigensolver noise in the degenerate block.
    p.eig_.assign(q, lambda);
    p.eig_[0] = 1.0;
    if (d == 0.0) std::fill(p.eig_.begin() + 1, p.eig_.end(), 0.0);
    p.d_ = d;
    p.sym_ = s;
    return p;
}

std::vector<double> spectrum(const ModelParams& params)
{
    return params.eigenvalues();
}

double trace_power(const ModelParams& params, int m)
{
    require(m >= 1, "trace_power needs m >= 1");
    double t = 0.0;
    for (double l : params.eigenvalues()) t += std::pow(l, m);
    return t;
}

ModelParams params_from_json(const nlohmann::json& j)
{
    try {
        if (j.contains("pi") || j.contains("M")) {
            const auto pi = j.at("pi").get<std::vector<double>>();
            const auto rows = j.at("M").get<std::vector<std::vector<double>>>();
            const auto q = static_cast<Eigen::Index>(pi.size());
            require(static_cast<Eigen::Index>(rows.size()) == q, "M must have q rows");
            Matrix M(q, q);
            for (Eigen::Index i = 0; i < q; ++i) {
                require(static_cast<Eigen::Index>(rows[i].size()) == q, "M must be square");
                for (Eigen::Index k = 0; k < q; ++k) M(i, k) = rows[i][k];
            }
            return ModelParams(Eigen::Map<const Vector>(pi.data(), q), std::move(M));
        }
        return build_symmetric(j.at("q").get<int>(), j.at("d").get<double>(), j.at("lambda").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad parameter document: ") + e.what());
    }
}

nlohmann::json params_to_json(const ModelParams& params)
{
    if (const auto& s = params.symmetric()) return {{"q", s->q}, {"d", s->d}, {"lambda", s->lambda}};
    std::vector<double> pi(params.pi().data(), params.pi().data() + params.q());
    std::vector<std::vector<double>> M(params.q(), std::vector<double>(params.q()));
    for (int i = 0; i < params.q(); ++i)
        for (int k = 0; k < params.q(); ++k) M[i][k] = params.M()(i, k);
    return {{"pi", pi}, {"M", M}};
}

} // namespace sbm
