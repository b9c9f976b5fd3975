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

#include "sbm/qfunctional.hpp"

#include "sbm/error.hpp"
#include "sbm/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace sbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEntryFloor = 1e-14;
constexpr double kSinkhornTol = 1e-14;
constexpr double kMarginalTol = 1e-12;
constexpr int kSinkhornWarmup = 32;
constexpr int kNewtonMaxIter = 50;
constexpr int kSinkhornMaxIter = 200000;
// A trial step whose projection stalls is rejected and retried with a shorter step.
constexpr int kStepSinkhornIter = 500;
// Ascent stops once the gain over this many accepted steps falls below kStallGain (relative).
constexpr int kStallWindow = 100;
constexpr double kStartMix = 1e-3;
constexpr double kStallGain = 1e-11;
// Below this D(alpha, p) the ascent has collapsed onto p; the quotient there is the Hessian ratio.
constexpr double kDegenerateKl = 1e-10;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double marginal_gap(const Matrix& x, const Vector& row, const Vector& col)
{
    return std::max((x.rowwise().sum() - row).cwiseAbs().maxCoeff(),
                    (x.colwise().sum().transpose() - col).cwiseAbs().maxCoeff());
}

// Damped Newton on the dual of the scaling problem, in log scalings a, b with b_last = 0.
bool newton_scale(Matrix& x, const Vector& row, const Vector& col)
{
    const auto m = x.rows(), n = x.cols();
    const Matrix base = x;
    Vector a = Vector::Zero(m), b = Vector::Zero(n);
    auto scaled = [&](const Vector& aa, const Vector& bb) {
        return Matrix(aa.array().exp().matrix().asDiagonal() * base * bb.array().exp().matrix().asDiagonal());
    };
    Matrix y = x;
    double err = marginal_gap(y, row, col);
    for (int it = 0; it < kNewtonMaxIter && err >= kSinkhornTol; ++it) {
        const Vector rs = y.rowwise().sum();
        const Vector cs = y.colwise().sum().transpose();
        const auto k = m + n - 1;
        Matrix H = Matrix::Zero(k, k);
        H.topLeftCorner(m, m) = rs.asDiagonal();
        H.block(0, m, m, n - 1) = y.leftCols(n - 1);
        H.block(m, 0, n - 1, m) = y.leftCols(n - 1).transpose();
        H.bottomRightCorner(n - 1, n - 1) = cs.head(n - 1).asDiagonal();
        Vector g(k);
        g << rs - row, (cs - col).head(n - 1);
        const Vector step = H.ldlt().solve(-g);
        if (!step.allFinite()) return false;
        bool moved = false;
        for (double t = 1.0; t > 1e-8; t *= 0.5) {
            Vector a2 = a + t * step.head(m);
            Vector b2 = b;
            b2.head(n - 1) += t * step.tail(n - 1);
            Matrix y2 = scaled(a2, b2);
            const double err2 = marginal_gap(y2, row, col);
            if (err2 < err) {
                a = std::move(a2);
                b = std::move(b2);
                y = std::move(y2);
                err = err2;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (err > kMarginalTol) return false;
    x = std::move(y);
    return true;
}

// Matrix scaling to the given marginals: Sinkhorn sweeps, then Newton if they stall.
// False if the marginals are still off by more than kMarginalTol.
bool sinkhorn_steps(Matrix& x, const Vector& row, const Vector& col, int max_iter)
{
    double err = kInf;
    for (int it = 0; it < max_iter; ++it) {
        x = (row.array() / x.rowwise().sum().array()).matrix().asDiagonal() * x;
        x = x * (col.array() / x.colwise().sum().transpose().array()).matrix().asDiagonal();
        err = (x.rowwise().sum() - row).cwiseAbs().maxCoeff();
        if (err < kSinkhornTol) return true;
        if (it == kSinkhornWarmup && newton_scale(x, row, col) && marginal_gap(x, row, col) < kSinkhornTol) return true;
        if (it % 64 == 63 && err <= kMarginalTol) return true;
    }
    return err <= kMarginalTol;
}

struct Objective {
    std::function<double(const Matrix&)> value;
    std::function<Matrix(const Matrix&)> gradient;
    std::function<bool(const Matrix&)> degenerate = [](const Matrix&) { return false; };
};

struct AscentResult {
    Matrix x;
    double value = -kInf;
    bool converged = false;
};

// Entropic mirror ascent: multiplicative step along the gradient, then the
// Sinkhorn (KL) projection back onto the polytope, with backtracking.
AscentResult ascend(const Objective& obj, const Matrix& start, const Vector& row, const Vector& col, int max_iter)
{
    AscentResult res;
    // Nudge boundary starts inward; Sinkhorn stalls on near-singular support patterns.
    res.x = ((1.0 - kStartMix) * start + kStartMix * row * col.transpose() / row.sum()).cwiseMax(kEntryFloor);
    if (!sinkhorn_steps(res.x, row, col, kSinkhornMaxIter)) return res;
    res.value = obj.value(res.x);
    double eta = 0.5;
    std::vector<double> history;
    for (int it = 0; it < max_iter; ++it) {
        if (obj.degenerate(res.x)) {
            res.converged = true;
            return res;
        }
        const Matrix g = obj.gradient(res.x);
        const double gmax = g.cwiseAbs().maxCoeff();
        if (!(gmax > 0.0) || !std::isfinite(gmax)) {
            res.converged = true;
            return res;
        }
        bool accepted = false;
        Matrix y;
        double fy = -kInf;
        while (eta > 1e-15) {
            y = (res.x.array() * (eta / gmax * g.array()).exp()).matrix().cwiseMax(kEntryFloor);
            const bool projected = sinkhorn_steps(y, row, col, kStepSinkhornIter);
            fy = projected ? obj.value(y) : -kInf;
            if (fy > res.value) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            res.converged = true;
            return res;
        }
        res.x = std::move(y);
        res.value = fy;
        eta = std::min(2.0 * eta, 4.0);
        history.push_back(fy);
        const auto h = history.size();
        const bool stalled = h > kStallWindow &&
                             fy - history[h - 1 - kStallWindow] < kStallGain * std::max(1.0, std::abs(fy));
        if (stalled) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

// Orthonormal basis of the complement of unit vector u, as columns.
Matrix complement_basis(const Vector& u)
{
    const auto q = u.size();
    Eigen::HouseholderQR<Matrix> qr{Matrix(u)};
    const Matrix full = qr.householderQ() * Matrix::Identity(q, q);
    return full.rightCols(q - 1);
}

struct TangentSpectrum {
    Vector values;   // eigenvalues of the compressed S
    Matrix vectors;  // corresponding directions in R^q (orthogonal to sqrt(pi))
};

TangentSpectrum tangent_spectrum(const Vector& pi, const Matrix& A)
{
    const Vector s = pi.array().sqrt();
    const Matrix S = s.asDiagonal() * (0.5 * (A + A.transpose())) * s.asDiagonal();
    const Matrix V = complement_basis(s);
    Eigen::SelfAdjointEigenSolver<Matrix> es(V.transpose() * S * V);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return {es.eigenvalues(), V * es.eigenvectors()};
}

Matrix random_positive(int q, Rng& rng)
{
    const double power = 1.0 + 7.0 * rng.uniform();
    Matrix x(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) x(i, j) = std::pow(rng.uniform_pos(), power) + 1e-9;
    return x;
}

// Doubly stochastic structured starts: identity mixtures and partial-identity blocks.
std::vector<Matrix> birkhoff_structured_starts(int q)
{
    std::vector<Matrix> starts;
    const Matrix J = Matrix::Constant(q, q, 1.0 / q);
    const Matrix I = Matrix::Identity(q, q);
    for (double t : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95, 0.999}) starts.push_back((1.0 - t) * J + t * I);
    // Disassortative direction: mass pushed off the diagonal.
    const double tneg = -1.0 / (q - 1);
    for (double s : {0.5, 0.9, 0.999}) starts.push_back((1.0 - s * tneg) * J + s * tneg * I);
    for (int k = 1; k < q; ++k) {
        for (double t : {0.6, 0.95}) {
            Matrix b = Matrix::Zero(q, q);
            b.topLeftCorner(k, k) = (1.0 - t) * Matrix::Constant(k, k, 1.0 / k) + t * Matrix::Identity(k, k);
            b.bottomRightCorner(q - k, q - k).setConstant(1.0 / (q - k));
            starts.push_back(b);
        }
    }
    return starts;
}

template <class Starts, class Run>
void run_restarts(const Starts& starts, bool parallel, Run&& run)
{
    const auto count = static_cast<int>(starts.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (int k = 0; k < count; ++k) run(k);
}

QResult q_value_impl(const Vector& pi, const Matrix& A, const OptimizerOptions& opts, bool parallel)
{
    const int q = static_cast<int>(pi.size());
    require(q >= 2 && A.rows() == q && A.cols() == q, "A_scaled must be q x q");
    require(opts.restarts >= 1, "restarts must be positive");
    const Matrix p = pi * pi.transpose();

    QResult out;
    out.hessian_ratio = hessian_ratio(pi, A);
    out.value = out.hessian_ratio;
    out.argmax = CouplingMatrix::product(pi);
    if (A.cwiseAbs().maxCoeff() == 0.0) {
        out.converged = true;
        return out;
    }

    // Starting points.
    std::vector<Matrix> starts;
    const bool uniform = (pi.array() - 1.0 / q).abs().maxCoeff() < 1e-15;
    if (uniform) {
        for (const auto& b : birkhoff_structured_starts(q)) starts.push_back(b / q);
    } else {
        const Matrix diag = pi.asDiagonal();
        for (double t : {0.2, 0.5, 0.8, 0.95, 0.999}) starts.push_back((1.0 - t) * p + t * diag);
    }
    const auto ts = tangent_spectrum(pi, A);
    const Vector s = pi.array().sqrt();
    for (Eigen::Index a : {Eigen::Index{0}, ts.values.size() - 1}) {
        const Vector v = ts.vectors.col(a);
        const Matrix delta = s.asDiagonal() * (v * v.transpose()) * s.asDiagonal();
        const double scale = p.minCoeff() / std::max(delta.cwiseAbs().maxCoeff(), 1e-300);
        for (double eps : {0.05, 0.5, 0.95}) {
            starts.push_back(p + eps * scale * delta);
            starts.push_back(p - eps * scale * delta);
        }
    }
    if (static_cast<int>(starts.size()) > opts.restarts) starts.resize(opts.restarts);
    for (int k = static_cast<int>(starts.size()); k < opts.restarts; ++k) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(k)));
        starts.push_back(random_positive(q, rng));
    }

    const Matrix At = A.transpose();
    Objective obj;
    obj.value = [&](const Matrix& x) { return q_quotient(pi, A, x); };
    obj.gradient = [&](const Matrix& x) {
        const Matrix delta = x - p;
        const double num = (delta.array() * (A * delta * At).array()).sum();
        const Matrix log_ratio = (x.array() / p.array()).log();
        const double den = (x.array() * log_ratio.array()).sum();
        const Matrix gnum = A * delta * At + At * delta * A;
        const Matrix gden = log_ratio.array() + 1.0;
        return Matrix((gnum - (num / den) * gden) / den);
    };
    obj.degenerate = [&](const Matrix& x) {
        return (x.array() * (x.array() / p.array()).log()).sum() < kDegenerateKl;
    };

    std::vector<AscentResult> results(starts.size());
    run_restarts(starts, parallel, [&](int k) { results[k] = ascend(obj, starts[k], pi, pi, opts.max_iter); });

    out.restarts_used = static_cast<int>(results.size());
    for (const auto& r : results) {
        out.restarts_converged += r.converged ? 1 : 0;
        if (r.value > out.value) {
            out.value = r.value;
            out.argmax.alpha = r.x;
        }
    }
    out.converged = out.restarts_converged > 0;
    return out;
}

} // namespace

double kl_divergence(std::span<const double> p, std::span<const double> pt)
{
    require(p.size() == pt.size(), "kl_divergence: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (pt[i] == 0.0) return kInf;
        acc += p[i] * std::log(p[i] / pt[i]);
    }
    return std::max(acc, 0.0);
}

double average_row_entropy(const Matrix& alpha)
{
    double acc = 0.0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) acc -= xlogx(alpha.data()[i]);
    return acc / static_cast<double>(alpha.rows());
}

Matrix sinkhorn(Matrix x, const Vector& row, const Vector& col)
{
    require(x.rows() == row.size() && x.cols() == col.size(), "sinkhorn: shape mismatch");
    require((x.array() > 0.0).all(), "sinkhorn needs a strictly positive matrix");
    if (!sinkhorn_steps(x, row, col, kSinkhornMaxIter)) throw NumericalError("sinkhorn did not reach the marginals");
    return x;
}

CouplingMatrix CouplingMatrix::product(const Vector& pi)
{
    return {pi, pi * pi.transpose()};
}

double CouplingMatrix::marginal_error() const
{
    return std::max((alpha.rowwise().sum() - pi).cwiseAbs().maxCoeff(),
                    (alpha.colwise().sum().transpose() - pi).cwiseAbs().maxCoeff());
}

Matrix scaled_connectivity(const ModelParams& params)
{
    if (params.d() == 0.0) return Matrix::Zero(params.q(), params.q());
    return params.A() / std::sqrt(2.0 * params.d());
}

double hessian_ratio(const Vector& pi, const Matrix& A_scaled)
{
    const auto ts = tangent_spectrum(pi, A_scaled);
    const double lo = ts.values.minCoeff();
    const double hi = ts.values.maxCoeff();
    return 2.0 * std::max(lo * lo, hi * hi);
}

double q_quotient(const Vector& pi, const Matrix& A, const Matrix& alpha)
{
    const Matrix p = pi * pi.transpose();
    const Matrix delta = alpha - p;
    double den = 0.0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        const double a = alpha.data()[i];
        if (a > 0.0) den += a * std::log(a / p.data()[i]);
    }
    if (den < kDegenerateKl) return hessian_ratio(pi, A);
    const double num = (delta.array() * (A * delta * A.transpose()).array()).sum();
    return num / den;
}

QResult q_value(const Vector& pi, const Matrix& A_scaled, const OptimizerOptions& opts)
{
    return q_value_impl(pi, A_scaled, opts, true);
}

QResult q_value_serial(const Vector& pi, const Matrix& A_scaled, const OptimizerOptions& opts)
{
    return q_value_impl(pi, A_scaled, opts, false);
}

double phi(const Matrix& alpha, double d, double lambda)
{
    const auto q = alpha.rows();
    require(alpha.cols() == q && q >= 2, "alpha must be square");
    require((alpha.array() >= -1e-15).all(), "alpha must be nonnegative");
    const double err = std::max((alpha.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                                (alpha.colwise().sum().array() - 1.0).abs().maxCoeff());
    require(err <= 1e-10, "alpha must be doubly stochastic");
    return average_row_entropy(alpha) - std::log(static_cast<double>(q)) +
           0.5 * d * lambda * lambda * (alpha.squaredNorm() - 1.0);
}

PhiMaxResult phi_max(int q, double d, double lambda, const OptimizerOptions& opts)
{
    require(q >= 2, "q must be at least 2");
    require(opts.restarts >= 1, "restarts must be positive");
    const double c = d * lambda * lambda;
    const Vector ones = Vector::Ones(q);
    const Matrix J = Matrix::Constant(q, q, 1.0 / q);

    std::vector<Matrix> starts = birkhoff_structured_starts(q);
    {
        Rng rng(derive_seed(opts.seed, 0xfeedULL));
        for (int k = 0; k < 4; ++k) {
            Matrix z(q, q);
            for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform() - 0.5;
            starts.push_back(J + 0.01 / q * z);
        }
        // Random permutation mixtures.
        for (int k = 0; k < 3; ++k) {
            std::vector<int> perm(q);
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = q - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
            Matrix P = Matrix::Zero(q, q);
            for (int i = 0; i < q; ++i) P(i, perm[i]) = 1.0;
            starts.push_back(0.3 * J + 0.7 * P);
        }
    }
    if (static_cast<int>(starts.size()) > opts.restarts) starts.resize(opts.restarts);
    for (int k = static_cast<int>(starts.size()); k < opts.restarts; ++k) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(k)));
        starts.push_back(random_positive(q, rng));
    }

    Objective obj;
    obj.value = [&](const Matrix& x) {
        double h = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) h -= xlogx(x.data()[i]);
        return h / q - std::log(static_cast<double>(q)) + 0.5 * c * (x.squaredNorm() - 1.0);
    };
    obj.gradient = [&](const Matrix& x) {
        return Matrix(-(x.array().log() + 1.0) / q + c * x.array());
    };

    std::vector<AscentResult> results(starts.size());
    run_restarts(starts, true, [&](int k) { results[k] = ascend(obj, starts[k], ones, ones, opts.max_iter); });

    PhiMaxResult out;
    out.argmax = J;
    out.value = phi(J, d, lambda);
    out.restarts_used = static_cast<int>(results.size());
    for (const auto& r : results) {
        out.restarts_converged += r.converged ? 1 : 0;
        if (r.value > out.value) {
            out.value = r.value;
            out.argmax = r.x;
        }
    }
    return out;
}

double an_f(int q, double r)
{
    const double inner = std::max(0.0, (q - 1.0) * (q * r - 1.0));
    const double x = std::min(1.0, (1.0 + std::sqrt(inner)) / q);
    const double y = std::max(0.0, (1.0 - x) / (q - 1.0));
    return -xlogx(x) - (q - 1.0) * xlogx(y);
}

double an_entropy_bound(int q, double rho)
{
    require(q >= 2, "q must be at least 2");
    require(rho >= 1.0 - 1e-12 && rho <= q + 1e-12, "rho must lie in [1, q]");
    rho = std::clamp(rho, 1.0, static_cast<double>(q));
    const double logq = std::log(static_cast<double>(q));
    const double m_max = q * (q - rho) / (q - 1.0);
    auto term = [&](double m) {
        if (q - m <= 1e-12 * q) return m / q * logq;
        const double r = (q * rho - m) / (q * (q - m));
        return m / q * logq + (1.0 - m / q) * an_f(q, r);
    };
    constexpr int kGrid = 10000;
    int best_k = 0;
    double best = term(0.0);
    for (int k = 1; k <= kGrid; ++k) {
        const double v = term(m_max * k / kGrid);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    // Golden-section refinement on the bracketing cells.
    double a = m_max * std::max(0, best_k - 1) / kGrid;
    double b = m_max * std::min(kGrid, best_k + 1) / kGrid;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = term(x1), f2 = term(x2);
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, m_max); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = term(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = term(x1);
        }
    }
    return std::max({best, f1, f2});
}

AnCheckResult an_inequality_check(int q, double delta, int rho_grid, int m_grid)
{
    require(q >= 2, "q must be at least 2");
    require(rho_grid >= 2 && m_grid >= 2, "grids need at least two points");
    const double f0 = an_f(q, 1.0 / q);
    AnCheckResult out;
    out.worst_violation = -kInf;
    for (int i = 0; i < rho_grid; ++i) {
        const double rho = 1.0 + (q - 1.0) * i / (rho_grid - 1);
        const double m_max = q * (q - rho) / (q - 1.0);
        for (int k = 0; k < m_grid; ++k) {
            const double m = m_max * k / (m_grid - 1);
            const double lhs = delta * (rho - 1.0) / ((q - 1.0) * (q - 1.0));
            double rhs = 0.0;
            if (q - m > 1e-12 * q) rhs = (1.0 - m / q) * (f0 - an_f(q, (q * rho - m) / (q * (q - m))));
            const double v = lhs - rhs;
            if (v > out.worst_violation) {
                out.worst_violation = v;
                out.worst_rho = rho;
                out.worst_m = m;
            }
        }
    }
    out.holds = out.worst_violation <= 1e-9;
    return out;
}

double log_psi(double x)
{
    if (x >= 1.0) return kInf;
    return -0.5 * std::log1p(-x) - 0.5 * x - 0.25 * x * x;
}

double psi(double x)
{
    return std::exp(log_psi(x));
}

double second_moment_product(const ModelParams& params)
{
    const auto& eig = params.eigenvalues();
    double acc = 0.0;
    for (std::size_t i = 1; i < eig.size(); ++i)
        for (std::size_t j = 1; j < eig.size(); ++j) {
            const double x = params.d() * eig[i] * eig[j];
            if (x >= 1.0) return kInf;
            acc += log_psi(x);
        }
    return std::exp(acc);
}

NuTerms nu_terms(const ModelParams& params)
{
    const Matrix B = params.B();
    const double d = params.d();
    const double trB = B.trace();
    const double trB2 = (B * B).trace();
    NuTerms out;
    out.nu1 = -0.5 * d * trB * trB;
    out.nu2 = -0.25 * d * d * trB2 * trB2;
    const auto& eig = params.eigenvalues();
    for (std::size_t i = 1; i < eig.size(); ++i)
        for (std::size_t j = 1; j < eig.size(); ++j) {
            const double x = d * eig[i] * eig[j];
            out.nu1_eig -= 0.5 * x;
            out.nu2_eig -= 0.25 * x * x;
        }
    return out;
}

IdentityCheck small_subgraph_identity(const ModelParams& params, int m_trunc)
{
    require(m_trunc >= 3, "m_trunc must be at least 3");
    const auto& eig = params.eigenvalues();
    const double sd = std::sqrt(params.d());
    IdentityCheck out;
    for (std::size_t i = 1; i < eig.size(); ++i)
        for (std::size_t j = 1; j < eig.size(); ++j) {
            const double x = params.d() * eig[i] * eig[j];
            if (std::abs(x) >= 1.0) out.divergent = true;
            else out.rhs += log_psi(x);
        }
    // mu_m delta_m^2 = (sum_{i>=2} (sqrt(d) lambda_i)^m)^2 / (2m)
    std::vector<double> s, powers;
    for (std::size_t i = 1; i < eig.size(); ++i) s.push_back(sd * eig[i]);
    powers.assign(s.size(), 1.0);
    for (auto k = 0u; k < s.size(); ++k) powers[k] = s[k] * s[k];
    double sum = 0.0, comp = 0.0;
    for (int m = 3; m <= m_trunc; ++m) {
        double delta = 0.0;
        for (auto k = 0u; k < s.size(); ++k) {
            powers[k] *= s[k];
            delta += powers[k];
        }
        const double term = delta * delta / (2.0 * m) - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    out.lhs = sum;
    if (out.divergent) {
        out.rhs = kInf;
        out.gap = kInf;
    } else {
        out.gap = std::abs(out.lhs - out.rhs);
    }
    return out;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::contiguous_nondetectable: return "CONTIGUOUS_NONDETECTABLE";
    case Verdict::second_moment_diverges: return "SECOND_MOMENT_DIVERGES";
    case Verdict::boundary: return "BOUNDARY";
    }
    return "UNKNOWN";
}

SufficiencyResult sufficiency_verdict(const ModelParams& params, const OptimizerOptions& opts)
{
    SufficiencyResult out;
    out.q = q_value(params.pi(), scaled_connectivity(params), opts);
    if (out.q.value < 1.0 - kBoundaryBand) out.verdict = Verdict::contiguous_nondetectable;
    else if (out.q.value > 1.0 + kBoundaryBand) out.verdict = Verdict::second_moment_diverges;
    else out.verdict = Verdict::boundary;
    return out;
}

nlohmann::json to_json(const QResult& r)
{
    const auto q = r.argmax.alpha.rows();
    std::vector<std::vector<double>> alpha(q, std::vector<double>(q));
    for (Eigen::Index i = 0; i < q; ++i)
        for (Eigen::Index j = 0; j < q; ++j) alpha[i][j] = r.argmax.alpha(i, j);
    return {{"value", r.value},
            {"hessian_ratio", r.hessian_ratio},
            {"argmax", alpha},
            {"restarts_used", r.restarts_used},
            {"restarts_converged", r.restarts_converged},
            {"converged", r.converged}};
}

} // namespace sbm
