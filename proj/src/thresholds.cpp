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

#include "sbm/thresholds.hpp"

#include "sbm/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace sbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTol = 1e-10;
constexpr int kMaxBisect = 200;

void check_lambda(int q, double lambda)
{
    require(q >= 2, "q must be at least 2");
    require(lambda >= -1.0 / (q - 1) && lambda <= 1.0, "lambda must lie in [-1/(q-1), 1]");
}

double xlogx_ratio(double a, double b)
{
    if (a == 0.0) return 0.0;
    return a * std::log(a / b);
}

// Entropy of a two-point distribution (x, 1 - x).
double h2(double x)
{
    auto g = [](double t) { return t > 0.0 ? -t * std::log(t) : 0.0; };
    return g(x) + g(1.0 - x);
}

// f(lo) and f(hi) of opposite sign; returns x with |hi - lo| < tol.
double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double flo = f(lo);
    for (int it = 0; it < kMaxBisect && hi - lo > kRootTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// KL-type denominator shared by d_upper and good_rate.
double first_moment_denominator(int q, double lambda)
{
    // Exact value at lambda = 1.
    if (lambda == 1.0) return q * std::log(static_cast<double>(q));
    return kl_term((q - 1) * lambda) + (q - 1) * kl_term(-lambda);
}

} // namespace

double kl_term(double x)
{
    require(x >= -1.0, "kl_term needs x >= -1");
    if (x == -1.0) return 1.0;
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return x2 * (0.5 - x / 6.0 + x2 / 12.0 - x2 * x / 20.0);
    }
    return (1.0 + x) * std::log1p(x) - x;
}

double d_upper(int q, double lambda)
{
    check_lambda(q, lambda);
    if (lambda == 0.0) return kInf;
    return 2.0 * q * std::log(static_cast<double>(q)) / first_moment_denominator(q, lambda);
}

double d_lower(int q, double lambda)
{
    require(q >= 2, "q must be at least 2");
    if (lambda == 0.0) return kInf;
    return 2.0 * std::log(q - 1.0) / (q - 1.0) / (lambda * lambda);
}

double kesten_stigum(double lambda)
{
    if (lambda == 0.0) return kInf;
    return 1.0 / (lambda * lambda);
}

double lambda_star(int q)
{
    require(q >= 2, "q must be at least 2");
    // gap(l) = d_upper * l^2 - 1, continuous through l = 0 with limit 4 log q / (q - 1) - 1.
    const double logq = std::log(static_cast<double>(q));
    auto gap = [&](double l) {
        if (l == 0.0) return 4.0 * logq / (q - 1.0) - 1.0;
        return 2.0 * q * logq * l * l / first_moment_denominator(q, l) - 1.0;
    };
    const double lo = -1.0 / (q - 1);
    constexpr int kScan = 4000;
    double prev_x = lo, prev = gap(lo);
    for (int k = 1; k <= kScan; ++k) {
        const double x = lo + (1.0 - lo) * k / kScan;
        const double cur = gap(x);
        if (prev < 0.0 && cur >= 0.0) return bisect(gap, prev_x, x);
        prev_x = x;
        prev = cur;
    }
    throw NumericalError("d_upper never drops below 1/lambda^2 for q = " + std::to_string(q) +
                         " (disassortative-only crossing requires q >= 5)");
}

double good_rate(int q, double d, double lambda)
{
    check_lambda(q, lambda);
    return -d / (2.0 * q) * first_moment_denominator(q, lambda);
}

double overlap_guarantee_rhs(int q, double lambda, double beta)
{
    check_lambda(q, lambda);
    const double top = 1.0 - 1.0 / q;
    require(beta >= 0.0 && beta <= top, "beta must lie in [0, 1 - 1/q]");
    const double num = 2.0 * q * (h2(beta + 1.0 / q) + (top - beta) * std::log(q - 1.0));
    const double a = 1.0 + (q - 1) * lambda;
    const double c = (q - 1) * (1.0 - lambda);
    const double b = 1.0 + q * beta * lambda;
    const double e = q - 1.0 - q * beta * lambda;
    const double den = xlogx_ratio(a, b) + xlogx_ratio(c, e);
    if (den <= 0.0) return kInf;
    return num / den;
}

double beta_guarantee(int q, double lambda, double d)
{
    check_lambda(q, lambda);
    const double du = d_upper(q, lambda);
    if (!(d > du)) throw ValidationError("no guarantee below d_c^upper");
    const double top = 1.0 - 1.0 / q;
    auto f = [&](double b) { return overlap_guarantee_rhs(q, lambda, b) - d; };
    // First upward crossing on a scan, then bisection.
    constexpr int kScan = 2000;
    const double eps = 1e-12;
    double prev_x = eps, prev = f(eps);
    if (prev >= 0.0) return eps;
    for (int k = 1; k <= kScan; ++k) {
        const double x = k == kScan ? top - eps : eps + (top - 2 * eps) * k / kScan;
        const double cur = f(x);
        if (prev < 0.0 && cur >= 0.0) return bisect(f, prev_x, x);
        prev_x = x;
        prev = cur;
    }
    return top;
}

double asymptotic_ratio(double mu)
{
    require(mu >= -1.0, "asymptotic_ratio needs mu >= -1");
    if (mu == 0.0) return 2.0;
    return mu * mu / kl_term(mu);
}

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::contiguous: return "contiguous";
    case Regime::gap: return "gap";
    case Regime::detectable_above_upper: return "detectable-above-upper";
    }
    return "unknown";
}

ThresholdReport threshold_report(int q, double lambda, std::optional<double> d)
{
    check_lambda(q, lambda);
    ThresholdReport r;
    r.q = q;
    r.lambda = lambda;
    r.d = d;
    r.d_upper = d_upper(q, lambda);
    r.d_lower = d_lower(q, lambda);
    r.lower_vacuous = q == 2;
    r.ks = kesten_stigum(lambda);
    if (q >= 5) r.lambda_star = lambda_star(q);
    if (d) {
        require(*d >= 0.0, "d must be nonnegative");
        if (*d > r.d_upper) {
            r.regime = Regime::detectable_above_upper;
            r.beta = beta_guarantee(q, lambda, *d);
        } else if (*d < r.d_lower) {
            r.regime = Regime::contiguous;
        } else {
            r.regime = Regime::gap;
        }
    }
    return r;
}

namespace {
nlohmann::json ext(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}
} // namespace

nlohmann::json to_json(const ThresholdReport& r)
{
    nlohmann::json j{{"q", r.q},
                     {"lambda", r.lambda},
                     {"d_upper", ext(r.d_upper)},
                     {"d_lower", ext(r.d_lower)},
                     {"lower_bound", r.lower_vacuous ? "vacuous" : "informative"},
                     {"ks", ext(r.ks)}};
    j["d"] = r.d ? nlohmann::json(*r.d) : nlohmann::json(nullptr);
    j["lambda_star"] = r.lambda_star ? nlohmann::json(*r.lambda_star) : nlohmann::json(nullptr);
    j["beta"] = r.beta ? nlohmann::json(*r.beta) : nlohmann::json(nullptr);
    j["regime"] = r.regime ? nlohmann::json(to_string(*r.regime)) : nlohmann::json(nullptr);
    return j;
}

std::vector<LambdaStarRow> lambda_star_table(const std::vector<int>& qs)
{
    std::vector<LambdaStarRow> rows;
    for (int q : qs) {
        LambdaStarRow row{q, std::nullopt, ""};
        try {
            row.lambda_star = lambda_star(q);
        } catch (const NumericalError& e) {
            row.note = "no crossing";
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace sbm
