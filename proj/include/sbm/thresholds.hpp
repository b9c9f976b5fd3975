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

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sbm {

/// (1 + x) log(1 + x) - x for x >= -1, equal to 1 at x = -1. Accurate near 0.
double kl_term(double x);

/// First-moment bound 2q log q / [(1+(q-1)l) log(1+(q-1)l) + (q-1)(1-l) log(1-l)].
/// +inf at lambda = 0.
double d_upper(int q, double lambda);

/// Second-moment bound 2 log(q-1) / ((q-1) lambda^2); +inf at lambda = 0,
/// and 0 (vacuous) when q = 2.
double d_lower(int q, double lambda);

/// 1 / lambda^2; +inf at lambda = 0.
double kesten_stigum(double lambda);

/// Root of d_upper(q, l) = 1/l^2 on (-1/(q-1), 1). Below it the first-moment
/// bound beats Kesten-Stigum. Throws NumericalError when no crossing exists
/// (q <= 4).
double lambda_star(int q);

/// Exponential rate lim (1/n) log Pr[a fixed balanced partition is good] in G(n, d/n).
double good_rate(int q, double d, double lambda);

/// Right-hand side of the overlap guarantee equation as a function of beta.
double overlap_guarantee_rhs(int q, double lambda, double beta);

/// Smallest beta in (0, 1 - 1/q] with overlap_guarantee_rhs(beta) = d.
/// Requires d > d_upper(q, lambda).
double beta_guarantee(int q, double lambda, double d);

/// mu^2 / ((1+mu) log(1+mu) - mu); equals 1 at mu = -1 and 2 in the mu -> 0 limit.
double asymptotic_ratio(double mu);

enum class Regime { contiguous, gap, detectable_above_upper };
std::string to_string(Regime r);

struct ThresholdReport {
    int q = 2;
    double lambda = 0.0;
    std::optional<double> d;
    double d_upper = 0.0;
    double d_lower = 0.0;
    bool lower_vacuous = false;
    double ks = 0.0;
    std::optional<double> lambda_star;
    std::optional<double> beta;
    std::optional<Regime> regime;
};

ThresholdReport threshold_report(int q, double lambda, std::optional<double> d = std::nullopt);
nlohmann::json to_json(const ThresholdReport& r);

struct LambdaStarRow {
    int q = 5;
    std::optional<double> lambda_star;
    std::string note;
};

std::vector<LambdaStarRow> lambda_star_table(const std::vector<int>& qs);

} // namespace sbm
