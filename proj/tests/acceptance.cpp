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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "oracles.hpp"

#include "sbm/cycles.hpp"
#include "sbm/detection.hpp"
#include "sbm/qfunctional.hpp"
#include "sbm/rng.hpp"
#include "sbm/second_moment.hpp"
#include "sbm/thresholds.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace sbm;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) { char b[64]; std::snprintf(b, sizeof b, f, a); return b; }

Outcome lambda_star_table_check()
{
    const std::vector<std::pair<int, double>> published{{5, -0.239},  {6, -0.166},  {7, -0.112},   {8, -0.070},
                                                    {9, -0.036},  {11, 0.014},  {20, 0.127},   {100, 0.286},
                                                    {1000, 0.372}, {10000, 0.410}};
    Outcome o;
    double worst = 0.0;
    for (const auto& [q, ref] : published) {
        const double got = lambda_star(q);
        worst = std::max(worst, std::abs(got - ref));
        if (!(std::abs(got - ref) <= 1.5e-3)) {
            o.pass = false;
            o.detail += "q=" + std::to_string(q) + " got " + fmt("%.6f", got) + "; ";
        }
    }
    o.detail += "max |diff| " + fmt("%.2e", worst) + ", q=10 computed " + fmt("%.6f", lambda_star(10)) +
                " (published -0.08)";
    return o;
}

Outcome closed_form_corners()
{
    Outcome o;
    double worst = 0.0;
    for (int q = 3; q <= 50; ++q) {
        const double got = d_upper(q, -1.0 / (q - 1));
        const double ref = 2 * std::log(double(q)) / -std::log(1 - 1.0 / q);
        worst = std::max(worst, std::abs(got - ref));
        if (!(std::abs(got - ref) <= 1e-10) || !(got < 2 * q * std::log(double(q)))) {
            o.pass = false;
            o.detail += "coloring q=" + std::to_string(q) + " " + fmt("%.12g", got) + "; ";
        }
    }
    for (int q = 2; q <= 50; ++q)
        if (d_upper(q, 1.0) != 2.0) {
            o.pass = false;
            o.detail += "d_upper(" + std::to_string(q) + ", 1) = " + fmt("%.17g", d_upper(q, 1.0)) + "; ";
        }
    o.detail += "max coloring |diff| " + fmt("%.2e", worst);
    return o;
}

Outcome asymptotic_ratio_check()
{
    Outcome o;
    const int q = 1000000;
    for (double mu : {-1.0, -0.5, 0.5, 1.0}) {
        const double lam = mu / q;
        const double ratio = d_upper(q, lam) / d_lower(q, lam);
        const double ref = asymptotic_ratio(mu);
        const double rel = std::abs(ratio - ref) / ref;
        if (!(rel < 0.02)) o.pass = false;
        o.detail += "mu=" + fmt("%g", mu) + " ratio " + fmt("%.4f", ratio) + " rel " + fmt("%.1e", rel) + "; ";
    }
    if (!(std::abs(asymptotic_ratio(-1.0) - 1.0) < 1e-12)) o.pass = false;
    return o;
}

Outcome sufficiency_check()
{
    Outcome o;
    OptimizerOptions opts;
    opts.restarts = 32;
    opts.seed = 2026;
    int points = 0, skipped = 0;
    double worst_phi = -1e300, min_q_above = 1e300, max_q_below = -1e300;
    for (int q = 3; q <= 8; ++q) {
        for (double lam : {0.1, -0.1, 0.3, -0.3, -1.0 / (q - 1)}) {
            if (lam < -1.0 / (q - 1)) {
                ++skipped;
                continue;
            }
            ++points;
            const double d = 0.95 * d_lower(q, lam);
            const auto pm = phi_max(q, d, lam, opts);
            const auto v = sufficiency_verdict(build_symmetric(q, d, lam), opts);
            worst_phi = std::max(worst_phi, pm.value);
            max_q_below = std::max(max_q_below, v.q.value);
            if (!(pm.value <= 1e-8) || v.verdict != Verdict::contiguous_nondetectable) {
                o.pass = false;
                o.detail += "q=" + std::to_string(q) + " lambda=" + fmt("%g", lam) + " failed; ";
            }
            const auto above = build_symmetric(q, 1.05 / (lam * lam), lam);
            const auto qa = q_value(above.pi(), scaled_connectivity(above), opts);
            min_q_above = std::min(min_q_above, qa.value);
            if (!(qa.value > 1.0)) {
                o.pass = false;
                o.detail += "Q<=1 at q=" + std::to_string(q) + " lambda=" + fmt("%g", lam) + "; ";
            }
        }
    }
    o.detail += std::to_string(points) + " points (" + std::to_string(skipped) +
                " infeasible lambda=-0.3 skipped), max phi " + fmt("%.1e", worst_phi) + ", max Q below " +
                fmt("%.4f", max_q_below) + ", min Q above " + fmt("%.4f", min_q_above);
    return o;
}

Outcome q2_oracle_check()
{
    Outcome o;
    Rng rng(505);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double lam = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.05 + 0.9 * rng.uniform());
        const double d = (0.02 + 0.96 * rng.uniform()) / (lam * lam);
        const auto p = build_symmetric(2, d, lam);
        const double got = q_value(p.pi(), scaled_connectivity(p)).value;
        const double ref = std::max(oracle::q2_grid_Q(d, lam, 20000), d * lam * lam);
        worst = std::max(worst, std::abs(got - ref));
    }
    o.pass = worst <= 1e-4;
    o.detail = "20 points, max |Q - grid| " + fmt("%.2e", worst);
    return o;
}

Outcome cycle_check()
{
    Outcome o;
    const auto rows = cycle_poisson_check(build_symmetric(2, 3.0, 0.6), 5000, 5, 200, 77);
    for (const auto& r : rows) {
        const double zp = (r.mean_P - r.target_P) / r.se_P;
        const double zq = (r.mean_Q - r.target_Q) / r.se_Q;
        if (!(std::abs(zp) < 4.0 && std::abs(zq) < 4.0)) o.pass = false;
        o.detail += "m=" + std::to_string(r.m) + " zP " + fmt("%+.2f", zp) + " zQ " + fmt("%+.2f", zq) + "; ";
    }
    return o;
}

Outcome second_moment_oracle_check()
{
    Outcome o;
    Rng rng(707);
    double worst = 0.0;
    int cases = 0;
    for (int n : {6, 8, 10})
        for (int t = 0; t < 10; ++t) {
            const double lam = -1.0 + 2.0 * rng.uniform();
            const double d = 0.2 + 2.8 * rng.uniform();
            const auto p = build_symmetric(2, d, lam);
            const double ref = oracle::second_moment_bruteforce(p, n, default_window(n));
            const double got = exact_second_moment(p, n).exact_value;
            worst = std::max(worst, std::abs(got - ref) / ref);
            ++cases;
        }
    o.pass = worst <= 1e-13;
    o.detail = std::to_string(cases) + " cases, max relative error " + fmt("%.2e", worst);
    return o;
}

Outcome second_moment_trend_check()
{
    Outcome o;
    const double target = psi(0.5);
    std::ostringstream os;
    double prev_gap = 1e300;
    for (int n : {50, 100, 200}) {
        const double v = exact_second_moment(build_symmetric(2, 2.0, 0.5), n).exact_value;
        const double gap = std::abs(v - target);
        if (!(std::isfinite(v) && v <= 1.2 && gap < prev_gap)) o.pass = false;
        prev_gap = gap;
        os << "n=" << n << ' ' << fmt("%.6f", v) << ' ';
    }
    os << "(psi " << fmt("%.6f", target) << "); above: ";
    double prev = 0.0;
    for (int n : {50, 100, 200}) {
        const double v = exact_second_moment(build_symmetric(2, 1.2 / 0.25, 0.5), n).exact_value;
        if (!(v > prev)) o.pass = false;
        prev = v;
        os << fmt("%.4g", v) << ' ';
    }
    o.detail = os.str();
    return o;
}

Outcome identity_check()
{
    Outcome o;
    double worst = 0.0;
    for (int q : {2, 3, 5})
        for (double x : {0.25, 0.5, 0.9})
            for (double lam : {0.5, -0.2}) {
                const auto r = small_subgraph_identity(build_symmetric(q, x / (lam * lam), lam), 2000);
                worst = std::max(worst, r.gap);
            }
    o.pass = worst <= 1e-10;
    o.detail = "max gap " + fmt("%.2e", worst);
    return o;
}

Outcome property_check()
{
    Outcome o;
    Rng rng(1010);
    int birkhoff_bad = 0, entropy_bad = 0, an_bad = 0, kl_bad = 0, posterior_bad = 0;
    for (int t = 0; t < 10000; ++t) {
        const int q = 2 + static_cast<int>(rng.below(5));
        const std::size_t n = q * (1 + rng.below(30));
        const auto a = oracle::random_balanced(q, n, rng());
        const auto b = oracle::random_balanced(q, n, rng());
        if (!birkhoff_bound_check(a, b).ok) ++birkhoff_bad;
        if (average_row_entropy(overlap_matrix(a, b).alpha) > entropy_at_overlap(q, overlap(a, b)) + 1e-12)
            ++entropy_bad;
    }
    for (int t = 0; t < 10000; ++t) {
        const int q = 2 + static_cast<int>(rng.below(6));
        const double spread = 1.0 + 15.0 * rng.uniform();
        Matrix x(q, q);
        for (int i = 0; i < x.size(); ++i) x.data()[i] = std::exp(spread * (rng.uniform() - 0.5));
        const Matrix a = sinkhorn(x, Vector::Ones(q), Vector::Ones(q));
        if (average_row_entropy(a) > an_entropy_bound(q, a.squaredNorm()) + 1e-9) ++an_bad;
    }
    for (int t = 0; t < 10000; ++t) {
        const int m = 2 + static_cast<int>(rng.below(8));
        std::vector<double> p(m), r(m);
        double sp = 0, sr = 0;
        for (int i = 0; i < m; ++i) {
            sp += p[i] = rng.uniform_pos();
            sr += r[i] = rng.uniform_pos();
        }
        for (int i = 0; i < m; ++i) {
            p[i] /= sp;
            r[i] /= sr;
        }
        if (!(kl_divergence(p, r) > 0.0) || kl_divergence(p, p) != 0.0) ++kl_bad;
    }
    for (int t = 0; t < 100; ++t) {
        const int q = 2 + static_cast<int>(rng.below(2));
        const std::size_t n = q == 2 ? 4 + rng.below(8) : 4 + rng.below(4);
        const double d = 0.5 + 2.0 * rng.uniform();
        const auto s = sample_sbm(build_symmetric(q, d, 0.0), n, rng());
        const Matrix post = exact_posteriors(s.graph, build_symmetric(q, d, 0.0));
        if ((post.array() - 1.0 / q).abs().maxCoeff() > 1e-12) ++posterior_bad;
    }
    o.pass = birkhoff_bad + entropy_bad + an_bad + kl_bad + posterior_bad == 0;
    o.detail = "violations: Birkhoff " + std::to_string(birkhoff_bad) + ", overlap entropy " +
               std::to_string(entropy_bad) + ", entropy bound " + std::to_string(an_bad) + ", KL " +
               std::to_string(kl_bad) + ", flat posterior " + std::to_string(posterior_bad);
    return o;
}

Outcome bayes_check()
{
    Outcome o;
    const auto flat = bayes_overlap_experiment(build_symmetric(2, 4.0, 0.0), 12, 400, 31);
    const auto weak = bayes_overlap_experiment(build_symmetric(2, 4.0, 0.2), 12, 400, 32);
    const auto strong = bayes_overlap_experiment(build_symmetric(2, 4.0, 0.9), 12, 400, 33);
    o.pass = flat.ci_low <= 0.0 && 0.0 <= flat.ci_high && strong.mean > weak.mean;
    o.detail = "lambda=0 " + fmt("%.4f", flat.mean) + " [" + fmt("%.4f", flat.ci_low) + ", " +
               fmt("%.4f", flat.ci_high) + "], lambda=0.2 " + fmt("%.4f", weak.mean) + " +/- " +
               fmt("%.4f", weak.se) + ", lambda=0.9 " + fmt("%.4f", strong.mean) + " +/- " + fmt("%.4f", strong.se);
    return o;
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "lambda-star table", 10, lambda_star_table_check},
        {2, "closed-form corners", 1, closed_form_corners},
        {3, "asymptotic ratio", 1, asymptotic_ratio_check},
        {4, "Q and Phi sufficiency", 120, sufficiency_check},
        {5, "q=2 Q grid oracle", 30, q2_oracle_check},
        {6, "cycle Poisson means", 120, cycle_check},
        {7, "second-moment enumeration oracle", 60, second_moment_oracle_check},
        {8, "second-moment convergence trend", 300, second_moment_trend_check},
        {9, "small-subgraph identity", 1, identity_check},
        {10, "property suites", 120, property_check},
        {11, "Bayes overlap", 180, bayes_check},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.time_limit;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %2d %s: %s  %s  [%.2fs, limit %.0fs%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs, c.time_limit, in_time ? "" : ", too slow");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
