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

#include "sbm/second_moment.hpp"

#include "sbm/error.hpp"
#include "sbm/qfunctional.hpp"

#include <cmath>
#include <functional>

namespace sbm {

namespace {

constexpr int kExactMultinomialMax = 30;
constexpr double kWindowTol = 1e-9;

// Neumaier-compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
        else comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Calls fn(parts) for every composition of total into k nonnegative parts.
void for_each_composition(int total, int k, std::vector<int>& parts, const std::function<void(const std::vector<int>&)>& fn)
{
    parts.assign(k, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == k - 1) {
            parts[idx] = left;
            fn(parts);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            parts[idx] = v;
            rec(idx + 1, left - v);
        }
    };
    if (k == 0) return;
    rec(0, total);
}

class Kernel {
public:
    Kernel(const ModelParams& params, int n, double a_n) : q_(params.q()), n_(n), a_n_(a_n), pi_(params.pi())
    {
        const int t = q_ * q_;
        log_pf_.resize(t * t);
        log_pipi_.resize(t);
        for (int i = 0; i < q_; ++i)
            for (int j = 0; j < q_; ++j) log_pipi_[i * q_ + j] = std::log(pi_[i] * pi_[j]);
        for (int a = 0; a < t; ++a)
            for (int b = 0; b < t; ++b) {
                const double s = params.M()(a / q_, b / q_);
                const double u = params.M()(a % q_, b % q_);
                log_pf_[a * t + b] = std::log(pair_factor(params.d(), n, s, u));
            }
        lfact_.resize(n + 1);
        for (int k = 0; k <= n; ++k) lfact_[k] = std::lgamma(k + 1.0);
    }

    static double pair_factor(double d, double n, double s, double t)
    {
        const double edge = d > 0.0 ? s * t / (n * d) : 0.0;
        return edge + (1.0 - s / n) * (1.0 - t / n) / (1.0 - d / n);
    }

    bool in_window(int count, int i) const { return std::abs(count - n_ * pi_[i]) <= a_n_ + kWindowTol; }

    double log_weight(const std::vector<int>& N) const
    {
        const int t = q_ * q_;
        double acc = 0.0;
        for (int a = 0; a < t; ++a) {
            if (N[a] == 0) continue;
            const double na = N[a];
            acc += 0.5 * na * (na - 1.0) * log_pf_[a * t + a];
            for (int b = a + 1; b < t; ++b)
                if (N[b] != 0) acc += na * N[b] * log_pf_[a * t + b];
        }
        return acc;
    }

    double term(const std::vector<int>& N) const
    {
        double rest = log_weight(N);
        for (int a = 0; a < q_ * q_; ++a)
            if (N[a] != 0) rest += N[a] * log_pipi_[a];
        if (n_ <= kExactMultinomialMax)
            return static_cast<double>(exact_multinomial(N)) * std::exp(rest);
        double lm = lfact_[n_];
        for (int v : N) lm -= lfact_[v];
        return std::exp(lm + rest);
    }

    // Enumerates rows [row, q) given the partially filled matrix; fn gets each complete matrix in Omega_n.
    void complete(std::vector<int>& N, int row, int left, const std::function<void(const std::vector<int>&)>& fn) const
    {
        if (row == q_) {
            if (left != 0) return;
            for (int j = 0; j < q_; ++j) {
                int c = 0;
                for (int i = 0; i < q_; ++i) c += N[i * q_ + j];
                if (!in_window(c, j)) return;
            }
            fn(N);
            return;
        }
        const int lo = row == q_ - 1 ? left : 0;
        for (int r = lo; r <= left; ++r) {
            if (!in_window(r, row)) continue;
            std::vector<int> parts;
            for_each_composition(r, q_, parts, [&](const std::vector<int>& p) {
                std::copy(p.begin(), p.end(), N.begin() + row * q_);
                complete(N, row + 1, left - r, fn);
            });
        }
        std::fill(N.begin() + row * q_, N.begin() + (row + 1) * q_, 0);
    }

    std::vector<std::vector<int>> first_rows() const
    {
        std::vector<std::vector<int>> rows;
        for (int r = 0; r <= n_; ++r) {
            if (!in_window(r, 0)) continue;
            std::vector<int> parts;
            for_each_composition(r, q_, parts, [&](const std::vector<int>& p) { rows.push_back(p); });
        }
        return rows;
    }

    double omega_probability() const
    {
        CompensatedSum acc;
        std::vector<int> parts;
        for_each_composition(n_, q_, parts, [&](const std::vector<int>& r) {
            double lp = lfact_[n_];
            for (int i = 0; i < q_; ++i) {
                if (!in_window(r[i], i)) return;
                lp += r[i] * std::log(pi_[i]) - lfact_[r[i]];
            }
            acc.add(std::exp(lp));
        });
        return acc.value();
    }

    int q() const { return q_; }
    int n() const { return n_; }

private:
    int q_;
    int n_;
    double a_n_;
    Vector pi_;
    std::vector<double> log_pf_;
    std::vector<double> log_pipi_;
    std::vector<double> lfact_;
};

SecondMomentRecord second_moment_impl(const ModelParams& params, int n, const SecondMomentOptions& opts, bool parallel)
{
    require(n >= 1, "n must be positive");
    require(params.d() < n, "need d/n < 1");
    require(params.M().maxCoeff() <= n, "M entries must not exceed n");
    const double a_n = opts.a_n.value_or(default_window(n));
    require(a_n >= 0.0, "window a_n must be nonnegative");
    if (count_matrix_total(params.q(), n) > opts.max_matrices)
        throw BudgetExceeded("second moment enumeration exceeds the count-matrix budget");

    const Kernel kernel(params, n, a_n);
    const auto rows = kernel.first_rows();
    const int q = kernel.q();
    std::vector<CompensatedSum> partial(parallel ? rows.size() : 1);
    std::vector<std::uint64_t> visited(partial.size(), 0);

    auto run = [&](std::size_t k, CompensatedSum& acc, std::uint64_t& count) {
        std::vector<int> N(static_cast<std::size_t>(q) * q, 0);
        std::copy(rows[k].begin(), rows[k].end(), N.begin());
        int r0 = 0;
        for (int v : rows[k]) r0 += v;
        kernel.complete(N, 1, n - r0, [&](const std::vector<int>& full) {
            acc.add(kernel.term(full));
            ++count;
        });
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(rows.size()); ++k) run(k, partial[k], visited[k]);
    } else {
        for (std::size_t k = 0; k < rows.size(); ++k) run(k, partial[0], visited[0]);
    }

    CompensatedSum total;
    SecondMomentRecord rec;
    for (std::size_t k = 0; k < partial.size(); ++k) {
        total.add(partial[k].sum);
        total.add(partial[k].comp);
        rec.matrices += visited[k];
    }
    rec.n = n;
    rec.exact_value = total.value();
    rec.asymptote = second_moment_product(params);
    rec.a_n = a_n;
    rec.omega_probability = kernel.omega_probability();
    rec.conditioned_value = rec.exact_value / (rec.omega_probability * rec.omega_probability);
    return rec;
}

} // namespace

int CountMatrix::n() const
{
    int s = 0;
    for (int v : N) s += v;
    return s;
}

Matrix CountMatrix::X(const Vector& pi) const
{
    require(pi.size() == q, "pi length must equal q");
    const double n = this->n();
    Matrix out(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) out(i, j) = ((*this)(i, j) - n * pi[i] * pi[j]) / std::sqrt(n);
    return out;
}

double log_pair_weight(const ModelParams& params, int n, const CountMatrix& N)
{
    require(N.q == params.q() && N.N.size() == static_cast<std::size_t>(N.q) * N.q, "count matrix shape mismatch");
    require(N.n() == n, "count matrix must sum to n");
    for (int v : N.N) require(v >= 0, "counts must be nonnegative");
    require(params.d() < n, "need d/n < 1");
    require(params.M().maxCoeff() <= n, "M entries must not exceed n");
    return Kernel(params, n, n).log_weight(N.N);
}

double pair_weight(const ModelParams& params, int n, const CountMatrix& N)
{
    return std::exp(log_pair_weight(params, n, N));
}

double log_multinomial(std::span<const int> counts)
{
    double n = 0.0, acc = 0.0;
    for (int c : counts) {
        require(c >= 0, "counts must be nonnegative");
        n += c;
        acc -= std::lgamma(c + 1.0);
    }
    return acc + std::lgamma(n + 1.0);
}

unsigned __int128 exact_multinomial(std::span<const int> counts)
{
    int n = 0;
    for (int c : counts) {
        require(c >= 0, "counts must be nonnegative");
        n += c;
    }
    require(n <= kExactMultinomialMax, "exact multinomial is limited to n <= 30");
    // Product of binomials C(placed + c, c), each built exactly step by step.
    unsigned __int128 out = 1;
    int placed = 0;
    for (int c : counts) {
        unsigned __int128 binom = 1;
        for (int k = 1; k <= c; ++k) binom = binom * (placed + k) / k;
        out *= binom;
        placed += c;
    }
    return out;
}

double default_window(int n)
{
    return std::pow(static_cast<double>(n), 2.0 / 3.0);
}

double count_matrix_total(int q, int n)
{
    const int k = q * q - 1;
    return std::exp(std::lgamma(n + k + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n + 1.0));
}

SecondMomentRecord exact_second_moment(const ModelParams& params, int n, const SecondMomentOptions& opts)
{
    return second_moment_impl(params, n, opts, true);
}

SecondMomentRecord exact_second_moment_serial(const ModelParams& params, int n, const SecondMomentOptions& opts)
{
    return second_moment_impl(params, n, opts, false);
}

} // namespace sbm
