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

#include "sbm/sweep.hpp"

#include "sbm/cycles.hpp"
#include "sbm/detection.hpp"
#include "sbm/error.hpp"
#include "sbm/qfunctional.hpp"
#include "sbm/rng.hpp"
#include "sbm/second_moment.hpp"
#include "sbm/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

namespace sbm {

namespace {

using nlohmann::json;

const char* const kGridKeys[] = {"q", "lambda", "d", "n"};

std::vector<json> as_list(const json& v)
{
    if (v.is_array()) return {v.begin(), v.end()};
    return {v};
}

// Cartesian product over the list-valued grid keys; other keys pass through.
std::vector<json> expand(const json& exp)
{
    std::vector<json> points{json::object()};
    for (const char* key : kGridKeys) {
        if (!exp.contains(key)) continue;
        std::vector<json> next;
        for (const auto& p : points)
            for (const auto& v : as_list(exp.at(key))) {
                json q = p;
                q[key] = v;
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    return points;
}

template <class T>
T get(const json& exp, const json& point, const char* key)
{
    if (point.contains(key)) return point.at(key).get<T>();
    if (!exp.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return exp.at(key).get<T>();
}

template <class T>
T get_or(const json& exp, const char* key, T fallback)
{
    return exp.contains(key) ? exp.at(key).get<T>() : fallback;
}

double resolve_d(const json& dj, int q, double lambda)
{
    if (dj.is_number()) return dj.get<double>();
    require(dj.is_object(), "d must be a number or {\"multiplier\", \"of\"}");
    const double mult = dj.at("multiplier").get<double>();
    const auto of = dj.at("of").get<std::string>();
    double base;
    if (of == "d_lower") base = d_lower(q, lambda);
    else if (of == "d_upper") base = d_upper(q, lambda);
    else if (of == "kesten_stigum") base = kesten_stigum(lambda);
    else throw ValidationError("unknown threshold '" + of + "'");
    require(std::isfinite(base), "threshold is infinite at this lambda");
    return mult * base;
}

Row base_row(const std::string& type, std::size_t exp_idx, std::size_t row_idx, std::uint64_t seed, const json& point)
{
    Row r;
    r["experiment"] = type;
    r["experiment_index"] = exp_idx;
    r["row"] = row_idx;
    r["seed"] = seed;
    for (const char* key : kGridKeys)
        if (point.contains(key)) r[key] = point.at(key);
    r["status"] = "ok";
    return r;
}

using RowFn = std::function<std::vector<Row>(const json& exp, const json& point, std::uint64_t seed, Row base)>;

std::vector<Row> thresholds_rows(const json& exp, const json& point, std::uint64_t, Row r)
{
    const int q = get<int>(exp, point, "q");
    const double lambda = get<double>(exp, point, "lambda");
    std::optional<double> d;
    if (point.contains("d")) d = resolve_d(point.at("d"), q, lambda);
    const auto j = to_json(threshold_report(q, lambda, d));
    for (const char* key : {"d", "d_upper", "d_lower", "lower_bound", "ks", "lambda_star", "beta", "regime"})
        r[key] = j.at(key);
    return {r};
}

std::vector<Row> lambda_star_rows(const json& exp, const json& point, std::uint64_t, Row r)
{
    const auto row = lambda_star_table({get<int>(exp, point, "q")}).front();
    r["lambda_star"] = row.lambda_star ? Row(*row.lambda_star) : Row(nullptr);
    r["note"] = row.note;
    return {r};
}

std::vector<Row> q_sweep_rows(const json& exp, const json& point, std::uint64_t seed, Row r)
{
    const int q = get<int>(exp, point, "q");
    const double lambda = get<double>(exp, point, "lambda");
    const double d = resolve_d(get<json>(exp, point, "d"), q, lambda);
    OptimizerOptions opts;
    opts.restarts = get_or<int>(exp, "restarts", 32);
    opts.seed = seed;
    const auto params = build_symmetric(q, d, lambda);
    const auto verdict = sufficiency_verdict(params, opts);
    const auto pm = phi_max(q, d, lambda, opts);
    r["d"] = d;
    r["Q"] = ext_number(verdict.q.value);
    r["hessian_ratio"] = ext_number(verdict.q.hessian_ratio);
    r["phi_max"] = ext_number(pm.value);
    r["verdict"] = to_string(verdict.verdict);
    r["restarts"] = opts.restarts;
    return {r};
}

std::vector<Row> cycles_rows(const json& exp, const json& point, std::uint64_t seed, Row base)
{
    const int q = get<int>(exp, point, "q");
    const double lambda = get<double>(exp, point, "lambda");
    const double d = resolve_d(get<json>(exp, point, "d"), q, lambda);
    const auto checks = cycle_poisson_check(build_symmetric(q, d, lambda), get<std::size_t>(exp, point, "n"),
                                            get_or<int>(exp, "m_max", 5), get_or<int>(exp, "reps", 200), seed);
    std::vector<Row> rows;
    for (const auto& c : checks) {
        Row r = base;
        r["d"] = d;
        r["m"] = c.m;
        r["mean_P"] = c.mean_P;
        r["se_P"] = c.se_P;
        r["target_P"] = c.target_P;
        r["mean_Q"] = c.mean_Q;
        r["se_Q"] = c.se_Q;
        r["target_Q"] = c.target_Q;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<Row> second_moment_rows(const json& exp, const json& point, std::uint64_t, Row r)
{
    const int q = get<int>(exp, point, "q");
    const double lambda = get<double>(exp, point, "lambda");
    const double d = resolve_d(get<json>(exp, point, "d"), q, lambda);
    SecondMomentOptions opts;
    if (exp.contains("a_n")) opts.a_n = exp.at("a_n").get<double>();
    const auto rec = exact_second_moment(build_symmetric(q, d, lambda), get<int>(exp, point, "n"), opts);
    r["d"] = d;
    r["a_n"] = rec.a_n;
    r["exact_value"] = ext_number(rec.exact_value);
    r["asymptote"] = ext_number(rec.asymptote);
    r["omega_probability"] = rec.omega_probability;
    r["conditioned_value"] = ext_number(rec.conditioned_value);
    r["count_matrices"] = rec.matrices;
    return {r};
}

std::vector<Row> bayes_rows(const json& exp, const json& point, std::uint64_t seed, Row r)
{
    const int q = get<int>(exp, point, "q");
    const double lambda = get<double>(exp, point, "lambda");
    const double d = resolve_d(get<json>(exp, point, "d"), q, lambda);
    const auto res = bayes_overlap_experiment(build_symmetric(q, d, lambda), get<std::size_t>(exp, point, "n"),
                                              get_or<int>(exp, "reps", 100), seed);
    r["d"] = d;
    r["reps"] = res.reps;
    r["mean_overlap"] = res.mean;
    r["se"] = res.se;
    r["ci_low"] = res.ci_low;
    r["ci_high"] = res.ci_high;
    return {r};
}

const std::map<std::string, RowFn>& registry()
{
    static const std::map<std::string, RowFn> table{
        {"thresholds", thresholds_rows}, {"lambda_star", lambda_star_rows}, {"q_sweep", q_sweep_rows},
        {"cycles", cycles_rows},         {"second_moment", second_moment_rows}, {"bayes_overlap", bayes_rows},
    };
    return table;
}

std::string csv_cell(const Row& v)
{
    if (v.is_null()) return "";
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }
    return v.dump();
}

} // namespace

Row ext_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Dataset run_sweep(const json& config)
{
    require(config.is_object(), "config must be a JSON object");
    require(config.contains("experiments") && config.at("experiments").is_array(), "config needs an 'experiments' array");
    const auto master = config.value("master_seed", std::uint64_t{0});
    const auto& experiments = config.at("experiments");
    for (const auto& exp : experiments) {
        require(exp.is_object() && exp.contains("type"), "each experiment needs a 'type'");
        require(registry().count(exp.at("type").get<std::string>()) == 1,
                "unknown experiment type '" + exp.at("type").get<std::string>() + "'");
    }

    Dataset ds;
    ds.provenance["tool"] = "sbmthresh";
    ds.provenance["config_hash"] = fnv1a_hex(config.dump());
    ds.provenance["master_seed"] = master;
    for (std::size_t e = 0; e < experiments.size(); ++e) {
        const auto& exp = experiments[e];
        const auto type = exp.at("type").get<std::string>();
        const auto& fn = registry().at(type);
        const auto points = expand(exp);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const std::uint64_t seed = derive_seed(master, (static_cast<std::uint64_t>(e) << 32) | k);
            Row base = base_row(type, e, k, seed, points[k]);
            try {
                for (auto& r : fn(exp, points[k], seed, base)) ds.rows.push_back(std::move(r));
            } catch (const std::exception& ex) {
                base["status"] = "error";
                base["error"] = ex.what();
                ds.rows.push_back(std::move(base));
            }
        }
    }
    return ds;
}

Dataset run_sweep_file(const std::string& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open config '" + path + "'");
    json config;
    try {
        in >> config;
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    return run_sweep(config);
}

void write_json(std::ostream& os, const Dataset& ds)
{
    Row out;
    out["provenance"] = ds.provenance;
    out["rows"] = Row::array();
    for (const auto& r : ds.rows) out["rows"].push_back(r);
    os << out.dump(2) << '\n';
}

void write_csv(std::ostream& os, const Dataset& ds)
{
    for (const auto& [key, value] : ds.provenance.items()) os << "# " << key << '=' << csv_cell(value) << '\n';
    std::vector<std::string> columns;
    for (const auto& r : ds.rows)
        for (const auto& [key, value] : r.items())
            if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    if (!columns.empty()) os << '\n';
    for (const auto& r : ds.rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ',';
            if (r.contains(columns[c])) os << csv_cell(r.at(columns[c]));
        }
        os << '\n';
    }
}

} // namespace sbm
