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

// sbmthresh: command-line front end.

#include "sbm/cycles.hpp"
#include "sbm/detection.hpp"
#include "sbm/error.hpp"
#include "sbm/graph.hpp"
#include "sbm/model.hpp"
#include "sbm/qfunctional.hpp"
#include "sbm/rng.hpp"
#include "sbm/second_moment.hpp"
#include "sbm/sweep.hpp"
#include "sbm/thresholds.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace sbm;

struct Globals {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string format = "json";
    std::string out;
};

struct ModelArgs {
    int q = 2;
    double d = 1.0;
    double lambda = 0.0;
    std::string params_file;

    void attach(CLI::App* sub)
    {
        sub->add_option("--q", q, "number of groups")->check(CLI::Range(2, 1 << 20));
        sub->add_option("--d", d, "average degree");
        sub->add_option("--lambda", lambda, "second eigenvalue of T");
        sub->add_option("--params", params_file, "JSON file with {pi, M} or {q, d, lambda}");
    }

    ModelParams build() const
    {
        if (params_file.empty()) return build_symmetric(q, d, lambda);
        std::ifstream in(params_file);
        require(static_cast<bool>(in), "cannot open params file '" + params_file + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(std::string("malformed params file: ") + e.what());
        }
        return params_from_json(j);
    }
};

class Output {
public:
    explicit Output(const Globals& g) : g_(g)
    {
        if (!g.out.empty()) {
            file_ = std::make_unique<std::ofstream>(g.out);
            require(static_cast<bool>(*file_), "cannot write '" + g.out + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

    void emit(const std::string& command, Dataset ds)
    {
        ds.provenance["command"] = command;
        ds.provenance["seed"] = g_.seed;
        if (g_.format == "csv") write_csv(stream(), ds);
        else write_json(stream(), ds);
    }

private:
    const Globals& g_;
    std::unique_ptr<std::ofstream> file_;
};

Graph load_graph(const std::string& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open graph '" + path + "'");
    return read_edge_list(in);
}

Labeling load_labeling(const std::string& path, int q)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open labeling '" + path + "'");
    return read_labeling(in, q);
}

Row matrix_json(const Matrix& m)
{
    Row out = Row::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Row row = Row::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Thresholds, contiguity functionals and exact oracles for the sparse stochastic block model"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "output path (default stdout)");

    // gen
    auto* gen = app.add_subcommand("gen", "sample a planted or null graph");
    ModelArgs gen_model;
    gen_model.attach(gen);
    std::size_t gen_n = 100;
    std::string gen_kind = "sbm", gen_labels;
    gen->add_option("--n", gen_n, "number of vertices")->required();
    gen->add_option("--model", gen_kind, "sbm or er")->check(CLI::IsMember({"sbm", "er"}));
    gen->add_option("--labels", gen_labels, "write planted labels here");

    // thresholds
    auto* thr = app.add_subcommand("thresholds", "threshold bounds for the symmetric model");
    int thr_q = 2;
    double thr_lambda = 0.0;
    std::optional<double> thr_d;
    thr->add_option("--q", thr_q)->required();
    thr->add_option("--lambda", thr_lambda)->required();
    thr->add_option("--d", thr_d);

    // lambda-star
    auto* lst = app.add_subcommand("lambda-star", "crossing point of the upper bound and Kesten-Stigum");
    std::vector<int> lst_qs{5, 6, 7, 8, 9, 10, 11, 20, 100, 1000, 10000};
    lst->add_option("--q", lst_qs, "values of q");

    // q-functional
    auto* qf = app.add_subcommand("q-functional", "numerical supremum of Q and the sufficiency verdict");
    ModelArgs qf_model;
    qf_model.attach(qf);
    int qf_restarts = 32;
    qf->add_option("--restarts", qf_restarts)->check(CLI::PositiveNumber);

    // phi-scan
    auto* ps = app.add_subcommand("phi-scan", "Phi along (1 - t) J/q + t P for a fixed permutation P");
    int ps_q = 3, ps_points = 101;
    double ps_d = 1.0, ps_lambda = 0.0;
    std::string ps_family = "identity";
    ps->add_option("--q", ps_q)->check(CLI::Range(2, 64));
    ps->add_option("--d", ps_d);
    ps->add_option("--lambda", ps_lambda);
    ps->add_option("--points", ps_points)->check(CLI::Range(2, 1000000));
    ps->add_option("--family", ps_family, "identity or cycle")->check(CLI::IsMember({"identity", "cycle"}));

    // detect
    auto* det = app.add_subcommand("detect", "exhaustive search for good balanced partitions");
    std::string det_input, det_truth, det_slack = "auto";
    int det_q = 2;
    double det_d = 1.0, det_lambda = 0.0;
    det->add_option("--input", det_input)->required();
    det->add_option("--q", det_q)->required();
    det->add_option("--d", det_d)->required();
    det->add_option("--lambda", det_lambda)->required();
    det->add_option("--slack", det_slack, "auto (n^{2/3}) or a number")
        ->check(CLI::IsMember({"auto"}) | CLI::NonNegativeNumber);
    det->add_option("--truth", det_truth, "planted labels, to report overlaps");

    // posterior
    auto* post = app.add_subcommand("posterior", "exact Bayes posterior overlap on tiny graphs");
    ModelArgs post_model;
    post_model.attach(post);
    std::size_t post_n = 10;
    int post_reps = 100;
    std::string post_input;
    post->add_option("--n", post_n);
    post->add_option("--reps", post_reps)->check(CLI::Range(2, 1 << 24));
    post->add_option("--input", post_input, "single graph: print per-vertex posteriors instead");
    bool post_pin = false;
    post->add_flag("--pin-vertex0", post_pin, "condition on vertex 0 having label 0");

    // cycles
    auto* cyc = app.add_subcommand("cycles", "short-cycle counts against the Poisson means");
    ModelArgs cyc_model;
    cyc_model.attach(cyc);
    std::size_t cyc_n = 1000;
    int cyc_reps = 100, cyc_mmax = 5;
    std::string cyc_input;
    cyc->add_option("--n", cyc_n);
    cyc->add_option("--reps", cyc_reps);
    cyc->add_option("--m-max", cyc_mmax)->check(CLI::Range(kMinCycleLength, kMaxCycleLength));
    cyc->add_option("--input", cyc_input, "count cycles in this graph instead of sampling");

    // second-moment
    auto* sm = app.add_subcommand("second-moment", "exact finite-n second moment of the restricted density");
    ModelArgs sm_model;
    sm_model.attach(sm);
    std::vector<int> sm_ns{50, 100, 200};
    std::optional<double> sm_an;
    sm->add_option("--n", sm_ns);
    sm->add_option("--a-n", sm_an, "window half-width (default n^{2/3})");

    // sweep
    auto* sw = app.add_subcommand("sweep", "run a JSON-configured batch of experiments");
    std::string sw_config;
    sw->add_option("--config", sw_config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (g.threads > 0) omp_set_num_threads(g.threads);
        Output out(g);
        Dataset ds;

        if (*gen) {
            const auto params = gen_model.build();
            if (gen_kind == "er") {
                write_edge_list(out.stream(), sample_er(gen_n, params.d(), g.seed));
            } else {
                const auto s = sample_sbm(params, gen_n, g.seed);
                write_edge_list(out.stream(), s.graph);
                if (!gen_labels.empty()) {
                    std::ofstream lf(gen_labels);
                    require(static_cast<bool>(lf), "cannot write '" + gen_labels + "'");
                    write_labeling(lf, s.sigma);
                }
            }
            return 0;
        }
        if (*thr) {
            const auto j = to_json(threshold_report(thr_q, thr_lambda, thr_d));
            ds.rows.push_back(Row::parse(j.dump()));
            out.emit("thresholds", ds);
        } else if (*lst) {
            for (const auto& r : lambda_star_table(lst_qs)) {
                Row row;
                row["q"] = r.q;
                row["lambda_star"] = r.lambda_star ? Row(*r.lambda_star) : Row(nullptr);
                row["note"] = r.note;
                ds.rows.push_back(row);
            }
            out.emit("lambda-star", ds);
        } else if (*qf) {
            const auto params = qf_model.build();
            OptimizerOptions opts;
            opts.restarts = qf_restarts;
            opts.seed = g.seed;
            const auto v = sufficiency_verdict(params, opts);
            Row row = Row::parse(to_json(v.q).dump());
            row["verdict"] = to_string(v.verdict);
            row["d_lambda2_sq"] = params.d() * params.lambda2() * params.lambda2();
            ds.rows.push_back(row);
            out.emit("q-functional", ds);
        } else if (*ps) {
            Matrix perm = Matrix::Zero(ps_q, ps_q);
            for (int i = 0; i < ps_q; ++i) perm(i, ps_family == "identity" ? i : (i + 1) % ps_q) = 1.0;
            const Matrix uniform = Matrix::Constant(ps_q, ps_q, 1.0 / ps_q);
            for (int k = 0; k < ps_points; ++k) {
                const double t = static_cast<double>(k) / (ps_points - 1);
                const Matrix alpha = (1.0 - t) * uniform + t * perm;
                Row row;
                row["t"] = t;
                row["frobenius_sq"] = alpha.squaredNorm();
                row["phi"] = phi(alpha, ps_d, ps_lambda);
                ds.rows.push_back(row);
            }
            out.emit("phi-scan", ds);
        } else if (*det) {
            const auto graph = load_graph(det_input);
            const SymmetricParams sp{det_q, det_d, det_lambda};
            const double slack = det_slack == "auto" ? default_slack(graph.n()) : std::stod(det_slack);
            const auto good = exhaustive_good_search(graph, sp, slack);
            std::optional<Labeling> truth;
            if (!det_truth.empty()) truth = load_labeling(det_truth, det_q);
            for (const auto& tau : good) {
                const auto gc = goodness(graph, tau, sp, slack);
                Row row;
                row["m_in"] = gc.m_in;
                row["m_out"] = gc.m_out;
                row["target_in"] = gc.target_in;
                row["target_out"] = gc.target_out;
                row["slack"] = gc.slack;
                if (truth) row["overlap"] = overlap(*truth, tau);
                std::string labels;
                for (int v : tau.values) labels += static_cast<char>('0' + v % 10);
                row["labels"] = labels;
                ds.rows.push_back(row);
            }
            ds.provenance["good_count"] = good.size();
            out.emit("detect", ds);
        } else if (*post) {
            const auto params = post_model.build();
            if (!post_input.empty()) {
                const auto graph = load_graph(post_input);
                const Matrix p = exact_posteriors(graph, params, post_pin);
                for (Eigen::Index v = 0; v < p.rows(); ++v) {
                    Row row;
                    row["vertex"] = v;
                    for (Eigen::Index i = 0; i < p.cols(); ++i) row["p" + std::to_string(i)] = p(v, i);
                    ds.rows.push_back(row);
                }
            } else {
                const auto res = bayes_overlap_experiment(params, post_n, post_reps, g.seed);
                Row row;
                row["n"] = post_n;
                row["reps"] = res.reps;
                row["mean_overlap"] = res.mean;
                row["se"] = res.se;
                row["ci_low"] = res.ci_low;
                row["ci_high"] = res.ci_high;
                ds.rows.push_back(row);
            }
            out.emit("posterior", ds);
        } else if (*cyc) {
            const auto params = cyc_model.build();
            if (!cyc_input.empty()) {
                auto stats = count_cycles(load_graph(cyc_input), cyc_mmax);
                attach_poisson_means(stats, params);
                for (const auto& s : stats) {
                    Row row;
                    row["m"] = s.m;
                    row["count"] = s.count;
                    row["mu_Q"] = s.mu_Q;
                    row["mu_P"] = s.mu_P;
                    ds.rows.push_back(row);
                }
            } else {
                for (const auto& c : cycle_poisson_check(params, cyc_n, cyc_mmax, cyc_reps, g.seed)) {
                    Row row;
                    row["m"] = c.m;
                    row["mean_P"] = c.mean_P;
                    row["se_P"] = c.se_P;
                    row["target_P"] = c.target_P;
                    row["mean_Q"] = c.mean_Q;
                    row["se_Q"] = c.se_Q;
                    row["target_Q"] = c.target_Q;
                    ds.rows.push_back(row);
                }
            }
            out.emit("cycles", ds);
        } else if (*sm) {
            const auto params = sm_model.build();
            SecondMomentOptions opts;
            opts.a_n = sm_an;
            for (int n : sm_ns) {
                const auto rec = exact_second_moment(params, n, opts);
                Row row;
                row["n"] = rec.n;
                row["a_n"] = rec.a_n;
                row["exact_value"] = ext_number(rec.exact_value);
                row["asymptote"] = ext_number(rec.asymptote);
                row["omega_probability"] = rec.omega_probability;
                row["conditioned_value"] = ext_number(rec.conditioned_value);
                row["count_matrices"] = rec.matrices;
                ds.rows.push_back(row);
            }
            out.emit("second-moment", ds);
        } else if (*sw) {
            auto result = run_sweep_file(sw_config);
            if (g.format == "csv") write_csv(out.stream(), result);
            else write_json(out.stream(), result);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
