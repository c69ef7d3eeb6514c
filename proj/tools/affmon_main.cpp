#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "affmon/classify.hpp"
#include "affmon/expssp.hpp"
#include "affmon/lp.hpp"
#include "affmon/model.hpp"
#include "affmon/policy_eval.hpp"
#include "affmon/problem_io.hpp"
#include "affmon/solvers.hpp"

using nlohmann::json;
using namespace affmon;

namespace {

// --policy accepts one control index per state, or a single index that
// applies to every state
Policy resolve_policy(const std::vector<int>& raw, int n) {
    if (raw.empty()) throw Error("UsageError", "--policy is required here");
    if (raw.size() == 1 && n > 1) return Policy(static_cast<std::size_t>(n), raw[0]);
    if (raw.size() != static_cast<std::size_t>(n)) {
        throw Error("IndexOutOfRange", "--policy needs one entry per state (or a single entry)");
    }
    return raw;
}

json policy_json(const Policy& mu) { return json(mu); }

json classification_json(const Classification& c) {
    json j;
    j["verdict"] = verdict_name(c.verdict);
    j["rho"] = c.rho;
    j["iterations"] = c.iterations;
    return j;
}

json solve_report_json(const SolveReport& r) {
    json j;
    j["J"] = cost_vector_to_json(r.j);
    j["policy"] = policy_json(r.policy);
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["status"] = status_name(r.status);
    j["start"] = cost_vector_to_json(r.start);
    return j;
}

struct Common {
    std::string file;
    std::string output;
    double tol = kSolveTol;
    long max_iters = kSolveMaxIter;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_file = true) {
    if (needs_file) cmd->add_option("file", c.file, "problem file (JSON)")->required();
    cmd->add_option("--tol", c.tol, "solver tolerance");
    cmd->add_option("--max-iters", c.max_iters, "iteration cap");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--output", c.output, "also write the report to this path");
}

void emit(const json& report, const Common& c) {
    const std::string text = dump_json(report);
    std::cout << text << "\n";
    if (!c.output.empty()) {
        std::ofstream out(c.output, std::ios::binary);
        if (!out) throw Error("UsageError", "cannot write " + c.output);
        out << text << "\n";
    }
}

void write_fixture(const ProblemFile& pf, const std::string& path) {
    if (path.empty()) throw Error("UsageError", "--output is required for fixture generators");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("UsageError", "cannot write " + path);
    out << dump_json(problem_to_json(pf)) << "\n";
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

json report_shell(const std::string& command, json parameters, json result, const Timer& timer) {
    json report;
    report["command"] = command;
    report["parameters"] = std::move(parameters);
    report["result"] = std::move(result);
    report["duration_seconds"] = timer.seconds();
    return report;
}

int run(int argc, char** argv) {
    CLI::App app{"affine monotonic dynamic programming toolkit"};
    app.require_subcommand(1);

    Common c;
    std::vector<int> policy_flag;
    std::uint64_t cap = 1u << 20;
    int horizon = 100000;
    double divergence_cap = 1e8;
    int burn = 1000;
    int window = 120;
    double limsup_cap = 1e12;
    double delta = 1.0;
    std::string method = "lp";
    PerturbationSchedule schedule;
    std::vector<double> beta;
    std::string listing_path;
    std::vector<double> j0;
    long samples = 100000;
    int oracle_horizon = 6;
    double grid_step = 1e-3;
    double exit_cost = 3.0;

    CLI::App* validate_cmd = app.add_subcommand("validate", "parse and validate a problem file");
    add_common(validate_cmd, c);

    CLI::App* classify_cmd = app.add_subcommand("classify", "classify a stationary policy");
    add_common(classify_cmd, c);
    classify_cmd->add_option("--policy", policy_flag, "control indices")->delimiter(',')->required();

    CLI::App* findc_cmd = app.add_subcommand("find-contractive", "search for a contractive policy");
    add_common(findc_cmd, c);
    findc_cmd->add_option("--cap", cap, "enumeration cap");

    CLI::App* a31_cmd = app.add_subcommand("check-a31", "audit the infinite-cost condition");
    add_common(a31_cmd, c);
    a31_cmd->add_option("--cap", cap, "enumeration cap");
    a31_cmd->add_option("--horizon", horizon, "partial-sum horizon per policy");
    a31_cmd->add_option("--divergence-cap", divergence_cap, "threshold counted as divergence");

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "policy cost (exact or limsup estimate)");
    add_common(eval_cmd, c);
    eval_cmd->add_option("--policy", policy_flag, "control indices")->delimiter(',')->required();
    eval_cmd->add_option("--burn", burn, "limsup burn-in iterations");
    eval_cmd->add_option("--window", window, "limsup trailing window");
    eval_cmd->add_option("--divergence-cap", limsup_cap, "freeze components beyond this");

    CLI::App* vi_cmd = app.add_subcommand("vi", "value iteration");
    add_common(vi_cmd, c);
    vi_cmd->add_option("--j0", j0, "start vector (default zero)")->delimiter(',');

    CLI::App* pi_cmd = app.add_subcommand("pi", "policy iteration from a contractive policy");
    add_common(pi_cmd, c);
    pi_cmd->add_option("--policy", policy_flag, "start policy (default: first contractive)")
        ->delimiter(',');
    pi_cmd->add_option("--cap", cap, "enumeration cap for the default start search");

    CLI::App* perturb_cmd = app.add_subcommand("perturb", "solve the delta-perturbed equation");
    add_common(perturb_cmd, c);
    perturb_cmd->add_option("--delta", delta, "perturbation added to every constant term")
        ->required();

    CLI::App* hatj_cmd =
        app.add_subcommand("hat-j", "optimal cost over contractive policies");
    add_common(hatj_cmd, c);
    hatj_cmd->add_option("--method", method, "lp or perturb")
        ->check(CLI::IsMember({"lp", "perturb"}));
    hatj_cmd->add_option("--delta0", schedule.delta0, "initial perturbation");
    hatj_cmd->add_option("--ratio", schedule.ratio, "perturbation decay ratio");
    hatj_cmd->add_option("--steps", schedule.steps, "number of perturbation steps");

    CLI::App* lp_cmd = app.add_subcommand("lp", "solve the fixed-point linear program");
    add_common(lp_cmd, c);
    lp_cmd->add_option("--beta", beta, "objective weights (default all ones)")->delimiter(',');
    lp_cmd->add_option("--listing", listing_path, "write the constraint listing to this path");

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle-check", "trajectory enumeration vs operator composition");
    add_common(oracle_cmd, c);
    oracle_cmd->add_option("--horizon", oracle_horizon, "composition length");

    CLI::App* mc_cmd = app.add_subcommand("mc", "Monte-Carlo trajectory estimate");
    add_common(mc_cmd, c);
    mc_cmd->add_option("--policy", policy_flag, "control indices")->delimiter(',')->required();
    mc_cmd->add_option("--horizon", oracle_horizon, "trajectory length");
    mc_cmd->add_option("--samples", samples, "sample count");

    CLI::App* ex41_cmd = app.add_subcommand("example-4-1", "write the exit-or-stay grid fixture");
    ex41_cmd->add_option("--grid-step", grid_step, "control grid spacing");
    ex41_cmd->add_option("--output", c.output, "fixture path")->required();

    CLI::App* ex42_cmd = app.add_subcommand("example-4-2", "write the two-cycle fixture");
    ex42_cmd->add_option("--c", exit_cost, "exit arc cost (> 2)");
    ex42_cmd->add_option("--output", c.output, "fixture path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Timer timer;
    try {
        if (*validate_cmd) {
            const ProblemFile pf = parse_problem(c.file);
            const ModelSpec m = pf.to_model();
            json result;
            result["valid"] = true;
            result["kind"] = kind_name(pf.kind);
            result["n"] = m.n;
            result["policies"] = policy_count(m);
            if (!pf.name.empty()) result["name"] = pf.name;
            emit(report_shell("validate", {{"file", c.file}}, result, timer), c);
        } else if (*classify_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            const Policy mu = resolve_policy(policy_flag, m.n);
            json params{{"file", c.file}, {"policy", policy_json(mu)}};
            emit(report_shell("classify", params, classification_json(classify_policy(m, mu)),
                              timer),
                 c);
        } else if (*findc_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            const Policy mu = find_contractive_policy(m, cap);
            json result;
            result["policy"] = policy_json(mu);
            result["classification"] = classification_json(classify_policy(m, mu));
            emit(report_shell("find-contractive", {{"file", c.file}, {"cap", cap}}, result, timer),
                 c);
        } else if (*a31_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            const InfiniteCostCheck r =
                check_infinite_cost_condition(m, cap, horizon, divergence_cap);
            json result;
            result["outcome"] = outcome_name(r.outcome);
            if (r.witness) result["witness"] = policy_json(*r.witness);
            json params{{"file", c.file},
                        {"cap", cap},
                        {"horizon", horizon},
                        {"divergence_cap", divergence_cap}};
            emit(report_shell("check-a31", params, result, timer), c);
        } else if (*eval_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            const Policy mu = resolve_policy(policy_flag, m.n);
            json params{{"file", c.file}, {"policy", policy_json(mu)}};
            json result;
            const Classification cls = classify_policy(m, mu);
            result["classification"] = classification_json(cls);
            if (cls.verdict == Verdict::Contractive) {
                result["method"] = "linear-solve";
                result["J"] = cost_vector_to_json(evaluate_contractive(m, mu));
            } else {
                const LimsupEstimate est = estimate_limsup_cost(m, mu, burn, window, limsup_cap);
                result["method"] = "limsup-estimate";
                result["J"] = cost_vector_to_json(est.j);
                result["periodic_detected"] = est.periodic_detected;
                params["burn"] = burn;
                params["window"] = window;
                params["divergence_cap"] = limsup_cap;
            }
            emit(report_shell("evaluate", params, result, timer), c);
        } else if (*vi_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            CostVector start(static_cast<std::size_t>(m.n), 0.0);
            if (!j0.empty()) {
                start = j0.size() == 1 ? CostVector(static_cast<std::size_t>(m.n), j0[0]) : j0;
            }
            const SolveReport r = value_iterate(m, start, c.tol, c.max_iters);
            json params{{"file", c.file}, {"tol", c.tol}, {"max_iters", c.max_iters}};
            emit(report_shell("vi", params, solve_report_json(r), timer), c);
        } else if (*pi_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            const Policy mu0 = policy_flag.empty() ? find_contractive_policy(m, cap)
                                                   : resolve_policy(policy_flag, m.n);
            const SolveReport r = policy_iterate(m, mu0);
            json params{{"file", c.file}, {"start_policy", policy_json(mu0)}};
            emit(report_shell("pi", params, solve_report_json(r), timer), c);
        } else if (*perturb_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            const SolveReport r = solve_perturbed(m, delta, c.tol, c.max_iters);
            json params{
                {"file", c.file}, {"delta", delta}, {"tol", c.tol}, {"max_iters", c.max_iters}};
            emit(report_shell("perturb", params, solve_report_json(r), timer), c);
        } else if (*hatj_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            json params{{"file", c.file}, {"method", method}};
            json result;
            if (method == "lp") {
                result["J"] = cost_vector_to_json(solve_hat_j_lp(m));
                result["status"] = "Optimal";
            } else {
                schedule.inner_tol = c.tol;
                const SolveReport r = solve_hat_j_perturbation(m, schedule);
                params["delta0"] = schedule.delta0;
                params["ratio"] = schedule.ratio;
                params["steps"] = schedule.steps;
                params["inner_tol"] = schedule.inner_tol;
                result = solve_report_json(r);
            }
            emit(report_shell("hat-j", params, result, timer), c);
        } else if (*lp_cmd) {
            const ModelSpec m = parse_problem(c.file).to_model();
            if (beta.empty()) beta.assign(static_cast<std::size_t>(m.n), 1.0);
            const LinearProgram lp = build_lp(m, beta);
            if (!listing_path.empty()) {
                std::ofstream out(listing_path, std::ios::binary);
                if (!out) throw Error("UsageError", "cannot write " + listing_path);
                out << format_lp(lp);
            }
            const LpSolution sol = simplex_solve(lp);
            json result;
            result["status"] = lp_status_name(sol.status);
            result["pivots"] = sol.pivots;
            if (sol.status == LpStatus::Optimal) {
                result["J"] = cost_vector_to_json(sol.j);
                double objective = 0.0;
                for (std::size_t i = 0; i < sol.j.size(); ++i) objective += beta[i] * sol.j[i];
                result["objective"] = objective;
            }
            json params{{"file", c.file}, {"beta", beta}};
            emit(report_shell("lp", params, result, timer), c);
        } else if (*oracle_cmd) {
            const ProblemFile pf = parse_problem(c.file);
            if (pf.kind != ProblemFile::Kind::Exponential &&
                pf.kind != ProblemFile::Kind::Multiplicative) {
                throw Error("UsageError", "oracle-check needs a chain-form problem file");
            }
            const ModelSpec m = pf.to_model();
            // seed-determined random policy sequence
            std::vector<Policy> seq;
            std::uint64_t state = c.seed * 0x9e3779b97f4a7c15ULL + 0xda3e39cb94b95bdbULL;
            for (int k = 0; k < oracle_horizon; ++k) {
                Policy mu(static_cast<std::size_t>(m.n));
                for (int i = 0; i < m.n; ++i) {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    mu[static_cast<std::size_t>(i)] = static_cast<int>(
                        state % m.controls[static_cast<std::size_t>(i)].size());
                }
                seq.push_back(std::move(mu));
            }
            const CostVector enumerated = enumerate_cost(pf.chain, seq, oracle_horizon);
            const CostVector composed = finite_horizon_compose(m, seq, m.jbar);
            double deviation = 0.0;
            for (std::size_t i = 0; i < enumerated.size(); ++i) {
                deviation = std::max(deviation, std::fabs(enumerated[i] - composed[i]));
            }
            json result;
            result["max_abs_deviation"] = deviation;
            result["ok"] = deviation <= 1e-10;
            result["enumerated"] = cost_vector_to_json(enumerated);
            result["composed"] = cost_vector_to_json(composed);
            json params{{"file", c.file}, {"horizon", oracle_horizon}, {"seed", c.seed}};
            emit(report_shell("oracle-check", params, result, timer), c);
        } else if (*mc_cmd) {
            const ProblemFile pf = parse_problem(c.file);
            if (pf.kind != ProblemFile::Kind::Exponential &&
                pf.kind != ProblemFile::Kind::Multiplicative) {
                throw Error("UsageError", "mc needs a chain-form problem file");
            }
            const Policy mu = resolve_policy(policy_flag, pf.chain.n);
            const McResult r = mc_cost(pf.chain, mu, oracle_horizon, samples, c.seed);
            json result;
            result["mean"] = cost_vector_to_json(r.mean);
            result["stderr"] = cost_vector_to_json(r.se);
            json params{{"file", c.file},
                        {"policy", policy_json(mu)},
                        {"horizon", oracle_horizon},
                        {"samples", samples},
                        {"seed", c.seed}};
            emit(report_shell("mc", params, result, timer), c);
        } else if (*ex41_cmd) {
            ProblemFile pf;
            pf.kind = ProblemFile::Kind::Exponential;
            pf.name = "exit-or-stay-grid";
            pf.chain = example_4_1_chain(grid_step);
            write_fixture(pf, c.output);
            json result;
            result["written"] = c.output;
            result["controls"] = pf.chain.controls[0].size();
            Common to_stdout; // --output already consumed by the fixture
            emit(report_shell("example-4-1", {{"grid_step", grid_step}}, result, timer),
                 to_stdout);
        } else if (*ex42_cmd) {
            const ExampleFixture fx = build_example_4_2(exit_cost);
            ProblemFile pf;
            pf.kind = ProblemFile::Kind::Exponential;
            pf.name = "two-zero-cycles";
            pf.chain = fx.chain;
            write_fixture(pf, c.output);
            json result;
            result["written"] = c.output;
            result["policy"] = policy_json(fx.mu);
            Common to_stdout;
            emit(report_shell("example-4-2", {{"c", exit_cost}}, result, timer), to_stdout);
        }
    } catch (const Error& e) {
        json err;
        err["error"] = e.name();
        err["message"] = e.what();
        std::cout << dump_json(err) << "\n";
        std::cerr << e.name() << ": " << e.what() << "\n";
        return e.name() == "UsageError" ? 2 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
