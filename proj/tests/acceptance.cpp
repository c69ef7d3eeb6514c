// Acceptance suite: one line per criterion, all tolerances pinned in code.
// Exits nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "affmon/classify.hpp"
#include "affmon/expssp.hpp"
#include "affmon/lp.hpp"
#include "affmon/policy_eval.hpp"
#include "affmon/solvers.hpp"
#include "helpers.hpp"

using namespace affmon;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& why) {
        if (!cond && ok) {
            ok = false;
            detail = why;
        }
    }
    void note(const std::string& text) {
        if (ok) detail = text;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// criterion 1: trajectory enumeration equals operator composition with the
// unit terminal vector on random exponential chains
Check oracle_equivalence() {
    Check c;
    testutil::Rand rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
        const TerminatingChainSpec spec = testutil::random_exponential_chain(rng, 4);
        const ModelSpec model = build_exponential(spec);
        const int horizon = rng.pick(1, 8);
        std::vector<Policy> seq;
        for (int k = 0; k < horizon; ++k) seq.push_back(testutil::random_policy(rng, model));

        const CostVector enumerated = enumerate_cost(spec, seq, horizon);
        const CostVector composed = finite_horizon_compose(model, seq, model.jbar);
        worst = std::max(worst, testutil::max_abs_diff(enumerated, composed));
    }
    c.require(worst <= 1e-10, "max deviation " + fmt(worst));
    c.note("120 instances, max deviation " + fmt(worst));
    return c;
}

// criterion 2: the two-cycle fixture reproduces the oscillating policy cost
// and separates it from the restricted optimum
Check two_cycle_fixture() {
    Check c;
    const ExampleFixture fx = build_example_4_2(3.0);
    const LimsupEstimate est = estimate_limsup_cost(fx.model, fx.mu);
    c.require(est.periodic_detected, "limsup iterates were not detected periodic");

    const double expected_1 = 0.5 * (std::exp(1.0) + std::exp(-1.0));
    c.require(std::fabs(est.j[0] - expected_1) <= 1e-9,
              "J_mu(1) = " + fmt(est.j[0]) + ", expected " + fmt(expected_1));
    c.require(std::fabs(est.j[1] - std::exp(1.0)) <= 1e-9,
              "J_mu(2) = " + fmt(est.j[1]) + ", expected e");

    const double violation = std::fabs(est.j[0] - 0.5 * (est.j[1] + est.j[4]));
    c.require(violation > 0.1, "fixed-point violation only " + fmt(violation));

    const CostVector hat_lp = solve_hat_j_lp(fx.model);
    const SolveReport hat_pert = solve_hat_j_perturbation(fx.model);
    c.require(testutil::max_abs_diff(hat_lp, est.j) > 1e-3,
              "LP optimum does not separate from the policy cost");
    c.require(testutil::max_abs_diff(hat_pert.j, est.j) > 1e-3,
              "perturbation optimum does not separate from the policy cost");
    c.note("J_mu(1) = " + fmt(est.j[0]) + ", Bellman violation " + fmt(violation));
    return c;
}

// criterion 3: exit-or-stay grid at step 1e-3
Check exit_or_stay_grid() {
    Check c;
    const TerminatingChainSpec chain = example_4_1_chain(1e-3);
    const ModelSpec model = build_exponential(chain);
    const auto& grid = model.controls[0];

    // exact evaluation against the series oracle, at every contractive point
    double worst = 0.0;
    int argmin = -1;
    double grid_inf = kInf;
    for (std::size_t u = 0; u < grid.size(); ++u) {
        const double exit_prob = chain.controls[0][u].p[1];
        if (exit_prob == 0.0) continue;
        const double oracle = testutil::geometric_series_cost(exit_prob);
        const CostVector j = evaluate_contractive(model, {static_cast<int>(u)});
        worst = std::max(worst, std::fabs(j[0] - oracle));
        if (oracle < grid_inf) {
            grid_inf = oracle;
            argmin = static_cast<int>(u);
        }
    }
    c.require(worst <= 1e-10, "series oracle deviation " + fmt(worst));

    // the two restricted-optimum routes agree
    const CostVector hat_lp = solve_hat_j_lp(model);
    const SolveReport hat_pert = solve_hat_j_perturbation(model);
    c.require(std::fabs(hat_lp[0] - hat_pert.j[0]) <= 1e-6,
              "LP vs perturbation gap " + fmt(std::fabs(hat_lp[0] - hat_pert.j[0])));
    c.require(std::fabs(hat_lp[0] - grid_inf) <= 1e-6,
              "LP optimum misses the grid infimum of the oracle");

    // u = 0 is the noncontractive policy with unit cost
    c.require(classify_policy(model, {0}).verdict != Verdict::Contractive,
              "u = 0 classified contractive");
    const LimsupEstimate zero = estimate_limsup_cost(model, {0});
    c.require(std::fabs(zero.j[0] - 1.0) <= 1e-9, "J(u=0) = " + fmt(zero.j[0]));

    // no optimal policy: the infimum sits at the smallest positive grid
    // point and keeps strictly falling as the grid refines
    c.require(argmin == 1, "grid argmin not at the first positive control");
    double prev_inf = grid_inf;
    for (double step : {5e-4, 2.5e-4}) {
        const TerminatingChainSpec finer = example_4_1_chain(step);
        double inf_here = kInf;
        std::size_t which = 0;
        for (std::size_t u = 0; u < finer.controls[0].size(); ++u) {
            const double exit_prob = finer.controls[0][u].p[1];
            if (exit_prob == 0.0) continue;
            const double oracle = testutil::geometric_series_cost(exit_prob);
            if (oracle < inf_here) {
                inf_here = oracle;
                which = u;
            }
        }
        c.require(which == 1, "refined grid argmin not at the first positive control");
        c.require(inf_here < prev_inf - 1e-9, "grid infimum failed to decrease on refinement");
        prev_inf = inf_here;
    }
    c.note("series deviation " + fmt(worst) + ", grid infimum " + fmt(grid_inf));
    return c;
}

struct Crit4Data {
    std::vector<ModelSpec> models;
    std::vector<CostVector> hats;     // LP optimum per model
    std::vector<Policy> optimal_mus;  // PI's final policy per model
};

// criterion 4: value iteration, policy iteration, and the LP agree on
// all-contractive instances; policy iteration is monotone and short
Check cross_solver_agreement(Crit4Data& out) {
    Check c;
    testutil::Rand rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const ModelSpec m = testutil::random_all_contractive_model(rng, 5);
        const SolveReport vi = value_iterate(m, CostVector(static_cast<std::size_t>(m.n), 0.0));
        c.require(vi.status == SolveStatus::Converged, "VI failed to converge");

        // replay the improvement sequence to watch the cost trajectory
        Policy mu = testutil::random_policy(rng, m);
        CostVector prev;
        long improvements = 0;
        for (;;) {
            const CostVector j = evaluate_contractive(m, mu);
            ++improvements;
            if (!prev.empty()) {
                for (std::size_t i = 0; i < j.size(); ++i) {
                    c.require(j[i] <= prev[i] + 1e-10, "PI cost increased at some state");
                }
            }
            prev = j;
            const BellmanResult greedy = apply_bellman_map(m, j);
            const CostVector incumbent = apply_policy_map(m, mu, j);
            Policy next(static_cast<std::size_t>(m.n));
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] = incumbent[i] <= greedy.value[i] ? mu[i] : greedy.greedy[i];
            }
            if (next == mu) break;
            mu = std::move(next);
        }
        c.require(static_cast<double>(improvements) <= policy_count(m),
                  "PI used more improvements than the policy space size");

        const SolveReport pi = policy_iterate(m, testutil::random_policy(rng, m));
        const CostVector lp = solve_hat_j_lp(m);
        worst = std::max(worst, testutil::max_abs_diff(vi.j, pi.j));
        worst = std::max(worst, testutil::max_abs_diff(vi.j, lp));
        worst = std::max(worst, testutil::max_abs_diff(pi.j, lp));
        c.require(worst <= 1e-8, "pairwise solver gap " + fmt(worst));

        out.models.push_back(m);
        out.hats.push_back(lp);
        out.optimal_mus.push_back(pi.policy);
    }
    c.note("50 instances, worst pairwise gap " + fmt(worst));
    return c;
}

// criterion 5: scaled-down optima stay feasible and below the optimum
Check lp_bracketing(const Crit4Data& data) {
    Check c;
    testutil::Rand rng(505);
    int tested = 0;
    while (tested < 100) {
        const std::size_t pick = static_cast<std::size_t>(rng.pick(0, static_cast<int>(data.models.size()) - 1));
        const ModelSpec& m = data.models[pick];
        const CostVector& hat = data.hats[pick];
        CostVector j = hat;
        const double shrink = rng.uniform(0.0, 1.0);
        for (double& v : j) v *= shrink;

        const CostVector tj = apply_bellman_map(m, j).value;
        for (std::size_t i = 0; i < j.size(); ++i) {
            c.require(j[i] <= tj[i] + 1e-12, "shrunk vector left the feasible set");
            c.require(j[i] <= hat[i] + 1e-9, "feasible vector exceeded the optimum");
        }
        ++tested;
    }
    c.note("100 feasible vectors below the optimum");
    return c;
}

// criterion 6: the weighted-norm rate certificate from the optimal policy
Check vi_rate_certificate(const Crit4Data& data) {
    Check c;
    testutil::Rand rng(606);
    double worst_margin = kInf;
    for (std::size_t k = 0; k < data.models.size(); ++k) {
        const ModelSpec& m = data.models[k];
        const CostVector& hat = data.hats[k];
        const WeightedNorm norm = build_weighted_norm(m, data.optimal_mus[k]);
        for (int rep = 0; rep < 4; ++rep) {
            CostVector j = hat;
            for (double& v : j) v += rng.uniform(0.0, 5.0);
            const CostVector tj = apply_bellman_map(m, j).value;
            const double before = weighted_distance(norm, j, hat);
            const double after = weighted_distance(norm, tj, hat);
            c.require(after <= norm.beta * before + 1e-9,
                      "contraction rate violated: " + fmt(after) + " > beta * " + fmt(before));
            const double bound = vi_error_bound(m, norm, j);
            c.require(bound >= before - 1e-9,
                      "error bound " + fmt(bound) + " below true distance " + fmt(before));
            worst_margin = std::min(worst_margin, bound - before);
        }
    }
    c.note("certificates hold; smallest bound margin " + fmt(worst_margin));
    return c;
}

// criterion 7: negative two-cycle embeds with rho = 1/e and zero cost
Check negative_cycle_sp() {
    Check c;
    const ModelSpec m = build_deterministic_sp(
        {{0, 1, -1.0}, {0, kTerminalState, 5.0}, {1, 0, -1.0}, {1, kTerminalState, 5.0}}, 2);
    const Classification cls = classify_policy(m, {0, 0});
    c.require(cls.verdict == Verdict::Contractive, "cycle policy not contractive");
    c.require(std::fabs(cls.rho - std::exp(-1.0)) <= 1e-9, "rho = " + fmt(cls.rho));
    const CostVector j = evaluate_contractive(m, {0, 0});
    c.require(std::fabs(j[0]) <= 1e-12 && std::fabs(j[1]) <= 1e-12,
              "cycle states have nonzero cost");
    c.note("rho = " + fmt(cls.rho) + ", cycle cost exactly zero");
    return c;
}

// criterion 8: perturbed solutions decrease in delta and satisfy the
// perturbed equation
Check perturbation_structure(const Crit4Data& data) {
    Check c;
    double worst_residual = 0.0;
    auto sweep = [&](const ModelSpec& m, int steps) {
        CostVector prev;
        double delta = 1.0;
        CostVector warm(static_cast<std::size_t>(m.n), 0.0);
        for (int k = 0; k < steps; ++k) {
            const SolveReport r = solve_perturbed(m, delta, warm, 1e-10);
            c.require(r.status == SolveStatus::Converged, "perturbed solve did not converge");
            const CostVector tj = apply_bellman_map(m, r.j).value;
            for (std::size_t i = 0; i < r.j.size(); ++i) {
                worst_residual = std::max(worst_residual, std::fabs(r.j[i] - (tj[i] + delta)));
                if (!prev.empty()) {
                    c.require(r.j[i] <= prev[i] + 1e-9, "solution increased as delta shrank");
                }
            }
            prev = r.j;
            warm = r.j;
            delta *= 0.5;
        }
    };
    for (const ModelSpec& m : data.models) sweep(m, 8);
    sweep(build_exponential(example_4_1_chain(1e-3)), 12);
    c.require(worst_residual <= 1e-9, "perturbed equation residual " + fmt(worst_residual));
    c.note("monotone in delta, worst equation residual " + fmt(worst_residual));
    return c;
}

// criterion 9: Monte-Carlo agrees with enumeration and is reproducible
Check monte_carlo_sanity() {
    Check c;
    testutil::Rand rng(909);
    TerminatingChainSpec spec;
    do {
        spec = testutil::random_exponential_chain(rng, 3);
    } while (spec.n != 3);
    const Policy mu(3, 0);
    const int horizon = 6;

    const CostVector exact = enumerate_cost(spec, mu, horizon);
    const McResult mc = mc_cost(spec, mu, horizon, 1000000, 20240808);
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double gap = std::fabs(mc.mean[i] - exact[i]);
        c.require(gap <= 4.0 * mc.se[i],
                  "state " + std::to_string(i) + " off by " + fmt(gap) + " > 4 se");
    }
    const McResult again = mc_cost(spec, mu, horizon, 1000000, 20240808);
    c.require(mc.mean == again.mean && mc.se == again.se, "repeat run was not bit-identical");
    c.note("1e6 samples inside 4 standard errors, bit-reproducible");
    return c;
}

} // namespace

int main() {
    Crit4Data shared;
    std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"1 oracle equivalence (enumeration vs composition)", oracle_equivalence},
        {"2 two-cycle fixture (oscillating cost, J_mu not a fixed point)", two_cycle_fixture},
        {"3 exit-or-stay grid (series oracle, hat-J routes, no optimal policy)",
         exit_or_stay_grid},
        {"4 cross-solver agreement (VI, PI, LP)",
         [&shared] { return cross_solver_agreement(shared); }},
        {"5 LP bracketing (feasible vectors below the optimum)",
         [&shared] { return lp_bracketing(shared); }},
        {"6 VI rate certificate (weighted-norm contraction and bound)",
         [&shared] { return vi_rate_certificate(shared); }},
        {"7 negative-cycle shortest path", negative_cycle_sp},
        {"8 delta-perturbation structure", [&shared] { return perturbation_structure(shared); }},
        {"9 Monte-Carlo sanity", monte_carlo_sanity},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Check result;
        try {
            result = fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %s: %s\n", result.ok ? "PASS" : "FAIL", name.c_str(),
                    result.detail.c_str());
        if (!result.ok) ++failures;
    }
    return failures;
}
