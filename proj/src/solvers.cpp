#include "affmon/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "affmon/classify.hpp"
#include "affmon/policy_eval.hpp"

namespace affmon {

const char* status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Diverged: return "Diverged";
    }
    return "MaxIterations";
}

namespace {

void check_start(const ModelSpec& model, const CostVector& j0) {
    if (j0.size() != static_cast<std::size_t>(model.n)) {
        throw Error("DimensionMismatch", "start vector length does not match state count");
    }
    for (double v : j0) {
        if (std::isnan(v) || std::isinf(v)) {
            throw Error("InfiniteComponent", "start vector must be finite");
        }
        if (v < 0.0) throw Error("NegativeEntry", "start vector must be nonnegative");
    }
}

SolveReport iterate_bellman(const ModelSpec& model, const CostVector& j0, double delta,
                            double tol, long max_iter) {
    validate_model(model);
    check_start(model, j0);

    SolveReport report;
    report.start = j0;
    CostVector j = j0;
    Policy greedy(static_cast<std::size_t>(model.n), 0);

    for (long it = 1; it <= max_iter; ++it) {
        BellmanResult step = apply_bellman_map(model, j);
        double residual = 0.0;
        double peak = 0.0;
        for (std::size_t i = 0; i < step.value.size(); ++i) {
            step.value[i] += delta;
            residual = std::max(residual, std::fabs(step.value[i] - j[i]));
            peak = std::max(peak, step.value[i]);
        }
        j = std::move(step.value);
        greedy = std::move(step.greedy);
        report.iterations = it;
        report.residual = residual;
        if (peak > kDivergenceCap) {
            report.status = SolveStatus::Diverged;
            break;
        }
        if (residual <= tol) {
            report.status = SolveStatus::Converged;
            break;
        }
        report.status = SolveStatus::MaxIterations;
    }
    report.j = std::move(j);
    report.policy = std::move(greedy);
    return report;
}

} // namespace

SolveReport value_iterate(const ModelSpec& model, const CostVector& j0, double tol,
                          long max_iter) {
    return iterate_bellman(model, j0, 0.0, tol, max_iter);
}

SolveReport solve_perturbed(const ModelSpec& model, double delta, double tol, long max_iter) {
    const CostVector zero(static_cast<std::size_t>(model.n), 0.0);
    return solve_perturbed(model, delta, zero, tol, max_iter);
}

SolveReport solve_perturbed(const ModelSpec& model, double delta, const CostVector& j0,
                            double tol, long max_iter) {
    if (delta < 0.0) throw Error("NegativeEntry", "perturbation must be nonnegative");
    return iterate_bellman(model, j0, delta, tol, max_iter);
}

SolveReport policy_iterate(const ModelSpec& model, const Policy& mu0) {
    validate_model(model);
    validate_policy(model, mu0);
    if (classify_policy(model, mu0).verdict != Verdict::Contractive) {
        throw Error("NotContractiveStart", "policy iteration needs a contractive start");
    }

    SolveReport report;
    Policy mu = mu0;
    std::set<Policy> visited;
    visited.insert(mu);

    for (;;) {
        const CostVector j = evaluate_contractive(model, mu);
        ++report.iterations;

        // greedy improvement; the incumbent control survives ties
        Policy next(static_cast<std::size_t>(model.n));
        const BellmanResult greedy = apply_bellman_map(model, j);
        const CostVector incumbent_value = apply_policy_map(model, mu, j);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = incumbent_value[i] <= greedy.value[i] ? mu[i] : greedy.greedy[i];
        }

        if (next == mu) {
            report.j = j;
            report.policy = mu;
            report.residual = bellman_residual(model, j);
            report.status = SolveStatus::Converged;
            return report;
        }
        if (classify_policy(model, next).verdict != Verdict::Contractive) {
            throw Error("ImprovedPolicyNotContractive",
                        "greedy improvement produced a noncontractive policy");
        }
        if (!visited.insert(next).second) {
            throw Error("CycleDetected", "policy iteration revisited a previous policy");
        }
        mu = std::move(next);
    }
}

SolveReport solve_hat_j_perturbation(const ModelSpec& model,
                                     const PerturbationSchedule& schedule) {
    if (!(schedule.delta0 > 0.0)) throw Error("ValidationError", "delta0 must be positive");
    if (!(schedule.ratio > 0.0 && schedule.ratio < 1.0)) {
        throw Error("ValidationError", "ratio must lie in (0,1)");
    }
    if (schedule.steps < 1) throw Error("ValidationError", "steps must be at least 1");
    if (!(schedule.inner_tol > 0.0)) throw Error("ValidationError", "inner_tol must be positive");
    validate_model(model);

    CostVector warm(static_cast<std::size_t>(model.n), 0.0);
    SolveReport report;
    long total_iterations = 0;
    double delta = schedule.delta0;
    double prev_gap = kInf;
    double last_gap = kInf;

    for (int k = 0; k < schedule.steps; ++k) {
        SolveReport inner = solve_perturbed(model, delta, warm, schedule.inner_tol);
        total_iterations += inner.iterations;
        if (inner.status != SolveStatus::Converged) {
            inner.iterations = total_iterations;
            return inner;
        }
        if (k > 0) {
            double gap = 0.0;
            for (std::size_t i = 0; i < warm.size(); ++i) {
                gap = std::max(gap, std::fabs(inner.j[i] - warm[i]));
            }
            prev_gap = last_gap;
            last_gap = gap;
        }
        warm = inner.j;
        report = std::move(inner);
        delta *= schedule.ratio;
    }
    report.iterations = total_iterations;

    const double gap_floor = std::max(1e-6, 1000.0 * schedule.inner_tol);
    if (schedule.steps > 1 && last_gap > gap_floor && last_gap >= prev_gap) {
        throw Error("NotConverging", "perturbation schedule gaps are not shrinking");
    }
    return report;
}

WeightedNorm build_weighted_norm(const ModelSpec& model, const Policy& mu) {
    const Classification c = classify_policy(model, mu);
    if (c.verdict != Verdict::Contractive) {
        throw Error("NotContractive", std::string("policy classifies ") + verdict_name(c.verdict));
    }
    const PolicyMatrices pm = assemble_policy(model, mu);
    Matrix system(model.n);
    for (int i = 0; i < model.n; ++i) {
        for (int j = 0; j < model.n; ++j) {
            system(i, j) = (i == j ? 1.0 : 0.0) - pm.a(i, j);
        }
    }
    WeightedNorm norm;
    norm.v = lu_solve(std::move(system), std::vector<double>(static_cast<std::size_t>(model.n), 1.0));
    double vmax = 0.0;
    for (double v : norm.v) vmax = std::max(vmax, v);
    norm.beta = 1.0 - 1.0 / vmax;
    return norm;
}

double weighted_distance(const WeightedNorm& norm, const CostVector& a, const CostVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::fabs(a[i] - b[i]) / norm.v[i]);
    }
    return d;
}

double vi_error_bound(const ModelSpec& model, const WeightedNorm& norm, const CostVector& j) {
    for (double v : j) {
        if (std::isinf(v)) throw Error("InfiniteComponent", "bound needs a finite vector");
    }
    const CostVector tj = apply_bellman_map(model, j).value;
    double worst = -kInf;
    for (std::size_t i = 0; i < j.size(); ++i) {
        worst = std::max(worst, (j[i] - tj[i]) / norm.v[i]);
    }
    return worst / (1.0 - norm.beta);
}

bool check_optimality(const ModelSpec& model, const Policy& mu, const CostVector& j,
                      double tol) {
    const CostVector policy_value = apply_policy_map(model, mu, j);
    const CostVector bellman_value = apply_bellman_map(model, j).value;
    for (std::size_t i = 0; i < policy_value.size(); ++i) {
        const double a = policy_value[i];
        const double b = bellman_value[i];
        if (std::isinf(a) || std::isinf(b)) {
            if (std::isinf(a) && std::isinf(b)) continue;
            return false;
        }
        if (std::fabs(a - b) > tol) return false;
    }
    return true;
}

} // namespace affmon
