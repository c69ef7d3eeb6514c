#include "affmon/policy_eval.hpp"

#include <cmath>
#include <deque>

#include "affmon/classify.hpp"

namespace affmon {

CostVector evaluate_contractive(const ModelSpec& model, const Policy& mu) {
    const Classification c = classify_policy(model, mu);
    if (c.verdict != Verdict::Contractive) {
        throw Error("NotContractive", std::string("policy classifies ") +
                                          verdict_name(c.verdict) + " (rho estimate " +
                                          std::to_string(c.rho) + ")");
    }
    const PolicyMatrices pm = assemble_policy(model, mu);
    Matrix system(model.n);
    for (int i = 0; i < model.n; ++i) {
        for (int j = 0; j < model.n; ++j) {
            system(i, j) = (i == j ? 1.0 : 0.0) - pm.a(i, j);
        }
    }
    return lu_solve(std::move(system), pm.b);
}

CostVector finite_horizon_compose(const ModelSpec& model, const std::vector<Policy>& seq,
                                  const CostVector& j) {
    CostVector out = j;
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
        out = apply_policy_map(model, *it, out);
    }
    return out;
}

namespace {

bool components_close(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
    return std::fabs(a - b) <= 1e-12;
}

bool vectors_close(const CostVector& a, const CostVector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!components_close(a[i], b[i])) return false;
    }
    return true;
}

} // namespace

LimsupEstimate estimate_limsup_cost(const ModelSpec& model, const Policy& mu, int burn,
                                    int window, double divergence_cap) {
    validate_model(model);
    validate_policy(model, mu);
    if (window < 1) throw Error("DimensionMismatch", "window must be at least 1");
    if (burn < 0) throw Error("DimensionMismatch", "burn must be nonnegative");

    LimsupEstimate est;
    est.burn = burn;
    est.window = window;

    const auto n = static_cast<std::size_t>(model.n);
    CostVector cur = model.jbar;
    std::vector<bool> frozen(n, false);

    // history of the last 2*window iterates, for max-over-window and the
    // lag-p periodicity scan
    std::deque<CostVector> history;
    const int total = burn + window;
    for (int step = 1; step <= total; ++step) {
        cur = apply_policy_map(model, mu, cur);
        for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i] || cur[i] > divergence_cap) {
                frozen[i] = true;
                cur[i] = kInf;
            }
        }
        history.push_back(cur);
        if (static_cast<int>(history.size()) > 2 * window) history.pop_front();
    }

    est.j.assign(n, 0.0);
    const int tail_begin = static_cast<int>(history.size()) - window; // trailing window
    for (std::size_t i = 0; i < n; ++i) {
        if (frozen[i]) {
            est.j[i] = kInf;
            continue;
        }
        double best = 0.0;
        for (int k = tail_begin; k < static_cast<int>(history.size()); ++k) {
            best = std::max(best, history[static_cast<std::size_t>(k)][i]);
        }
        est.j[i] = best;
    }

    // a lag p is a period when every trailing-window iterate matches the
    // iterate p steps earlier
    for (int p = 1; p <= window && !est.periodic_detected; ++p) {
        bool ok = true;
        for (int k = tail_begin; k < static_cast<int>(history.size()); ++k) {
            if (k - p < 0) {
                ok = false;
                break;
            }
            if (!vectors_close(history[static_cast<std::size_t>(k)],
                               history[static_cast<std::size_t>(k - p)])) {
                ok = false;
                break;
            }
        }
        est.periodic_detected = ok;
    }
    return est;
}

} // namespace affmon
