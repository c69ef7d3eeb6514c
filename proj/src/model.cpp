#include "affmon/model.hpp"

#include <cmath>
#include <string>

namespace affmon {

namespace {

void check_entry(double v, const std::string& where) {
    if (std::isnan(v) || std::isinf(v)) {
        throw Error("NonFiniteEntry", where + " is not finite");
    }
    if (v < 0.0) {
        throw Error("NegativeEntry", where + " is negative");
    }
}

} // namespace

void validate_model(const ModelSpec& model) {
    if (model.n < 1) {
        throw Error("DimensionMismatch", "state count must be at least 1");
    }
    const auto n = static_cast<std::size_t>(model.n);
    if (model.controls.size() != n) {
        throw Error("DimensionMismatch", "control table has " +
                                             std::to_string(model.controls.size()) +
                                             " states, expected " + std::to_string(model.n));
    }
    if (model.jbar.size() != n) {
        throw Error("DimensionMismatch", "jbar has " + std::to_string(model.jbar.size()) +
                                             " entries, expected " + std::to_string(model.n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (model.controls[i].empty()) {
            throw Error("EmptyControlSet", "state " + std::to_string(i) + " has no controls");
        }
        for (std::size_t u = 0; u < model.controls[i].size(); ++u) {
            const Control& c = model.controls[i][u];
            const std::string at = "state " + std::to_string(i) + " control " + std::to_string(u);
            if (c.row.size() != n) {
                throw Error("DimensionMismatch",
                            at + " row has " + std::to_string(c.row.size()) +
                                " entries, expected " + std::to_string(model.n));
            }
            check_entry(c.cost, "b at " + at);
            for (std::size_t j = 0; j < n; ++j) {
                check_entry(c.row[j], "A at " + at + " column " + std::to_string(j));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        check_entry(model.jbar[i], "jbar at state " + std::to_string(i));
    }
}

void validate_policy(const ModelSpec& model, const Policy& mu) {
    if (mu.size() != static_cast<std::size_t>(model.n)) {
        throw Error("IndexOutOfRange", "policy has " + std::to_string(mu.size()) +
                                           " entries, expected " + std::to_string(model.n));
    }
    for (int i = 0; i < model.n; ++i) {
        const int u = mu[static_cast<std::size_t>(i)];
        const int m = static_cast<int>(model.controls[static_cast<std::size_t>(i)].size());
        if (u < 0 || u >= m) {
            throw Error("IndexOutOfRange", "policy picks control " + std::to_string(u) +
                                               " at state " + std::to_string(i) + " (has " +
                                               std::to_string(m) + ")");
        }
    }
}

double policy_count(const ModelSpec& model) {
    double count = 1.0;
    for (const auto& us : model.controls) {
        count *= static_cast<double>(us.size());
        if (count > 1e300) return kInf;
    }
    return count;
}

PolicyMatrices assemble_policy(const ModelSpec& model, const Policy& mu) {
    validate_policy(model, mu);
    PolicyMatrices pm;
    pm.a = Matrix(model.n);
    pm.b.resize(static_cast<std::size_t>(model.n));
    for (int i = 0; i < model.n; ++i) {
        const Control& c = model.controls[static_cast<std::size_t>(i)]
                                         [static_cast<std::size_t>(mu[static_cast<std::size_t>(i)])];
        for (int j = 0; j < model.n; ++j) pm.a(i, j) = c.row[static_cast<std::size_t>(j)];
        pm.b[static_cast<std::size_t>(i)] = c.cost;
    }
    return pm;
}

namespace {

double control_value(const Control& c, const CostVector& j) {
    double acc = c.cost;
    for (std::size_t k = 0; k < c.row.size(); ++k) {
        acc += ext_mul(c.row[k], j[k]);
    }
    return acc;
}

} // namespace

CostVector apply_policy_map(const ModelSpec& model, const Policy& mu, const CostVector& j) {
    validate_policy(model, mu);
    if (j.size() != static_cast<std::size_t>(model.n)) {
        throw Error("DimensionMismatch", "cost vector length does not match state count");
    }
    CostVector out(static_cast<std::size_t>(model.n));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = control_value(model.controls[i][static_cast<std::size_t>(mu[i])], j);
    }
    return out;
}

BellmanResult apply_bellman_map(const ModelSpec& model, const CostVector& j) {
    if (j.size() != static_cast<std::size_t>(model.n)) {
        throw Error("DimensionMismatch", "cost vector length does not match state count");
    }
    BellmanResult res;
    res.value.resize(static_cast<std::size_t>(model.n));
    res.greedy.resize(static_cast<std::size_t>(model.n));
    for (std::size_t i = 0; i < res.value.size(); ++i) {
        const auto& us = model.controls[i];
        double best = control_value(us[0], j);
        int best_u = 0;
        for (std::size_t u = 1; u < us.size(); ++u) {
            const double v = control_value(us[u], j);
            // strict < keeps the lowest index on ties
            if (v < best) {
                best = v;
                best_u = static_cast<int>(u);
            }
        }
        res.value[i] = best;
        res.greedy[i] = best_u;
    }
    return res;
}

double bellman_residual(const ModelSpec& model, const CostVector& j) {
    for (double v : j) {
        if (std::isinf(v)) {
            throw Error("InfiniteComponent", "bellman residual needs a finite cost vector");
        }
    }
    const CostVector tj = apply_bellman_map(model, j).value;
    double res = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        res = std::max(res, std::fabs(j[i] - tj[i]));
    }
    return res;
}

} // namespace affmon
