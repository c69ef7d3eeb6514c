#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "affmon/expssp.hpp"
#include "affmon/model.hpp"

namespace testutil {

// engine output is standard-specified; the uniform mapping is pinned here
// so fixtures do not depend on libstdc++ distribution internals
struct Rand {
    std::mt19937_64 eng;
    explicit Rand(std::uint64_t seed) : eng(seed) {}

    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int pick(int lo, int hi) { // inclusive
        return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

// Random model where every policy is contractive: each matrix row is
// scaled to sum at most 0.95.
inline affmon::ModelSpec random_all_contractive_model(Rand& rng, int max_states = 6) {
    affmon::ModelSpec model;
    model.n = rng.pick(2, max_states);
    model.controls.resize(static_cast<std::size_t>(model.n));
    model.jbar.assign(static_cast<std::size_t>(model.n), 0.0);
    for (auto& us : model.controls) {
        const int m = rng.pick(1, 3);
        for (int u = 0; u < m; ++u) {
            affmon::Control c;
            c.label = "u" + std::to_string(u);
            c.row.resize(static_cast<std::size_t>(model.n));
            double sum = 0.0;
            for (double& v : c.row) {
                v = rng.uniform();
                sum += v;
            }
            const double target = 0.95 * rng.uniform(0.2, 1.0);
            if (sum > 0.0) {
                for (double& v : c.row) v *= target / sum;
            }
            c.cost = rng.uniform(0.0, 2.0);
            us.push_back(std::move(c));
        }
    }
    return model;
}

// Random exponential terminating chain with stage costs in [-1, 1] and a
// guaranteed termination probability at every (state, control).
inline affmon::TerminatingChainSpec random_exponential_chain(Rand& rng, int max_states = 4) {
    affmon::TerminatingChainSpec spec;
    spec.kind = affmon::ChainKind::Exponential;
    spec.n = rng.pick(1, max_states);
    spec.controls.resize(static_cast<std::size_t>(spec.n));
    const auto np = static_cast<std::size_t>(spec.n) + 1;
    for (auto& us : spec.controls) {
        const int m = rng.pick(1, 3);
        for (int u = 0; u < m; ++u) {
            affmon::ChainControl c;
            c.label = "u" + std::to_string(u);
            c.p.resize(np);
            double sum = 0.0;
            for (std::size_t j = 0; j < np; ++j) {
                c.p[j] = rng.uniform(0.01, 1.0);
                sum += c.p[j];
            }
            for (double& v : c.p) v /= sum;
            // renormalization leaves the sum within one ulp; snap it exactly
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < np; ++j) acc += c.p[j];
            c.p[np - 1] = 1.0 - acc;
            c.stage.resize(np);
            for (double& v : c.stage) v = rng.uniform(-1.0, 1.0);
            us.push_back(std::move(c));
        }
    }
    return spec;
}

inline affmon::Policy random_policy(Rand& rng, const affmon::ModelSpec& model) {
    affmon::Policy mu(static_cast<std::size_t>(model.n));
    for (int i = 0; i < model.n; ++i) {
        mu[static_cast<std::size_t>(i)] =
            rng.pick(0, static_cast<int>(model.controls[static_cast<std::size_t>(i)].size()) - 1);
    }
    return mu;
}

inline affmon::CostVector random_cost_vector(Rand& rng, int n, double lo, double hi) {
    affmon::CostVector j(static_cast<std::size_t>(n));
    for (double& v : j) v = rng.uniform(lo, hi);
    return j;
}

// Independent series oracle for the single-state exit-or-stay policy cost:
// sum_k (1-u)^k u e^{-uk}, summed term by term.
inline double geometric_series_cost(double u) {
    const double q = (1.0 - u) * std::exp(-u);
    double term = u;
    double total = 0.0;
    for (int k = 0; k < 2000000; ++k) {
        total += term;
        term *= q;
        if (term < 1e-17 * (total + 1.0)) break;
    }
    return total;
}

inline double max_abs_diff(const affmon::CostVector& a, const affmon::CostVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

inline std::string thrown_error_name(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const affmon::Error& e) {
        return e.name();
    }
    return "";
}

} // namespace testutil
