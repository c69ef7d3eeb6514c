#include "affmon/expssp.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace affmon {

namespace {

void check_finite(double v, const std::string& where) {
    if (std::isnan(v) || std::isinf(v)) {
        throw Error("NonFiniteEntry", where + " is not finite");
    }
}

std::string chain_at(std::size_t i, std::size_t u) {
    return "state " + std::to_string(i) + " control " + std::to_string(u);
}

} // namespace

void validate_chain(const TerminatingChainSpec& spec) {
    if (spec.n < 1) throw Error("DimensionMismatch", "state count must be at least 1");
    const auto n = static_cast<std::size_t>(spec.n);
    if (spec.controls.size() != n) {
        throw Error("DimensionMismatch", "control table has " +
                                             std::to_string(spec.controls.size()) +
                                             " states, expected " + std::to_string(spec.n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.controls[i].empty()) {
            throw Error("EmptyControlSet", "state " + std::to_string(i) + " has no controls");
        }
        for (std::size_t u = 0; u < spec.controls[i].size(); ++u) {
            const ChainControl& c = spec.controls[i][u];
            if (c.p.size() != n + 1 || c.stage.size() != n + 1) {
                throw Error("DimensionMismatch",
                            chain_at(i, u) + " needs n+1 probabilities and stage values");
            }
            double total = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                check_finite(c.p[j], "probability at " + chain_at(i, u));
                if (c.p[j] < 0.0) {
                    throw Error("InvalidDistribution",
                                "negative probability at " + chain_at(i, u));
                }
                total += c.p[j];
                check_finite(c.stage[j], "stage value at " + chain_at(i, u));
                if (spec.kind == ChainKind::Multiplicative && c.stage[j] < 0.0) {
                    throw Error("NegativeFactor", "negative factor at " + chain_at(i, u));
                }
            }
            if (std::fabs(total - 1.0) > 1e-12) {
                throw Error("InvalidDistribution", "probabilities at " + chain_at(i, u) +
                                                       " sum to " + std::to_string(total));
            }
        }
    }
}

namespace {

ModelSpec build_from_factors(const TerminatingChainSpec& spec, bool exponentiate) {
    const auto n = static_cast<std::size_t>(spec.n);
    ModelSpec model;
    model.n = spec.n;
    model.jbar.assign(n, 1.0);
    model.controls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const ChainControl& c : spec.controls[i]) {
            Control ctl;
            ctl.label = c.label;
            ctl.row.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double h = exponentiate ? std::exp(c.stage[j]) : c.stage[j];
                ctl.row[j] = c.p[j] * h;
            }
            const double ht = exponentiate ? std::exp(c.stage[n]) : c.stage[n];
            ctl.cost = c.p[n] * ht;
            model.controls[i].push_back(std::move(ctl));
        }
    }
    validate_model(model);
    return model;
}

} // namespace

ModelSpec build_multiplicative(const TerminatingChainSpec& spec) {
    if (spec.kind != ChainKind::Multiplicative) {
        throw Error("ValidationError", "chain is not in multiplicative form");
    }
    validate_chain(spec);
    return build_from_factors(spec, false);
}

ModelSpec build_exponential(const TerminatingChainSpec& spec) {
    if (spec.kind != ChainKind::Exponential) {
        throw Error("ValidationError", "chain is not in exponential form");
    }
    validate_chain(spec);
    return build_from_factors(spec, true);
}

TerminatingChainSpec deterministic_sp_chain(const std::vector<Arc>& arcs, int n) {
    if (n < 1) throw Error("DimensionMismatch", "state count must be at least 1");
    TerminatingChainSpec spec;
    spec.kind = ChainKind::Exponential;
    spec.n = n;
    spec.controls.resize(static_cast<std::size_t>(n));
    for (const Arc& arc : arcs) {
        if (arc.from < 0 || arc.from >= n ||
            (arc.to != kTerminalState && (arc.to < 0 || arc.to >= n))) {
            throw Error("IndexOutOfRange", "arc endpoint out of range");
        }
        check_finite(arc.length, "arc length");
        ChainControl c;
        c.label = "->" + (arc.to == kTerminalState ? std::string("t") : std::to_string(arc.to));
        c.p.assign(static_cast<std::size_t>(n) + 1, 0.0);
        c.stage.assign(static_cast<std::size_t>(n) + 1, 0.0);
        const std::size_t head =
            arc.to == kTerminalState ? static_cast<std::size_t>(n) : static_cast<std::size_t>(arc.to);
        c.p[head] = 1.0;
        c.stage[head] = arc.length;
        spec.controls[static_cast<std::size_t>(arc.from)].push_back(std::move(c));
    }
    for (int i = 0; i < n; ++i) {
        if (spec.controls[static_cast<std::size_t>(i)].empty()) {
            throw Error("DanglingState", "state " + std::to_string(i) + " has no outgoing arc");
        }
    }
    return spec;
}

ModelSpec build_deterministic_sp(const std::vector<Arc>& arcs, int n) {
    return build_exponential(deterministic_sp_chain(arcs, n));
}

TerminatingChainSpec example_4_1_chain(double grid_step) {
    if (!(grid_step > 0.0) || grid_step > 1.0) {
        throw Error("ValidationError", "grid step must lie in (0, 1]");
    }
    TerminatingChainSpec spec;
    spec.kind = ChainKind::Exponential;
    spec.n = 1;
    spec.controls.resize(1);
    const int count = static_cast<int>(std::llround(1.0 / grid_step));
    char label[48];
    for (int k = 0; k <= count; ++k) {
        double u = static_cast<double>(k) * grid_step;
        if (u > 1.0 || k == count) u = 1.0;
        ChainControl c;
        std::snprintf(label, sizeof label, "u=%.17g", u);
        c.label = label;
        c.p = {1.0 - u, u};
        c.stage = {u == 0.0 ? 0.0 : -u, 0.0};
        spec.controls[0].push_back(std::move(c));
    }
    return spec;
}

ExampleFixture build_example_4_2(double c) {
    if (!(c > 2.0)) throw Error("InvalidC", "exit cost must exceed 2");

    // states 0..6 (1..7 in 1-based terms); two three-cycles with arc costs
    // summing to zero, entered from state 0 with equal probability
    TerminatingChainSpec spec;
    spec.kind = ChainKind::Exponential;
    spec.n = 7;
    spec.controls.resize(7);
    const auto np = static_cast<std::size_t>(spec.n) + 1;

    auto deterministic = [&](int to, double g) {
        ChainControl ctl;
        ctl.label = "->" + (to == kTerminalState ? std::string("t") : std::to_string(to + 1));
        ctl.p.assign(np, 0.0);
        ctl.stage.assign(np, 0.0);
        const std::size_t head = to == kTerminalState ? np - 1 : static_cast<std::size_t>(to);
        ctl.p[head] = 1.0;
        ctl.stage[head] = g;
        return ctl;
    };

    // state 1: split to 2 and 5 at cost 0
    {
        ChainControl split;
        split.label = "cycle";
        split.p.assign(np, 0.0);
        split.stage.assign(np, 0.0);
        split.p[1] = 0.5;
        split.p[4] = 0.5;
        spec.controls[0].push_back(std::move(split));
    }
    // first cycle 2 -> 3 -> 4 -> 2 with costs 1, 0, -1
    spec.controls[1].push_back(deterministic(2, 1.0));
    spec.controls[2].push_back(deterministic(3, 0.0));
    spec.controls[3].push_back(deterministic(1, -1.0));
    // second cycle 5 -> 6 -> 7 -> 5 with costs -1, 0, 1
    spec.controls[4].push_back(deterministic(5, -1.0));
    spec.controls[5].push_back(deterministic(6, 0.0));
    spec.controls[6].push_back(deterministic(4, 1.0));
    // exits from states 1, 4, 7 at cost c
    spec.controls[0].push_back(deterministic(kTerminalState, c));
    spec.controls[3].push_back(deterministic(kTerminalState, c));
    spec.controls[6].push_back(deterministic(kTerminalState, c));

    ExampleFixture fx;
    fx.chain = spec;
    fx.model = build_exponential(spec);
    fx.mu.assign(7, 0);
    return fx;
}

namespace {

// factors actually multiplied along trajectories: h itself or exp(g)
std::vector<std::vector<std::vector<double>>> factor_table(const TerminatingChainSpec& spec) {
    const bool expo = spec.kind == ChainKind::Exponential;
    std::vector<std::vector<std::vector<double>>> h(spec.controls.size());
    for (std::size_t i = 0; i < spec.controls.size(); ++i) {
        h[i].resize(spec.controls[i].size());
        for (std::size_t u = 0; u < spec.controls[i].size(); ++u) {
            const auto& stage = spec.controls[i][u].stage;
            auto& out = h[i][u];
            out.resize(stage.size());
            for (std::size_t j = 0; j < stage.size(); ++j) {
                out[j] = expo ? std::exp(stage[j]) : stage[j];
            }
        }
    }
    return h;
}

void check_policy_seq(const TerminatingChainSpec& spec, const std::vector<Policy>& seq,
                      int horizon) {
    if (static_cast<int>(seq.size()) != horizon) {
        throw Error("DimensionMismatch", "policy sequence length must equal the horizon");
    }
    for (const Policy& mu : seq) {
        if (mu.size() != static_cast<std::size_t>(spec.n)) {
            throw Error("IndexOutOfRange", "policy length does not match state count");
        }
        for (int i = 0; i < spec.n; ++i) {
            const int u = mu[static_cast<std::size_t>(i)];
            if (u < 0 || u >= static_cast<int>(spec.controls[static_cast<std::size_t>(i)].size())) {
                throw Error("IndexOutOfRange", "policy control index out of range");
            }
        }
    }
}

double enumerate_from(const TerminatingChainSpec& spec,
                      const std::vector<std::vector<std::vector<double>>>& h,
                      const std::vector<Policy>& seq, int horizon, int state, int step,
                      double prob, double product) {
    if (step == horizon) return prob * product;
    if (state == spec.n) {
        // termination state: self-loop with probability 1 and factor 1
        return enumerate_from(spec, h, seq, horizon, state, step + 1, prob, product);
    }
    const auto i = static_cast<std::size_t>(state);
    const auto u = static_cast<std::size_t>(seq[static_cast<std::size_t>(step)][i]);
    const auto& pr = spec.controls[i][u].p;
    const auto& hf = h[i][u];
    double total = 0.0;
    for (int next = 0; next <= spec.n; ++next) {
        const double p = pr[static_cast<std::size_t>(next)];
        if (p == 0.0) continue;
        total += enumerate_from(spec, h, seq, horizon, next, step + 1, prob * p,
                                product * hf[static_cast<std::size_t>(next)]);
    }
    return total;
}

} // namespace

CostVector enumerate_cost(const TerminatingChainSpec& spec, const std::vector<Policy>& policy_seq,
                          int horizon) {
    validate_chain(spec);
    if (horizon < 0) throw Error("DimensionMismatch", "horizon must be nonnegative");
    check_policy_seq(spec, policy_seq, horizon);
    const double paths = std::pow(static_cast<double>(spec.n + 1), static_cast<double>(horizon));
    if (paths > 2e7) {
        throw Error("CapExceeded", "exhaustive enumeration over " + std::to_string(paths) +
                                       " paths per start state is not feasible");
    }
    const auto h = factor_table(spec);
    CostVector out(static_cast<std::size_t>(spec.n));
    for (int i = 0; i < spec.n; ++i) {
        out[static_cast<std::size_t>(i)] =
            enumerate_from(spec, h, policy_seq, horizon, i, 0, 1.0, 1.0);
    }
    return out;
}

CostVector enumerate_cost(const TerminatingChainSpec& spec, const Policy& mu, int horizon) {
    return enumerate_cost(spec, std::vector<Policy>(static_cast<std::size_t>(horizon), mu),
                          horizon);
}

namespace {

// splitmix64: pinned per-start-state seed derivation
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xorshift-style generator with a pinned algorithm so runs are reproducible
// across standard libraries
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x853c49e6748fea9bULL) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace

McResult mc_cost(const TerminatingChainSpec& spec, const Policy& mu, int horizon, long samples,
                 std::uint64_t seed) {
    validate_chain(spec);
    if (samples < 1) throw Error("DimensionMismatch", "need at least one sample");
    if (horizon < 0) throw Error("DimensionMismatch", "horizon must be nonnegative");
    check_policy_seq(spec, {mu}, 1);

    const auto h = factor_table(spec);
    McResult result;
    result.mean.assign(static_cast<std::size_t>(spec.n), 0.0);
    result.se.assign(static_cast<std::size_t>(spec.n), 0.0);

    for (int start = 0; start < spec.n; ++start) {
        Rng rng(mix64(seed ^ mix64(static_cast<std::uint64_t>(start) + 1)));
        // Welford accumulation: exact zero variance for constant samples
        double mean = 0.0;
        double m2 = 0.0;
        for (long s = 0; s < samples; ++s) {
            int state = start;
            double product = 1.0;
            for (int k = 0; k < horizon; ++k) {
                if (state == spec.n) break; // absorbed: all further factors are 1
                const auto i = static_cast<std::size_t>(state);
                const auto u = static_cast<std::size_t>(mu[i]);
                const auto& pr = spec.controls[i][u].p;
                const double r = rng.uniform();
                double acc = 0.0;
                int next = spec.n;
                for (int j = 0; j <= spec.n; ++j) {
                    acc += pr[static_cast<std::size_t>(j)];
                    if (r < acc) {
                        next = j;
                        break;
                    }
                }
                product *= h[i][u][static_cast<std::size_t>(next)];
                state = next;
            }
            const double d = product - mean;
            mean += d / static_cast<double>(s + 1);
            m2 += d * (product - mean);
        }
        result.mean[static_cast<std::size_t>(start)] = mean;
        if (samples > 1) {
            const double var = std::max(0.0, m2 / static_cast<double>(samples - 1));
            result.se[static_cast<std::size_t>(start)] =
                std::sqrt(var / static_cast<double>(samples));
        }
    }
    return result;
}

} // namespace affmon
