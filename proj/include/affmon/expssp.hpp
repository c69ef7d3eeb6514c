#pragma once

#include <cstdint>

#include "affmon/model.hpp"

namespace affmon {

enum class ChainKind { Multiplicative, Exponential };

/// One control of a terminating chain: transition probabilities over the
/// states plus the termination state (last entry), and the per-transition
/// stage values in the same layout: factors h >= 0 in multiplicative
/// form, costs g (any sign) in exponential form.
struct ChainControl {
    std::string label;
    std::vector<double> p;     // length n+1; p[n] is the termination probability
    std::vector<double> stage; // length n+1
};

/// Transition/cost data for a multiplicative or exponential terminating
/// chain over states 0..n-1 plus an absorbing termination state.
struct TerminatingChainSpec {
    ChainKind kind = ChainKind::Exponential;
    int n = 0;
    std::vector<std::vector<ChainControl>> controls;
};

/// Throws InvalidDistribution / NegativeFactor / NonFiniteEntry /
/// DimensionMismatch / EmptyControlSet.
void validate_chain(const TerminatingChainSpec& spec);

/// A_ij(u) = p_ij(u) h(i,u,j), b(i,u) = p_it(u) h(i,u,t), jbar = ones.
ModelSpec build_multiplicative(const TerminatingChainSpec& spec);

/// Multiplicative build with h = exp(g) componentwise.
ModelSpec build_exponential(const TerminatingChainSpec& spec);

/// Directed arc of a deterministic shortest-path instance.
/// to == kTerminalState targets the termination state.
struct Arc {
    int from = 0;
    int to = 0;
    double length = 0.0;
};

inline constexpr int kTerminalState = -1;

/// Exponential chain embedding of a deterministic shortest-path instance:
/// each arc becomes a control with a degenerate distribution on its head
/// and factor exp(length). Negative-length cycles are legal here; a policy
/// circling one forever has cost 0 on the cycle.
TerminatingChainSpec deterministic_sp_chain(const std::vector<Arc>& arcs, int n);
ModelSpec build_deterministic_sp(const std::vector<Arc>& arcs, int n);

/// Single-state exit-or-stay family on a control grid over [0, 1]:
/// control u terminates at cost 0 with probability u and loops at cost -u
/// with probability 1-u. The u = 0 policy is the only noncontractive one,
/// and the infimum over the contractive grid policies is not attained.
TerminatingChainSpec example_4_1_chain(double grid_step);

struct ExampleFixture {
    TerminatingChainSpec chain;
    ModelSpec model;
    Policy mu; // the distinguished noncontractive policy (control 0 everywhere)
};

/// Seven states feeding two zero-length three-cycles plus exits to the
/// termination state at cost c > 2 from states 1, 4 and 7 (1-based).
/// Under mu the cost vector oscillates instead of settling, so it is not
/// a fixed point of the policy map; with c > 2 the exit policy is strictly
/// worse, which separates the optimal cost from every fixed point.
ExampleFixture build_example_4_2(double c);

/// Expected multiplicatively-accumulated cost over all trajectories of
/// exactly `horizon` steps, one component per start state. The termination
/// state is enumerated as a genuine extra state with a self-loop of factor
/// one. policy_seq must have one policy per step. Exhaustive: throws
/// CapExceeded when (n+1)^horizon is too large.
CostVector enumerate_cost(const TerminatingChainSpec& spec, const std::vector<Policy>& policy_seq,
                          int horizon);

/// Stationary-policy convenience wrapper.
CostVector enumerate_cost(const TerminatingChainSpec& spec, const Policy& mu, int horizon);

struct McResult {
    CostVector mean;
    CostVector se; // standard error of each mean
};

/// Seeded Monte-Carlo estimate of the same expectation. Output is fully
/// determined by the seed: the generator and the uniform-double mapping
/// are pinned, not implementation-defined.
McResult mc_cost(const TerminatingChainSpec& spec, const Policy& mu, int horizon, long samples,
                 std::uint64_t seed);

} // namespace affmon
