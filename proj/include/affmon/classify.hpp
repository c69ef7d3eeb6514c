#pragma once

#include <cstdint>
#include <optional>

#include "affmon/model.hpp"

namespace affmon {

/// Half-width of the band around rho = 1 that is reported Marginal rather
/// than forced into a contractive/noncontractive verdict. rho = 1 is a
/// genuine knife edge in this model class, so the boundary is surfaced.
inline constexpr double kMarginalBand = 1e-8;

inline constexpr double kSpectralTol = 1e-12;
inline constexpr int kSpectralMaxIter = 20000;

struct SpectralRadius {
    double rho = 0.0;
    bool converged = false;
    int iterations = 0; // power-iteration steps used
};

/// Perron root of a nonnegative matrix. Power iteration with max-norm
/// normalization from the all-ones start, cross-checked against the
/// norm-root estimate inf_norm(M^(2^m))^(1/2^m) obtained by repeated
/// squaring. The norm-root value is authoritative when they disagree
/// (power iteration can stagnate on reducible or periodic matrices),
/// and disagreement beyond 10*tol clears the converged flag.
SpectralRadius spectral_radius(const Matrix& m, double tol = kSpectralTol,
                               int max_iter = kSpectralMaxIter);

enum class Verdict { Contractive, Noncontractive, Marginal };

struct Classification {
    Verdict verdict = Verdict::Marginal;
    double rho = 0.0;
    int iterations = 0;
};

const char* verdict_name(Verdict v);

/// Verdict on rho(A_mu) versus the unit circle, with the Marginal band.
Classification classify_policy(const ModelSpec& model, const Policy& mu);

/// Exhaustive lexicographic search for a policy with a Contractive verdict.
/// Throws CapExceeded when the policy space is larger than the cap and
/// NoneFound when the search exhausts without a hit.
Policy find_contractive_policy(const ModelSpec& model, std::uint64_t enumeration_cap = 1u << 20);

struct InfiniteCostCheck {
    enum class Outcome { Holds, Fails, Unknown };
    Outcome outcome = Outcome::Unknown;
    std::optional<Policy> witness; // set when outcome == Fails
};

const char* outcome_name(InfiniteCostCheck::Outcome o);

/// Best-effort audit of the infinite-cost condition: every policy without
/// a Contractive verdict must accumulate unbounded cost somewhere. For each
/// such policy the partial sums S_{k+1} = b_mu + A_mu S_k from S_0 = 0 are
/// iterated up to the horizon; exceeding divergence_cap counts as divergent,
/// settling below a 1e-12 residual is a counterexample (Fails with witness),
/// anything undecided makes the overall answer Unknown. Exponential in the
/// policy space; meant for fixtures, not production paths.
InfiniteCostCheck check_infinite_cost_condition(const ModelSpec& model,
                                                std::uint64_t enumeration_cap = 1u << 20,
                                                int horizon = 100000,
                                                double divergence_cap = 1e8);

/// Lexicographic policy enumeration helper: advances mu in place, returns
/// false after the last policy.
bool next_policy(const ModelSpec& model, Policy& mu);

} // namespace affmon
