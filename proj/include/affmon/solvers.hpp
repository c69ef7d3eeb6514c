#pragma once

#include "affmon/model.hpp"

namespace affmon {

/// Components beyond this are treated as numerically divergent by the
/// iterative solvers.
inline constexpr double kDivergenceCap = 1e12;

inline constexpr double kSolveTol = 1e-10;
inline constexpr long kSolveMaxIter = 1000000;

enum class SolveStatus { Converged, MaxIterations, Diverged };

const char* status_name(SolveStatus s);

struct SolveReport {
    CostVector j;
    Policy policy;
    long iterations = 0;
    double residual = 0.0;
    SolveStatus status = SolveStatus::MaxIterations;
    CostVector start; // echo of the start vector; which fixed point VI
                      // reaches depends on the start regime
};

/// Value iteration J <- TJ until the sup-norm step residual drops to tol.
/// Reaches the optimal cost from any nonnegative start under the
/// infinite-cost condition; in general the restricted optimum is only
/// guaranteed from above it.
SolveReport value_iterate(const ModelSpec& model, const CostVector& j0, double tol = kSolveTol,
                          long max_iter = kSolveMaxIter);

/// Policy iteration from a contractive start: exact evaluation alternating
/// with greedy improvement. Ties retain the incumbent control, which makes
/// the cost sequence monotone and repetition equivalent to convergence.
/// Throws NotContractiveStart, ImprovedPolicyNotContractive, CycleDetected.
SolveReport policy_iterate(const ModelSpec& model, const Policy& mu0);

/// Value iteration for the perturbed equation J = TJ + delta, from zero.
SolveReport solve_perturbed(const ModelSpec& model, double delta, double tol = kSolveTol,
                            long max_iter = kSolveMaxIter);

/// Same, from an explicit start vector (used for warm starts).
SolveReport solve_perturbed(const ModelSpec& model, double delta, const CostVector& j0,
                            double tol, long max_iter = kSolveMaxIter);

struct PerturbationSchedule {
    double delta0 = 1.0;
    double ratio = 0.5;
    int steps = 40;
    double inner_tol = 1e-10;
};

/// Drives the perturbation delta_k = delta0 * ratio^k to (near) zero,
/// warm-starting each solve from the previous one; the final iterate
/// estimates the optimal cost over contractive policies. The successive
/// solutions are componentwise nonincreasing. Throws NotConverging when
/// the final gap has not shrunk below max(1e-6, 1000 * inner_tol).
SolveReport solve_hat_j_perturbation(const ModelSpec& model,
                                     const PerturbationSchedule& schedule = {});

struct WeightedNorm {
    std::vector<double> v; // positive weights, >= 1
    double beta = 0.0;     // contraction modulus in the v-weighted sup-norm
};

/// v = (I - A_mu)^{-1} 1 and beta = 1 - 1/max v; then A_mu v <= beta v
/// componentwise, so the policy map contracts with modulus beta in the
/// v-weighted sup-norm. Requires a contractive policy.
WeightedNorm build_weighted_norm(const ModelSpec& model, const Policy& mu);

/// max_i |a(i) - b(i)| / v(i)
double weighted_distance(const WeightedNorm& norm, const CostVector& a, const CostVector& b);

/// Certified bound (1/(1-beta)) max_i (J(i) - TJ(i))/v(i) on the v-norm
/// distance from J to the restricted optimum, valid for J above it.
double vi_error_bound(const ModelSpec& model, const WeightedNorm& norm, const CostVector& j);

/// True when the policy map agrees with the Bellman map at J within tol
/// componentwise. For the restricted optimum the caller must additionally
/// require the policy to be contractive.
bool check_optimality(const ModelSpec& model, const Policy& mu, const CostVector& j,
                      double tol = 1e-9);

} // namespace affmon
