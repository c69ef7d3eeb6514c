#pragma once

#include <string>

#include "affmon/model.hpp"

namespace affmon {

/// One constraint J(i) - sum_j A_ij(u) J(j) <= b(i,u), kept with its
/// provenance for the debug listing.
struct LpRow {
    int state = 0;
    std::string control;
    std::vector<double> coeff; // length num_vars
    double rhs = 0.0;
};

/// maximize objective . J  subject to the rows and J >= 0.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective; // strictly positive weights
    std::vector<LpRow> rows;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

const char* lp_status_name(LpStatus s);

struct LpSolution {
    CostVector j;
    LpStatus status = LpStatus::Infeasible;
    long pivots = 0;
};

/// Transcribes the fixed-point characterization: maximize beta . J over
/// { J >= 0 : J(i) <= b(i,u) + sum_j A_ij(u) J(j) for every state/control }.
/// One row per (state, control); throws NonpositiveWeight unless every
/// beta component is strictly positive.
LinearProgram build_lp(const ModelSpec& model, const std::vector<double>& beta);

/// Dense two-phase primal simplex with Bland's rule (the fixed-point LPs
/// are degenerate by construction whenever zero-cost cycles exist).
LpSolution simplex_solve(const LinearProgram& lp, double tol = 1e-9);

/// Optimum of the all-ones-weights LP: the componentwise-largest vector
/// with J <= TJ, i.e. the optimal cost over contractive policies.
/// Throws Unbounded when no finite certificate exists.
CostVector solve_hat_j_lp(const ModelSpec& model);

/// One constraint per line: state, control label, coefficients, rhs.
std::string format_lp(const LinearProgram& lp);

} // namespace affmon
