#pragma once

#include "affmon/model.hpp"

namespace affmon {

/// Exact policy cost (I - A_mu)^{-1} b_mu for a contractive policy, the
/// unique fixed point of the policy map over real vectors.
/// Throws NotContractive when the classify verdict is not Contractive and
/// SingularSystem if the factorization fails despite the verdict.
CostVector evaluate_contractive(const ModelSpec& model, const Policy& mu);

/// Applies the policy maps of the sequence right to left:
/// T_{mu_0} ... T_{mu_{N-1}} J. An empty sequence returns J unchanged.
CostVector finite_horizon_compose(const ModelSpec& model, const std::vector<Policy>& seq,
                                  const CostVector& j);

struct LimsupEstimate {
    CostVector j;
    int burn = 0;
    int window = 0;
    bool periodic_detected = false;
};

/// Estimates limsup_N T_mu^N jbar. Components are frozen at +inf once an
/// iterate exceeds divergence_cap and never downgraded; finite components
/// report the max over the trailing window. periodic_detected is set when
/// the trailing window repeats an earlier value pattern within 1e-12;
/// only then is the estimate exact for eventually periodic iterates.
LimsupEstimate estimate_limsup_cost(const ModelSpec& model, const Policy& mu, int burn = 1000,
                                    int window = 120, double divergence_cap = 1e12);

} // namespace affmon
