#pragma once

#include <limits>
#include <string>
#include <vector>

#include "affmon/dense.hpp"
#include "affmon/errors.hpp"

namespace affmon {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One control available at a state: a label, the nonnegative matrix row
/// it contributes, and the nonnegative constant term.
struct Control {
    std::string label;
    std::vector<double> row; // length n
    double cost = 0.0;
};

/// Finite-state affine monotonic model. The per-policy map is
/// J -> b_mu + A_mu J with A_mu, b_mu assembled from the selected controls;
/// jbar is the terminal vector the policy cost definition starts from.
///
/// Immutable after construction by convention; all operations below are
/// pure functions of their inputs.
struct ModelSpec {
    int n = 0;
    std::vector<std::vector<Control>> controls; // controls[i] = U(i), nonempty
    std::vector<double> jbar;                   // length n, >= 0
};

/// Stationary policy: one control index per state.
using Policy = std::vector<int>;

/// Vector over states with components in [0, +inf]. +inf is a first-class,
/// propagating value; multiplication follows the 0 * inf = 0 convention.
using CostVector = std::vector<double>;

struct PolicyMatrices {
    Matrix a;              // n x n, rows selected by the policy
    std::vector<double> b; // length n
};

/// 0 * inf = 0; a * inf = inf for a > 0.
inline double ext_mul(double coeff, double value) {
    return coeff == 0.0 ? 0.0 : coeff * value;
}

/// Throws NegativeEntry / EmptyControlSet / DimensionMismatch /
/// NonFiniteEntry when the corresponding invariant fails.
void validate_model(const ModelSpec& model);

/// Throws IndexOutOfRange when mu is not a valid policy for the model.
void validate_policy(const ModelSpec& model, const Policy& mu);

/// Number of stationary policies, saturated at +inf.
double policy_count(const ModelSpec& model);

PolicyMatrices assemble_policy(const ModelSpec& model, const Policy& mu);

/// b_mu + A_mu J under extended arithmetic.
CostVector apply_policy_map(const ModelSpec& model, const Policy& mu, const CostVector& j);

struct BellmanResult {
    CostVector value;
    Policy greedy; // attains the per-state minimum; lowest index on ties
};

/// Componentwise minimum of the policy maps over the (finite) control sets.
BellmanResult apply_bellman_map(const ModelSpec& model, const CostVector& j);

/// max_i |J(i) - (TJ)(i)|. Throws InfiniteComponent when J has an
/// infinite component.
double bellman_residual(const ModelSpec& model, const CostVector& j);

} // namespace affmon
