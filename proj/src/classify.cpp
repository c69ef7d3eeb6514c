#include "affmon/classify.hpp"

#include <cmath>
#include <string>

namespace affmon {

namespace {

// Norm-root estimate inf_norm(M^(2^k))^(1/2^k) via repeated squaring.
// The matrix is renormalized every round and the true norm tracked in log
// space, so powers of order 2^60 cause no overflow. For nonnegative M the
// estimate decreases monotonically to the spectral radius along the
// doubling sequence, so it never undershoots.
double squaring_estimate(const Matrix& m, double tol) {
    double s = inf_norm(m);
    if (s == 0.0) return 0.0;
    Matrix q = m;
    for (double& v : q.a) v /= s;
    double log_norm = std::log(s); // log inf_norm(M^(2^k)), k = 0
    double power = 1.0;            // 2^k
    double estimate = s;

    for (int step = 0; step < 60; ++step) {
        q = matmul(q, q);
        const double t = inf_norm(q);
        if (t == 0.0) return 0.0; // nilpotent
        for (double& v : q.a) v /= t;
        log_norm = 2.0 * log_norm + std::log(t);
        power *= 2.0;
        const double next = std::exp(log_norm / power);
        if (step >= 3 && std::fabs(next - estimate) <= 0.01 * tol * std::max(1.0, next)) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

} // namespace

SpectralRadius spectral_radius(const Matrix& m, double tol, int max_iter) {
    SpectralRadius out;
    const int n = m.n;
    if (n == 0) {
        out.converged = true;
        return out;
    }

    // power iteration from the all-ones vector; a positive start cannot be
    // orthogonal to the (nonnegative) Perron vector
    std::vector<double> x(static_cast<std::size_t>(n), 1.0);
    double lam = 0.0;
    bool power_converged = false;
    int it;
    for (it = 1; it <= max_iter; ++it) {
        std::vector<double> y = matvec(m, x);
        double norm = 0.0;
        for (double v : y) norm = std::max(norm, v);
        if (norm == 0.0) {
            // a positive vector was annihilated: M is nilpotent
            out.rho = 0.0;
            out.converged = true;
            out.iterations = it;
            return out;
        }
        for (double& v : y) v /= norm;
        x = std::move(y);
        if (it > 1 && std::fabs(norm - lam) <= tol * std::max(1.0, norm)) {
            lam = norm;
            power_converged = true;
            break;
        }
        lam = norm;
    }
    out.iterations = it > max_iter ? max_iter : it;

    const double rho_sq = squaring_estimate(m, tol);
    const bool agree = std::fabs(lam - rho_sq) <= 10.0 * tol * std::max(1.0, rho_sq);
    // the norm-root estimate is authoritative when the two disagree
    out.rho = agree ? lam : rho_sq;
    out.converged = power_converged && agree;
    return out;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Contractive: return "Contractive";
    case Verdict::Noncontractive: return "Noncontractive";
    case Verdict::Marginal: return "Marginal";
    }
    return "Marginal";
}

Classification classify_policy(const ModelSpec& model, const Policy& mu) {
    const PolicyMatrices pm = assemble_policy(model, mu);
    const SpectralRadius sr = spectral_radius(pm.a);
    Classification c;
    c.rho = sr.rho;
    c.iterations = sr.iterations;
    if (std::fabs(sr.rho - 1.0) <= kMarginalBand) {
        c.verdict = Verdict::Marginal;
    } else if (sr.rho < 1.0) {
        c.verdict = Verdict::Contractive;
    } else {
        c.verdict = Verdict::Noncontractive;
    }
    return c;
}

bool next_policy(const ModelSpec& model, Policy& mu) {
    for (int i = model.n - 1; i >= 0; --i) {
        const auto idx = static_cast<std::size_t>(i);
        if (mu[idx] + 1 < static_cast<int>(model.controls[idx].size())) {
            ++mu[idx];
            for (std::size_t k = idx + 1; k < mu.size(); ++k) mu[k] = 0;
            return true;
        }
    }
    return false;
}

namespace {

void check_cap(const ModelSpec& model, std::uint64_t cap) {
    const double count = policy_count(model);
    if (count > static_cast<double>(cap)) {
        throw Error("CapExceeded", "policy space has " + std::to_string(count) +
                                       " members, cap is " + std::to_string(cap));
    }
}

} // namespace

Policy find_contractive_policy(const ModelSpec& model, std::uint64_t enumeration_cap) {
    validate_model(model);
    check_cap(model, enumeration_cap);
    Policy mu(static_cast<std::size_t>(model.n), 0);
    do {
        if (classify_policy(model, mu).verdict == Verdict::Contractive) return mu;
    } while (next_policy(model, mu));
    throw Error("NoneFound", "no contractive policy in the enumerated set");
}

InfiniteCostCheck check_infinite_cost_condition(const ModelSpec& model,
                                                std::uint64_t enumeration_cap, int horizon,
                                                double divergence_cap) {
    validate_model(model);
    check_cap(model, enumeration_cap);

    InfiniteCostCheck result;
    bool undecided = false;
    Policy mu(static_cast<std::size_t>(model.n), 0);
    do {
        if (classify_policy(model, mu).verdict == Verdict::Contractive) continue;

        // partial sums of A_mu^k b_mu, as a fixed-policy value iteration
        const PolicyMatrices pm = assemble_policy(model, mu);
        std::vector<double> s(static_cast<std::size_t>(model.n), 0.0);
        bool diverged = false;
        bool settled = false;
        for (int k = 0; k < horizon; ++k) {
            std::vector<double> next = matvec(pm.a, s);
            double residual = 0.0;
            double peak = 0.0;
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] += pm.b[i];
                residual = std::max(residual, std::fabs(next[i] - s[i]));
                peak = std::max(peak, next[i]);
            }
            s = std::move(next);
            if (peak > divergence_cap) {
                diverged = true;
                break;
            }
            if (residual < 1e-12) {
                settled = true;
                break;
            }
        }
        if (settled) {
            result.outcome = InfiniteCostCheck::Outcome::Fails;
            result.witness = mu;
            return result;
        }
        if (!diverged) undecided = true;
    } while (next_policy(model, mu));

    result.outcome = undecided ? InfiniteCostCheck::Outcome::Unknown
                               : InfiniteCostCheck::Outcome::Holds;
    return result;
}

const char* outcome_name(InfiniteCostCheck::Outcome o) {
    switch (o) {
    case InfiniteCostCheck::Outcome::Holds: return "Holds";
    case InfiniteCostCheck::Outcome::Fails: return "Fails";
    case InfiniteCostCheck::Outcome::Unknown: return "Unknown";
    }
    return "Unknown";
}

} // namespace affmon
