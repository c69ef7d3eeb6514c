#include "affmon/lp.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace affmon {

const char* lp_status_name(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::Infeasible: return "Infeasible";
    }
    return "Infeasible";
}

LinearProgram build_lp(const ModelSpec& model, const std::vector<double>& beta) {
    validate_model(model);
    if (beta.size() != static_cast<std::size_t>(model.n)) {
        throw Error("DimensionMismatch", "weight vector length does not match state count");
    }
    for (double w : beta) {
        if (!(w > 0.0) || std::isinf(w)) {
            throw Error("NonpositiveWeight", "objective weights must be strictly positive");
        }
    }

    LinearProgram lp;
    lp.num_vars = model.n;
    lp.objective = beta;
    for (int i = 0; i < model.n; ++i) {
        for (const Control& c : model.controls[static_cast<std::size_t>(i)]) {
            LpRow row;
            row.state = i;
            row.control = c.label;
            row.coeff.assign(static_cast<std::size_t>(model.n), 0.0);
            for (int j = 0; j < model.n; ++j) {
                row.coeff[static_cast<std::size_t>(j)] =
                    (i == j ? 1.0 : 0.0) - c.row[static_cast<std::size_t>(j)];
            }
            row.rhs = c.cost;
            lp.rows.push_back(std::move(row));
        }
    }
    return lp;
}

namespace {

// Dense tableau simplex. Column layout: structural variables, then one
// slack per row, then artificials for rows that start infeasible.
class Tableau {
public:
    Tableau(const LinearProgram& lp, double tol) : tol_(tol) {
        m_ = static_cast<int>(lp.rows.size());
        nv_ = lp.num_vars;
        int n_art = 0;
        for (const LpRow& r : lp.rows) {
            if (r.rhs < 0.0) ++n_art;
        }
        cols_ = nv_ + m_ + n_art;
        t_.assign(static_cast<std::size_t>(m_), std::vector<double>(static_cast<std::size_t>(cols_ + 1), 0.0));
        basis_.assign(static_cast<std::size_t>(m_), -1);

        int art = nv_ + m_;
        for (int r = 0; r < m_; ++r) {
            const LpRow& row = lp.rows[static_cast<std::size_t>(r)];
            const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
            auto& tr = t_[static_cast<std::size_t>(r)];
            for (int j = 0; j < nv_; ++j) tr[static_cast<std::size_t>(j)] = sign * row.coeff[static_cast<std::size_t>(j)];
            tr[static_cast<std::size_t>(nv_ + r)] = sign; // slack
            tr[static_cast<std::size_t>(cols_)] = sign * row.rhs;
            if (row.rhs < 0.0) {
                tr[static_cast<std::size_t>(art)] = 1.0;
                basis_[static_cast<std::size_t>(r)] = art++;
            } else {
                basis_[static_cast<std::size_t>(r)] = nv_ + r;
            }
        }
        first_art_ = nv_ + m_;
        has_artificials_ = n_art > 0;
    }

    LpStatus run(const std::vector<double>& objective, CostVector& solution, long& pivots) {
        if (has_artificials_ && !phase_one(pivots)) return LpStatus::Infeasible;
        const LpStatus status = phase_two(objective, pivots);
        solution.assign(static_cast<std::size_t>(nv_), 0.0);
        for (int r = 0; r < m_; ++r) {
            const int bv = basis_[static_cast<std::size_t>(r)];
            if (bv < nv_) solution[static_cast<std::size_t>(bv)] = t_[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols_)];
        }
        return status;
    }

private:
    // obj holds the current reduced-cost row (entry per column plus value);
    // entering candidates have entries below -tol.
    bool optimal(const std::vector<double>& obj, int limit) const {
        for (int j = 0; j < limit; ++j) {
            if (obj[static_cast<std::size_t>(j)] < -tol_) return false;
        }
        return true;
    }

    int entering(const std::vector<double>& obj, int limit) const {
        for (int j = 0; j < limit; ++j) { // Bland: lowest index
            if (obj[static_cast<std::size_t>(j)] < -tol_) return j;
        }
        return -1;
    }

    int leaving(int col) const {
        int pick = -1;
        double best = 0.0;
        for (int r = 0; r < m_; ++r) {
            const double a = t_[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (a <= tol_) continue;
            const double ratio = t_[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols_)] / a;
            if (pick < 0 || ratio < best - 1e-15 ||
                (std::fabs(ratio - best) <= 1e-15 &&
                 basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(pick)])) {
                pick = r;
                best = ratio;
            }
        }
        return pick;
    }

    void pivot(int row, int col, std::vector<double>& obj) {
        auto& pr = t_[static_cast<std::size_t>(row)];
        const double p = pr[static_cast<std::size_t>(col)];
        if (std::fabs(p) < 1e-12) {
            throw Error("SingularSystem", "simplex pivot below tolerance");
        }
        const double inv = 1.0 / p;
        for (double& v : pr) v *= inv;
        pr[static_cast<std::size_t>(col)] = 1.0;
        for (int r = 0; r < m_; ++r) {
            if (r == row) continue;
            auto& tr = t_[static_cast<std::size_t>(r)];
            const double f = tr[static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < tr.size(); ++j) tr[j] -= f * pr[j];
            tr[static_cast<std::size_t>(col)] = 0.0;
        }
        const double f = obj[static_cast<std::size_t>(col)];
        if (f != 0.0) {
            for (std::size_t j = 0; j < obj.size(); ++j) obj[j] -= f * pr[j];
            obj[static_cast<std::size_t>(col)] = 0.0;
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    void bump_pivots(long& pivots) {
        ++pivots;
        if (pivots > 2000 + 200L * (m_ + cols_)) {
            throw Error("SingularSystem", "simplex failed to terminate");
        }
    }

    bool phase_one(long& pivots) {
        // maximize -(sum of artificials); reduce the row for the initial basis
        std::vector<double> obj(static_cast<std::size_t>(cols_ + 1), 0.0);
        for (int j = first_art_; j < cols_; ++j) obj[static_cast<std::size_t>(j)] = 1.0;
        for (int r = 0; r < m_; ++r) {
            if (basis_[static_cast<std::size_t>(r)] >= first_art_) {
                const auto& tr = t_[static_cast<std::size_t>(r)];
                for (std::size_t j = 0; j < obj.size(); ++j) obj[j] -= tr[j];
            }
        }

        while (!optimal(obj, cols_)) {
            const int col = entering(obj, cols_);
            const int row = leaving(col);
            if (row < 0) {
                throw Error("SingularSystem", "phase-1 objective unbounded");
            }
            pivot(row, col, obj);
            bump_pivots(pivots);
        }
        if (obj[static_cast<std::size_t>(cols_)] < -10.0 * tol_) return false;

        // drive leftover zero-value artificials out of the basis
        for (int r = 0; r < m_; ++r) {
            if (basis_[static_cast<std::size_t>(r)] < first_art_) continue;
            auto& tr = t_[static_cast<std::size_t>(r)];
            int col = -1;
            for (int j = 0; j < first_art_; ++j) {
                if (std::fabs(tr[static_cast<std::size_t>(j)]) > tol_) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                pivot(r, col, obj);
                bump_pivots(pivots);
            } else {
                // redundant row
                for (double& v : tr) v = 0.0;
            }
        }
        return true;
    }

    LpStatus phase_two(const std::vector<double>& objective, long& pivots) {
        std::vector<double> obj(static_cast<std::size_t>(cols_ + 1), 0.0);
        for (int j = 0; j < nv_; ++j) obj[static_cast<std::size_t>(j)] = -objective[static_cast<std::size_t>(j)];
        for (int r = 0; r < m_; ++r) {
            const int bv = basis_[static_cast<std::size_t>(r)];
            const double f = obj[static_cast<std::size_t>(bv)];
            if (f != 0.0) {
                const auto& tr = t_[static_cast<std::size_t>(r)];
                for (std::size_t j = 0; j < obj.size(); ++j) obj[j] -= f * tr[j];
                obj[static_cast<std::size_t>(bv)] = 0.0;
            }
        }

        // artificials may not re-enter
        while (!optimal(obj, first_art_)) {
            const int col = entering(obj, first_art_);
            const int row = leaving(col);
            if (row < 0) return LpStatus::Unbounded;
            pivot(row, col, obj);
            bump_pivots(pivots);
        }
        return LpStatus::Optimal;
    }

    double tol_;
    int m_ = 0;
    int nv_ = 0;
    int cols_ = 0;
    int first_art_ = 0;
    bool has_artificials_ = false;
    std::vector<std::vector<double>> t_;
    std::vector<int> basis_;
};

} // namespace

LpSolution simplex_solve(const LinearProgram& lp, double tol) {
    if (lp.num_vars < 1) throw Error("DimensionMismatch", "LP has no variables");
    for (const LpRow& r : lp.rows) {
        if (r.coeff.size() != static_cast<std::size_t>(lp.num_vars)) {
            throw Error("DimensionMismatch", "LP row width does not match variable count");
        }
    }
    LpSolution sol;
    Tableau tab(lp, tol);
    sol.status = tab.run(lp.objective, sol.j, sol.pivots);
    return sol;
}

CostVector solve_hat_j_lp(const ModelSpec& model) {
    const LinearProgram lp = build_lp(model, std::vector<double>(static_cast<std::size_t>(model.n), 1.0));
    LpSolution sol = simplex_solve(lp);
    if (sol.status != LpStatus::Optimal) {
        throw Error(lp_status_name(sol.status), std::string("fixed-point LP is ") +
                                                    lp_status_name(sol.status));
    }
    return sol.j;
}

std::string format_lp(const LinearProgram& lp) {
    std::string out;
    char buf[64];
    for (const LpRow& row : lp.rows) {
        out += "state " + std::to_string(row.state) + " control " + row.control + ":";
        for (double c : row.coeff) {
            std::snprintf(buf, sizeof buf, " %.17g", c);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, " <= %.17g\n", row.rhs);
        out += buf;
    }
    return out;
}

} // namespace affmon
