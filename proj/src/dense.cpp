#include "affmon/dense.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "affmon/errors.hpp"

namespace affmon {

Matrix matmul(const Matrix& x, const Matrix& y) {
    const int n = x.n;
    Matrix out(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double xik = x(i, k);
            if (xik == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                out(i, j) += xik * y(k, j);
            }
        }
    }
    return out;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    const int n = m.n;
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            acc += m(i, j) * x[static_cast<std::size_t>(j)];
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

double inf_norm(const Matrix& m) {
    double best = 0.0;
    for (int i = 0; i < m.n; ++i) {
        double row = 0.0;
        for (int j = 0; j < m.n; ++j) row += std::fabs(m(i, j));
        best = std::max(best, row);
    }
    return best;
}

std::vector<double> lu_solve(Matrix m, std::vector<double> rhs) {
    const int n = m.n;

    // scale-aware pivot floor
    double scale = 0.0;
    for (double v : m.a) scale = std::max(scale, std::fabs(v));
    const double pivot_floor = std::max(scale, 1.0) * 1e-14;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(m(r, col)) > std::fabs(m(pivot, col))) pivot = r;
        }
        if (std::fabs(m(pivot, col)) < pivot_floor) {
            throw Error("SingularSystem", "pivot below tolerance in LU factorization");
        }
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
            std::swap(rhs[static_cast<std::size_t>(pivot)], rhs[static_cast<std::size_t>(col)]);
        }
        const double inv = 1.0 / m(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = m(r, col) * inv;
            if (f == 0.0) continue;
            m(r, col) = 0.0;
            for (int j = col + 1; j < n; ++j) m(r, j) -= f * m(col, j);
            rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
        }
    }

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double acc = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) acc -= m(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = acc / m(i, i);
    }
    return x;
}

} // namespace affmon
