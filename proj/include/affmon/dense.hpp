#pragma once

#include <cstddef>
#include <vector>

namespace affmon {

/// Dense square matrix, row-major. Everything here is desk scale
/// (n up to a few hundred), so no sparsity and no blocking.
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

Matrix matmul(const Matrix& x, const Matrix& y);

/// y = m x
std::vector<double> matvec(const Matrix& m, const std::vector<double>& x);

/// max_i sum_j |m(i,j)|
double inf_norm(const Matrix& m);

/// Solves m x = rhs by LU factorization with partial pivoting.
/// Throws Error("SingularSystem") when a pivot falls below tolerance.
std::vector<double> lu_solve(Matrix m, std::vector<double> rhs);

} // namespace affmon
