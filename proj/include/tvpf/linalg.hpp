#pragma once

#include <cstddef>
#include <vector>

#include "tvpf/errors.hpp"

namespace tvpf {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Vec matvec(const Matrix& a, const Vec& x);

/// LU factorization with partial pivoting. Pivots below pivot_tol raise
/// SingularJacobian.
class LuFactor {
public:
    explicit LuFactor(Matrix a, double pivot_tol = 1e-12);

    Vec solve(const Vec& rhs) const;

    /// solve() plus one iterative-refinement pass using the unfactored
    /// matrix for the residual. Reuses this factorization, so repeated
    /// right-hand sides cost O(n^2) each.
    Vec solve_refined(const Matrix& original, const Vec& rhs) const;

    std::size_t dimension() const { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<int> perm_;
};

/// Solve a*x = rhs with one pass of iterative refinement; the returned
/// residual satisfies ||a*x - rhs||_inf <= 1e-10 * (1 + ||rhs||_inf).
Vec solve_dense(const Matrix& a, const Vec& rhs);

/// Explicit inverse via column-by-column LU solves.
Matrix invert(const Matrix& a);

}  // namespace tvpf
