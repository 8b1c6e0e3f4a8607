#include "tvpf/linalg.hpp"

#include <cmath>
#include <utility>

#include "tvpf/kernels.hpp"

namespace tvpf {

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Vec matvec(const Matrix& a, const Vec& x) {
    if (x.size() != a.cols()) throw DimensionMismatch("matvec: size mismatch");
    Vec y(a.rows());
    kernels::matvec(a.data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

LuFactor::LuFactor(Matrix a, double pivot_tol) : lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw DimensionMismatch("LU requires a square matrix");
    const std::size_t n = lu_.rows();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = static_cast<int>(i);

    for (std::size_t k = 0; k < n; ++k) {
        // Partial pivoting: largest magnitude in column k at or below the diagonal.
        std::size_t piv = k;
        double piv_abs = std::fabs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(lu_(i, k));
            if (v > piv_abs) {
                piv = i;
                piv_abs = v;
            }
        }
        if (piv_abs < pivot_tol) throw SingularJacobian(piv_abs);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
        }
        const double inv_piv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = lu_(i, k) * inv_piv;
            lu_(i, k) = l;
            if (l != 0.0) kernels::axpy(-l, lu_.row(k) + k + 1, lu_.row(i) + k + 1, n - k - 1);
        }
    }
}

Vec LuFactor::solve(const Vec& rhs) const {
    const std::size_t n = lu_.rows();
    if (rhs.size() != n) throw DimensionMismatch("LU solve: rhs length mismatch");
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
    // Forward substitution with unit lower factor.
    for (std::size_t i = 1; i < n; ++i) x[i] -= kernels::dot(lu_.row(i), x.data(), i);
    // Back substitution.
    for (std::size_t i = n; i-- > 0;) {
        x[i] -= kernels::dot(lu_.row(i) + i + 1, x.data() + i + 1, n - i - 1);
        x[i] /= lu_(i, i);
    }
    return x;
}

Vec LuFactor::solve_refined(const Matrix& original, const Vec& rhs) const {
    Vec x = solve(rhs);
    const double bound = 1e-10 * (1.0 + kernels::max_abs(rhs.data(), rhs.size()));
    Vec r = matvec(original, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    if (kernels::max_abs(r.data(), r.size()) > bound) {
        const Vec dx = solve(r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return x;
}

Vec solve_dense(const Matrix& a, const Vec& rhs) {
    LuFactor lu(a);
    return lu.solve_refined(a, rhs);
}

Matrix invert(const Matrix& a) {
    const std::size_t n = a.rows();
    LuFactor lu(a);
    Matrix inv(n, n);
    Vec e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const Vec col = lu.solve(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

}  // namespace tvpf
