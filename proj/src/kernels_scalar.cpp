#include "tvpf/kernels.hpp"

#include <cmath>

namespace tvpf::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_abs(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double sum_sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + y[i];
}

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void taylor2(const double* x0, double c1, const double* d1, double c2, const double* d2,
             double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x0[i] + c1 * d1[i];
        out[i] = t + c2 * d2[i];
    }
}

void lerp(const double* u, const double* v, double t, double* out, std::size_t n) {
    const double s = 1.0 - t;
    for (std::size_t i = 0; i < n; ++i) out[i] = s * u[i] + t * v[i];
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

}  // namespace tvpf::kernels::scalar
