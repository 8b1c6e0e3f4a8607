#pragma once

#include <cstddef>

// Data-parallel inner loops used by the dense linear algebra and the
// trajectory evaluation. Scalar kernels are the reference semantics; the
// AVX2 variants keep the same per-element operation order, so element-wise
// kernels are bit-identical across backends. Reductions (dot, sum_*) sum in
// a different association order and may differ in the last bits.

namespace tvpf::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n);
double sum_abs(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);

/// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
/// out = a*x + b*y
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n);
/// out = x0 + c1*d1 + c2*d2, evaluated as (x0 + c1*d1) + c2*d2
void taylor2(const double* x0, double c1, const double* d1, double c2, const double* d2,
             double* out, std::size_t n);
/// out = (1-t)*u + t*v
void lerp(const double* u, const double* v, double t, double* out, std::size_t n);
/// y = A x for a row-major rows x cols matrix
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

}  // namespace scalar

#if defined(TVPF_HAVE_AVX2)
namespace avx2 {

double dot(const double* a, const double* b, std::size_t n);
double sum_abs(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n);
void taylor2(const double* x0, double c1, const double* d1, double c2, const double* d2,
             double* out, std::size_t n);
void lerp(const double* u, const double* v, double t, double* out, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

}  // namespace avx2
#endif

enum class Backend { Auto, Scalar, Avx2 };

/// True when the running CPU reports AVX2 support.
bool cpu_has_avx2();

/// Select the kernel backend. Auto picks AVX2 when available. Honors the
/// TVPF_SIMD environment variable (scalar|avx2|auto) on first use.
void select_backend(Backend b);
Backend active_backend();

// Dispatched entry points; resolved once per backend selection.
double dot(const double* a, const double* b, std::size_t n);
double sum_abs(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n);
void taylor2(const double* x0, double c1, const double* d1, double c2, const double* d2,
             double* out, std::size_t n);
void lerp(const double* u, const double* v, double t, double* out, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

}  // namespace tvpf::kernels
