#include "tvpf/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tvpf::kernels {

bool cpu_has_avx2() {
#if defined(TVPF_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_abs)(const double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*axpby)(double, const double*, double, const double*, double*, std::size_t);
    void (*taylor2)(const double*, double, const double*, double, const double*, double*,
                    std::size_t);
    void (*lerp)(const double*, const double*, double, double*, std::size_t);
    void (*matvec)(const double*, std::size_t, std::size_t, const double*, double*);
};

constexpr Table kScalar = {scalar::dot,   scalar::sum_abs, scalar::sum_sq,
                           scalar::max_abs, scalar::axpy,  scalar::axpby,
                           scalar::taylor2, scalar::lerp,  scalar::matvec};

#if defined(TVPF_HAVE_AVX2)
constexpr Table kAvx2 = {avx2::dot,   avx2::sum_abs, avx2::sum_sq,
                         avx2::max_abs, avx2::axpy,  avx2::axpby,
                         avx2::taylor2, avx2::lerp,  avx2::matvec};
#endif

Backend g_backend = Backend::Auto;
const Table* g_table = nullptr;

Backend env_backend() {
    const char* env = std::getenv("TVPF_SIMD");
    if (env == nullptr) return Backend::Auto;
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Backend::Avx2;
    return Backend::Auto;
}

const Table* resolve(Backend b) {
    if (b == Backend::Auto) b = env_backend();
#if defined(TVPF_HAVE_AVX2)
    if (b == Backend::Avx2 || (b == Backend::Auto && cpu_has_avx2())) {
        if (cpu_has_avx2()) {
            g_backend = Backend::Avx2;
            return &kAvx2;
        }
    }
#endif
    g_backend = Backend::Scalar;
    return &kScalar;
}

const Table& table() {
    if (g_table == nullptr) g_table = resolve(Backend::Auto);
    return *g_table;
}

}  // namespace

void select_backend(Backend b) { g_table = resolve(b); }

Backend active_backend() {
    table();
    return g_backend;
}

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
double sum_abs(const double* x, std::size_t n) { return table().sum_abs(x, n); }
double sum_sq(const double* x, std::size_t n) { return table().sum_sq(x, n); }
double max_abs(const double* x, std::size_t n) { return table().max_abs(x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) { table().axpy(a, x, y, n); }

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
    table().axpby(a, x, b, y, out, n);
}

void taylor2(const double* x0, double c1, const double* d1, double c2, const double* d2,
             double* out, std::size_t n) {
    table().taylor2(x0, c1, d1, c2, d2, out, n);
}

void lerp(const double* u, const double* v, double t, double* out, std::size_t n) {
    table().lerp(u, v, t, out, n);
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    table().matvec(a, rows, cols, x, y);
}

}  // namespace tvpf::kernels
