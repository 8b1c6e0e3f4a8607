#include "tvpf/combinatorics.hpp"

#include <string>

#include "tvpf/errors.hpp"

namespace tvpf {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw Overflow("integer overflow in multiplication");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw Overflow("integer overflow in addition");
    return out;
}

}  // namespace

std::int64_t double_factorial(std::int64_t n) {
    if (n == -1) return 1;
    if (n < -1 || n % 2 == 0) throw EvenArgument(n);
    std::int64_t p = 1;
    for (std::int64_t f = 3; f <= n; f += 2) p = checked_mul(p, f);
    return p;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < k || n > 40)
        throw OutOfRange("binomial requires 0 <= k <= n <= 40, got n=" + std::to_string(n) +
                         " k=" + std::to_string(k));
    if (k > n - k) k = n - k;
    std::int64_t c = 1;
    for (std::int64_t j = 1; j <= k; ++j) {
        // Multiplicative formula; each intermediate quotient is exact.
        c = checked_mul(c, n - k + j) / j;
    }
    return c;
}

std::int64_t dblfact_sum(std::int64_t i) {
    if (i < 2 || i > 15)
        throw OutOfRange("dblfact_sum requires 2 <= i <= 15, got " + std::to_string(i));
    std::int64_t s = 0;
    for (std::int64_t k = 1; k <= i; ++k) {
        const std::int64_t term =
            checked_mul(binomial(i, k),
                        checked_mul(double_factorial(2 * k - 3), double_factorial(2 * (i - k) - 1)));
        s = checked_add(s, term);
    }
    return s;
}

std::int64_t phi_sum(std::int64_t d) {
    if (d < 2 || d > 16)
        throw OutOfRange("phi_sum requires 2 <= d <= 16, got " + std::to_string(d));
    std::int64_t s = 0;
    for (std::int64_t k = 1; k <= d - 1; ++k) {
        const std::int64_t term = checked_mul(
            binomial(d - 1, k),
            checked_mul(double_factorial(2 * k - 3), double_factorial(2 * (d - k) - 3)));
        s = checked_add(s, term);
    }
    return s;
}

}  // namespace tvpf
