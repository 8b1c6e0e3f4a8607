#pragma once

#include <cstdint>

namespace tvpf {

/// Double factorial of an odd integer, with (-1)!! = 1. Even arguments raise
/// EvenArgument; results that do not fit in 64 bits raise Overflow.
std::int64_t double_factorial(std::int64_t n);

/// Binomial coefficient, exact for 0 <= k <= n <= 40 (OutOfRange otherwise).
std::int64_t binomial(std::int64_t n, std::int64_t k);

/// sum_{k=1..i} C(i,k) * (2k-3)!! * (2(i-k)-1)!!  for 2 <= i <= 15.
/// Equals (2i-1)!!.
std::int64_t dblfact_sum(std::int64_t i);

/// sum_{k=1..d-1} C(d-1,k) * (2k-3)!! * (2(d-k)-3)!!  for 2 <= d <= 16.
/// Equals (2d-3)!!.
std::int64_t phi_sum(std::int64_t d);

}  // namespace tvpf
