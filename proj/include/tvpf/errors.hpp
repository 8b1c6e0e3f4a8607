#pragma once

#include <stdexcept>
#include <string>

namespace tvpf {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input / parsing errors
// ---------------------------------------------------------------------------

struct MalformedCase : Error {
    MalformedCase(const std::string& what, int line_number)
        : Error("malformed case (line " + std::to_string(line_number) + "): " + what),
          line(line_number) {}
    int line;
};

struct MissingSlack : Error {
    MissingSlack() : Error("case has no slack (type 3) bus") {}
};

struct DuplicateBusId : Error {
    explicit DuplicateBusId(int id) : Error("duplicate bus id " + std::to_string(id)), bus_id(id) {}
    int bus_id;
};

struct NonPositiveBase : Error {
    explicit NonPositiveBase(double base)
        : Error("baseMVA must be positive, got " + std::to_string(base)) {}
};

struct MalformedSchedule : Error {
    MalformedSchedule(const std::string& what, int line_number)
        : Error("malformed schedule (line " + std::to_string(line_number) + "): " + what),
          line(line_number) {}
    int line;
};

// ---------------------------------------------------------------------------
// Numerical errors
// ---------------------------------------------------------------------------

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ZeroImpedanceBranch : Error {
    explicit ZeroImpedanceBranch(int from, int to)
        : Error("branch " + std::to_string(from) + "-" + std::to_string(to) +
                " has zero series impedance") {}
};

struct SingularJacobian : Error {
    explicit SingularJacobian(double pivot)
        : Error("singular matrix: pivot magnitude " + std::to_string(pivot) + " below threshold") {}
};

struct NonConvergence : Error {
    NonConvergence(int iters, double mismatch, const std::string& context = "")
        : Error("power flow did not converge after " + std::to_string(iters) +
                " iterations (mismatch " + std::to_string(mismatch) + ")" +
                (context.empty() ? "" : " at " + context)),
          iterations(iters),
          final_mismatch(mismatch) {}
    int iterations;
    double final_mismatch;
};

struct MissingLowerOrder : Error {
    MissingLowerOrder(int requested, int available)
        : Error("derivative order " + std::to_string(requested) + " requires all orders below; only " +
                std::to_string(available) + " available") {}
};

struct TimeOutOfInterval : Error {
    TimeOutOfInterval(double t, double t_start, double t_end)
        : Error("time " + std::to_string(t) + " outside interval [" + std::to_string(t_start) +
                ", " + std::to_string(t_end) + "]") {}
};

struct NonMonotonicTimes : Error {
    using Error::Error;
};

struct LayoutMismatch : Error {
    using Error::Error;
};

struct InfeasibleScenario : Error {
    using Error::Error;
};

struct ZeroFirstDerivative : Error {
    ZeroFirstDerivative() : Error("first derivative norm is zero; correction coefficient undefined") {}
};

struct EmptyInput : Error {
    EmptyInput() : Error("empty input") {}
};

// ---------------------------------------------------------------------------
// Integer arithmetic errors
// ---------------------------------------------------------------------------

struct Overflow : Error {
    using Error::Error;
};

struct EvenArgument : Error {
    explicit EvenArgument(long long n)
        : Error("double factorial defined here only for odd n >= -1, got " + std::to_string(n)) {}
};

struct OutOfRange : Error {
    using Error::Error;
};

struct InvalidOrder : Error {
    explicit InvalidOrder(int d) : Error("derivative order must be >= 2, got " + std::to_string(d)) {}
};

}  // namespace tvpf
