#pragma once
// Error types shared across the library. Precondition violations throw
// std::invalid_argument; the named conditions below get their own types so
// callers (CLI, tests) can distinguish them.

#include <stdexcept>
#include <string>

namespace ladderlab {

// Requested range exceeds the configured sieve cap.
struct limit_exceeded : std::runtime_error {
    explicit limit_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// No induction-step certificate exists below the search cap.
struct no_certificate : std::runtime_error {
    explicit no_certificate(const std::string& what) : std::runtime_error(what) {}
};

// A series/ matrix operation was asked for more coefficients than the input holds.
struct precision_too_small : std::runtime_error {
    explicit precision_too_small(const std::string& what) : std::runtime_error(what) {}
};

// An exact-divisibility assumption failed (e.g. 2m+1 does not divide P-1).
struct divisibility_violation : std::invalid_argument {
    explicit divisibility_violation(const std::string& what) : std::invalid_argument(what) {}
};

// Input exceeds a configured resource cap (census prime cap, etc).
struct resource_limit : std::runtime_error {
    explicit resource_limit(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ladderlab
