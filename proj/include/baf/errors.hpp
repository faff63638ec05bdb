#pragma once

#include <stdexcept>
#include <string>

namespace baf {

/// Raised when an input violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an iterative procedure (bisection, quadrature, asymptotic
/// experiment) cannot reach its stopping criterion.
class ConvergenceFailure : public std::runtime_error {
public:
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace baf
