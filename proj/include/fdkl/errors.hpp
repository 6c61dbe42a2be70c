#pragma once

#include <stdexcept>
#include <string>

namespace fdkl {

/// Invalid arguments: sizes, indices, parameter ranges, grid mismatches.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point evaluated outside the domain of a kernel or field.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine failed (eigensolve, Cholesky, linear solve).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fdkl
