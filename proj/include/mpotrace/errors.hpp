#pragma once

#include <stdexcept>
#include <string>

namespace mpotrace {

// Extent or rank mismatch between tensors/operators, or an out-of-range index.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical invariant broke down (non-finite values, loss of Hermiticity,
// negative quadrature weights beyond tolerance, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A scalar function was evaluated outside its domain (e.g. non-finite at a node).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or version-incompatible serialized data.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A cached artifact does not belong to the requested computation.
class CacheMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mpotrace
