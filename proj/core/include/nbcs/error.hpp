#pragma once

#include <stdexcept>
#include <string>

namespace nbcs {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated a precondition (bad dimension, bad parameter range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input data could not be parsed or is inconsistent.
class DataError : public Error {
public:
    using Error::Error;
};

/// A computation hit a degenerate or ill-conditioned configuration.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A query point lies outside the root simplex. Carries the most negative
/// barycentric coefficient and the vertex it belongs to.
class OutsideRootError : public DomainError {
public:
    OutsideRootError(std::size_t vertex, double coefficient)
        : DomainError("point lies outside the root simplex (coefficient of root vertex " +
                      std::to_string(vertex) + " is " + std::to_string(coefficient) + ")"),
          vertex_(vertex),
          coefficient_(coefficient) {}

    std::size_t vertex() const noexcept { return vertex_; }
    double coefficient() const noexcept { return coefficient_; }

private:
    std::size_t vertex_;
    double coefficient_;
};

}  // namespace nbcs
