#ifndef STARFLOW_ERRORS_HPP
#define STARFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace starflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside the operation's domain (nonpositive radius, bad node counts, ...).
struct DomainError : Error {
    using Error::Error;
};

/// A curvature eigenvalue pair left the admissibility cone of the curvature
/// function. Carries the offending grid node and its principal curvatures.
struct ConeError : Error {
    ConeError(std::size_t node_, double k1, double k2, const std::string& what_)
        : Error(what_), node(node_), kappa1(k1), kappa2(k2) {}

    std::size_t node;
    double kappa1;
    double kappa2;
};

}  // namespace starflow

#endif
