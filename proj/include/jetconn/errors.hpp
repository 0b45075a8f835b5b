#pragma once

#include <stdexcept>
#include <string>

namespace jetconn {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument count or tensor dimension does not match a declared arity.
struct DimensionError : Error {
    using Error::Error;
};

/// A math function was evaluated outside its domain (log of a negative
/// number, division by zero, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Domain error raised while evaluating an expression tree; carries the
/// byte offset of the offending AST node in the original source text.
struct EvalError : Error {
    std::size_t offset;
    EvalError(const std::string& what, std::size_t off) : Error(what), offset(off) {}
};

/// Metric determinant below the scale-aware nondegeneracy threshold.
struct SingularMetric : Error {
    using Error::Error;
};

/// Eigenvalue sign counts differ between two sample points.
struct NonconstantSignature : Error {
    using Error::Error;
};

/// Jacobian of a coordinate change is singular at the evaluation point.
struct SingularJacobian : Error {
    using Error::Error;
};

/// Operation invoked with an unsupported number of temporal/spatial dims.
struct WrongArity : Error {
    using Error::Error;
};

/// Requested derivative order exceeds what an evaluator can provide.
struct UnsupportedOrder : Error {
    using Error::Error;
};

/// Canonical GML construction failed: the energy Lagrangian is not
/// Kronecker psi-regular and no a-priori spatial metric was supplied.
struct NoSpatialComponents : Error {
    using Error::Error;
};

/// Discrete map queried where the difference stencil does not fit.
struct OutOfDomain : Error {
    using Error::Error;
};

/// p=2 lattice smaller than the minimum 5x5.
struct GridTooSmall : Error {
    using Error::Error;
};

/// Integration state exceeded the configured norm bound.
struct BlowUp : Error {
    using Error::Error;
};

/// A variation direction does not vanish on the boundary of T.
struct BoundaryViolation : Error {
    using Error::Error;
};

/// Problem configuration failed schema or consistency validation.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace jetconn
