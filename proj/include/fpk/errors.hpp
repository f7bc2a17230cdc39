#ifndef FPK_ERRORS_HPP
#define FPK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpk {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text; `position` is a 0-based offset into the source.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& message)
        : Error("syntax error at position " + std::to_string(position) + ": " + message),
          position(position),
          message(message) {}
    std::size_t position;
    std::string message;
};

/// An identifier in an expression does not name a chart coordinate.
class UnknownCoordinate : public Error {
public:
    explicit UnknownCoordinate(const std::string& name, std::size_t position = 0)
        : Error("unknown coordinate '" + name + "'"), name(name), position(position) {}
    std::string name;
    std::size_t position;
};

/// A divisor evaluated with magnitude below the 1e-12 guard.
class DivisionNearZero : public Error {
public:
    explicit DivisionNearZero(const std::string& subexpr)
        : Error("division by a value with magnitude < 1e-12 in: " + subexpr),
          subexpr(subexpr) {}
    std::string subexpr;
};

/// More than 80% of sample draws hit the division guard.
class SamplingExhausted : public Error {
public:
    using Error::Error;
};

/// Two fields were combined across different charts.
class ChartMismatch : public Error {
public:
    using Error::Error;
};

/// Structure fields are dimensionally inconsistent.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Wedge product exceeding the chart dimension.
class DegreeOverflow : public Error {
public:
    using Error::Error;
};

/// Every alpha constant is zero, so no Reeb-type section exists.
class AllAlphaZero : public Error {
public:
    using Error::Error;
};

/// The Hamiltonian system matrix is numerically singular at the pivot base point.
class SingularRestriction : public Error {
public:
    using Error::Error;
};

/// The fundamental 2-form sampled to zero on all tested pairs.
class AlphaFitIllPosed : public Error {
public:
    using Error::Error;
};

/// A check that requires an almost S-structure was run on something else.
class PreconditionNotAlmostS : public Error {
public:
    using Error::Error;
};

/// A constructor input failed one of its oracle-checked relations.
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

/// No axis-aligned fibre box keeps tau bounded away from zero.
class EmptyPositiveCone : public Error {
public:
    using Error::Error;
};

/// A manifold document violates the schema; `field` names the offending entry.
class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& reason)
        : Error("schema error at " + field + ": " + reason), field(field) {}
    std::string field;
};

} // namespace fpk

#endif
