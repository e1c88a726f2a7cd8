#ifndef NCAR_ERRORS_HPP
#define NCAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ncar {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// theta_d = 0: the companion matrix is singular, no inverse exists.
struct DegenerateTheta : Error {
    using Error::Error;
};

// Operation requires all eigenvalues of B strictly outside the unit circle.
struct NotPurelyExplosive : Error {
    using Error::Error;
};

// Operation requires all eigenvalues of B strictly inside the unit circle.
struct NotStable : Error {
    using Error::Error;
};

struct WrongOrder : Error {
    using Error::Error;
};

// Invalid noise specification (e.g. student_t with nu <= 2).
struct BadSpec : Error {
    using Error::Error;
};

// Truncation horizon cap reached before the requested tolerance.
struct HorizonOverflow : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

// Structural assertion on a matrix power failed (broken inverse).
struct PatternViolation : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct PathTooShort : Error {
    using Error::Error;
};

struct LagTooLarge : Error {
    using Error::Error;
};

struct BadH : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct RankZero : Error {
    using Error::Error;
};

}  // namespace ncar

#endif
