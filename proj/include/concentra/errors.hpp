#pragma once

#include <stdexcept>
#include <string>

namespace concentra {

// Error taxonomy shared by all modules.  Everything derives from Error so
// callers (and the CLI) can catch the whole family at once; the concrete
// type tells them what went wrong.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation needs a nonempty set (e.g. distance transform, centroid).
struct EmptySetError : Error {
    explicit EmptySetError(const std::string& what = "operation requires a nonempty set")
        : Error(what) {}
};

// Two grids with different cell spacings where equal spacing is required.
struct SpacingMismatchError : Error {
    explicit SpacingMismatchError(const std::string& what = "grid spacings differ")
        : Error(what) {}
};

// Grid origins not offset by an integer number of cells.
struct MisalignedOriginsError : Error {
    explicit MisalignedOriginsError(const std::string& what = "grid origins are not lattice-aligned")
        : Error(what) {}
};

// A set that was required to coincide with its r-envelope does not.
struct NotRConvexError : Error {
    explicit NotRConvexError(const std::string& what = "set does not equal its r-envelope")
        : Error(what) {}
};

// Center search could not keep the required clearance from the boundary.
struct CenterOnBoundaryError : Error {
    explicit CenterOnBoundaryError(const std::string& what = "candidate center is on the boundary")
        : Error(what) {}
};

// Polynomial degree outside the supported range.
struct DegreeTooLargeError : Error {
    explicit DegreeTooLargeError(const std::string& what = "polynomial degree too large")
        : Error(what) {}
};

// Polynomial failed the nonnegativity precondition check.
struct NotNonnegativeError : Error {
    explicit NotNonnegativeError(const std::string& what = "polynomial is not nonnegative on [0,1]")
        : Error(what) {}
};

// A set that was required to be normalized (e.g. unit equivalent radius) is not.
struct NotNormalizedError : Error {
    explicit NotNormalizedError(const std::string& what = "set is not normalized")
        : Error(what) {}
};

// Invalid argument values (nonpositive radius, bad factors, ...).
struct BadParametersError : Error {
    explicit BadParametersError(const std::string& what = "bad parameters")
        : Error(what) {}
};

// Unknown corpus name.
struct UnknownCorpusError : Error {
    explicit UnknownCorpusError(const std::string& what = "unknown corpus")
        : Error(what) {}
};

// Malformed input file (grid-set container, shape spec, ...).
struct FormatError : Error {
    explicit FormatError(const std::string& what = "malformed input") : Error(what) {}
};

}  // namespace concentra
