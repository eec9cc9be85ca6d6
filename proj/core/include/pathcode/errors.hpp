#pragma once

#include <stdexcept>
#include <string>

namespace pathcode {

// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// graph construction / validation
struct CycleDetected : Error {
    int cycle_u, cycle_v;  // one arc lying on a cycle
    CycleDetected(int u, int v)
        : Error("cycle detected through arc (" + std::to_string(u) + "," + std::to_string(v) + ")"),
          cycle_u(u), cycle_v(v) {}
};
struct SelfLoop : Error {
    explicit SelfLoop(int v) : Error("self-loop at vertex " + std::to_string(v)) {}
};
struct DuplicateArc : Error {
    DuplicateArc(int u, int v)
        : Error("duplicate arc (" + std::to_string(u) + "," + std::to_string(v) + ")") {}
};
struct MissingArcCost : Error {
    using Error::Error;
};
struct InvalidPath : Error {
    using Error::Error;
};
struct ZeroProbabilityArc : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

// flow solver
struct Infeasible : Error {
    using Error::Error;
};
struct Overflow : Error {
    using Error::Error;
};
struct NonConservativeInput : Error {
    using Error::Error;
};
struct NotConverged : Error {
    double achieved_tolerance;
    NotConverged(const std::string& what, double achieved)
        : Error(what), achieved_tolerance(achieved) {}
};

// penalty / path enumeration
struct TooManyPaths : Error {
    using Error::Error;
};

// data / dimensions
struct DimensionMismatch : Error {
    using Error::Error;
};

// experiments
struct GraphTooSparse : Error {
    using Error::Error;
};
struct ImageTooSmall : Error {
    using Error::Error;
};

}  // namespace pathcode
