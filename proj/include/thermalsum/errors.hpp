#pragma once

#include <stdexcept>
#include <string>

namespace thermalsum {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map families of failures to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// No threshold crossing happened within the simulation horizon.
class HorizonExceeded : public Error {
public:
    explicit HorizonExceeded(int horizon)
        : Error("no threshold crossing within max_horizon = " + std::to_string(horizon) + " days"),
          horizon_(horizon)
    {
    }
    int horizon() const noexcept { return horizon_; }

private:
    int horizon_;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class DegenerateDesign : public Error {
public:
    using Error::Error;
};

class SingularFit : public Error {
public:
    using Error::Error;
};

class NonPositiveEstimate : public Error {
public:
    using Error::Error;
};

class MissingHeader : public Error {
public:
    using Error::Error;
};

class EmptyFile : public Error {
public:
    using Error::Error;
};

// Input files required by a pipeline are not present.
class MissingData : public Error {
public:
    using Error::Error;
};

} // namespace thermalsum
