#pragma once

#include <stdexcept>
#include <string>

namespace qlg {

enum class ErrorCode {
    InvalidArgument = 1,
    CollisionRange = 2,
    Diverged = 3,
    Io = 4,
    NoEstimate = 5,
    Numerical = 6,
};

// Single exception type for the library; the code maps 1:1 onto the C API
// status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace qlg
