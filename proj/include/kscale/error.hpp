#pragma once

#include <stdexcept>
#include <string>

namespace kscale {

/// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
    usage = 1,      ///< invalid arguments or configuration
    data = 2,       ///< malformed or unsuitable input data
    numerical = 3,  ///< an algorithm failed to produce a valid result
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return Error(ErrorKind::usage, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::numerical, what); }

}  // namespace kscale
