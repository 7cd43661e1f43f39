#pragma once

#include <stdexcept>
#include <string>

namespace sasma {

// Process exit codes used by the command line tool.
enum class ExitCode : int { ok = 0, config = 2, numeric = 3, io = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Parameter outside its mathematical domain (alpha out of range, p >= alpha, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Malformed or inconsistent configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Requested problem size exceeds the configured memory budget.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Degenerate numerics: all-zero data, vanishing norms, etc.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ExitCode::numeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace sasma
