#pragma once

// Error categories shared by the library and the command-line tool. Each
// category maps to a fixed process exit code.

#include <stdexcept>
#include <string>

namespace etadist {

class Error : public std::runtime_error {
  public:
    Error(std::string kind, int exit_code, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)), exit_code_(exit_code)
    {
    }

    const std::string& kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return exit_code_; }

  private:
    std::string kind_;
    int exit_code_;
};

// Bad user input or out-of-range arguments.
struct ParameterError : Error {
    explicit ParameterError(const std::string& what) : Error("parameter", 2, what) {}
};

// Argument outside the mathematical domain of a function.
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("domain", 2, what) {}
};

// Requested work exceeds a table or enumeration limit.
struct CapacityError : Error {
    explicit CapacityError(const std::string& what) : Error("capacity", 3, what) {}
};

// Quadrature, root finding or a self-check did not meet its tolerance.
struct NumericError : Error {
    explicit NumericError(const std::string& what, std::string diagnostics = {})
        : Error("numeric", 4, what), diagnostics_(std::move(diagnostics))
    {
    }
    const std::string& diagnostics() const noexcept { return diagnostics_; }

  private:
    std::string diagnostics_;
};

// A structural guarantee failed; indicates a bug or unsupported input.
struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error("internal", 4, what) {}
};

} // namespace etadist
