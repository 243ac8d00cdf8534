#pragma once

#include <stdexcept>
#include <string>

namespace reclab
{

//! Failure categories; the CLI maps these onto process exit codes.
enum class ErrorKind
{
    invalid_input,       //!< malformed or out-of-contract arguments
    degenerate,          //!< well-formed input with nothing to measure
    unsupported,         //!< valid pieces that cannot be combined
    inexact_regime,      //!< no closed form maintained for this regime
    numerical_failure,   //!< an iterative method did not converge
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string const& what)
{
    throw Error(kind, what);
}

inline void require(bool condition, std::string const& what)
{
    if (!condition)
    {
        fail(ErrorKind::invalid_input, what);
    }
}

}  // namespace reclab
