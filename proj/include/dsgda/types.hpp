#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsgda {

using Vec = std::vector<double>;
using CSpan = std::span<const double>;
using Span = std::span<double>;

// Base of every library error. The CLI maps ConfigError to exit status 1
// and NumericError to exit status 2.
// Shortest text that reads back bit for bit: 17 significant digits.
std::string format_double(double v);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class UnknownProblem : public Error {
public:
    using Error::Error;
};

// Raised when an operation needs something the problem does not provide
// (payoff values for a gradient-field problem, second derivatives, dim > 1).
class UnsupportedProblem : public Error {
public:
    using Error::Error;
};

class ParamError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    NumericError(const std::string& what, std::uint64_t iterate)
        : Error(what), iterate_(iterate) {}
    std::uint64_t iterate() const { return iterate_; }

private:
    std::uint64_t iterate_;
};

}  // namespace dsgda
