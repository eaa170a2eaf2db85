#ifndef APPIC_ERROR_HPP
#define APPIC_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace appic {

/// Bad configuration: unknown key, unparsable value, violated parameter invariant.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or broken precondition detected at runtime.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver (non-convergence, overflow, positivity loss).
class SolverError : public std::runtime_error
{
public:
    explicit SolverError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual)
    {
    }

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A sampled initial density was not strictly positive on the requested points.
class NonPositiveDensity : public InputError
{
public:
    using InputError::InputError;
};

} // namespace appic

#endif // APPIC_ERROR_HPP
