#pragma once

#include <stdexcept>
#include <string>

namespace fracmc {

enum class ErrorKind {
    invalid_parameter,
    out_of_neighborhood,
    invalid_regime,
    non_convergence,
    non_monotone,
    stability_violation,
    under_resolved,
    no_level_crossing,
    cross_form_mismatch,
    validation,
    io,
};

const char* to_string(ErrorKind kind) noexcept;

// Numerical failures map to exit status 3 in the CLI, everything else to 2.
bool is_numerical_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Carries the last residual so callers can report how far the solver got.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual)
        : Error(ErrorKind::non_convergence, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace fracmc
