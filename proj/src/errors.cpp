#include "fracmc/errors.hpp"

namespace fracmc {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::out_of_neighborhood: return "out-of-neighborhood";
        case ErrorKind::invalid_regime: return "invalid-regime";
        case ErrorKind::non_convergence: return "non-convergence";
        case ErrorKind::non_monotone: return "non-monotone";
        case ErrorKind::stability_violation: return "stability-violation";
        case ErrorKind::under_resolved: return "under-resolved";
        case ErrorKind::no_level_crossing: return "no-level-crossing";
        case ErrorKind::cross_form_mismatch: return "cross-form-mismatch";
        case ErrorKind::validation: return "validation";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

bool is_numerical_failure(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::non_convergence:
        case ErrorKind::non_monotone:
        case ErrorKind::stability_violation:
        case ErrorKind::cross_form_mismatch:
        case ErrorKind::no_level_crossing:
            return true;
        default:
            return false;
    }
}

}  // namespace fracmc
