#pragma once

#include <stdexcept>
#include <string>

namespace difflab {

// Failure taxonomy shared by all modules. Each code corresponds to a
// documented error path; everything else is a plain invalid_argument.
enum class Errc {
    invalid_argument,
    non_symmetric_coupling,
    bad_weights,
    dimension_too_large,
    continuous_support,
    off_support,
    quadrature_not_converged,
    non_finite_state,
    no_convergence,
    no_bracket,
    fit_rejected,
    singular_resummation,
    size_overflow,
    zero_field,
    non_constant_norm,
    critical_divergence,
    mismatch_detected,
    config_error,
    numerical_failure,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
    throw Error(code, msg);
}

inline void require(bool cond, Errc code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace difflab
