#pragma once

#include <Eigen/Dense>

#include "difflab/target.hpp"

namespace difflab {

// The noisy state x acts as an external field on the microstate ensemble;
// t*sigma^2 plays the role of temperature.
struct ThermoState {
    Eigen::VectorXd x;
    double t = 1.0;
    double sigma = 1.0;

    double beta() const noexcept { return 1.0 / (t * sigma * sigma); }
};

// guard against the t -> 0 singularity of beta(t)
inline constexpr double kTimeFloor = 1e-9;

void validate(const ThermoState& state, const Target& target);

namespace thermo {

// H(y; x, t) = beta (||y||^2/2 - x.y) - log phi(y). For the hypersphere the
// -log phi constant is dropped (shifts Z, leaves every gradient unchanged).
double hamiltonian(const Eigen::VectorXd& y, const ThermoState& state, const Target& target);

double log_partition(const ThermoState& state, const Target& target);

// F = -log Z / beta; regularized adds ||x||^2/2
double free_energy(const ThermoState& state, const Target& target, bool regularized = false);

// <y>_{t,x} = -grad F
Eigen::VectorXd posterior_mean(const ThermoState& state, const Target& target);
void posterior_mean_into(const ThermoState& state, const Target& target,
                         Eigen::Ref<Eigen::VectorXd> out);

// grad log p_t(x) = beta (<y> - x)
Eigen::VectorXd score(const ThermoState& state, const Target& target);
void score_into(const ThermoState& state, const Target& target, Eigen::Ref<Eigen::VectorXd> out);

// log p_t(x) with the full (2 pi t sigma^2)^{-d/2} normalization
double log_marginal(const ThermoState& state, const Target& target);

// Boltzmann covariance C of the microstates at (x, t)
Eigen::MatrixXd boltzmann_covariance(const ThermoState& state, const Target& target);

// bare response d<y>_i/dx_j = beta C  (the self-consistent resummation lives
// in the criticality module)
Eigen::MatrixXd susceptibility(const ThermoState& state, const Target& target);

// d(score)_i/dx_j = beta^2 C - beta I = beta (susceptibility - I)
Eigen::MatrixXd score_jacobian(const ThermoState& state, const Target& target);

// grad F_reg = x - <y>; -beta * this is identically the score
Eigen::VectorXd regularized_free_energy_gradient(const ThermoState& state, const Target& target);

struct ThermoReport {
    double log_Z = 0.0;
    double free_energy = 0.0;
    double regularized_free_energy = 0.0;
    Eigen::VectorXd posterior_mean;
    Eigen::VectorXd score;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd susceptibility;
    Eigen::MatrixXd score_jacobian;
};
ThermoReport report(const ThermoState& state, const Target& target);

} // namespace thermo
} // namespace difflab
