#pragma once

#include <Eigen/Dense>
#include <vector>

#include "difflab/dynamics.hpp"
#include "difflab/rng.hpp"
#include "difflab/target.hpp"

namespace difflab {
namespace bath {

// One configuration of the K-site generative bath. Microstates are support
// atoms of a constant-norm target; coupling w = -1/K makes alignment
// energetically favorable with a K-independent mean-field limit.
struct BathConfig {
    RowMatrixXd microstates; // K x d
    double coupling_w = 0.0;
    Eigen::VectorXd field;
    double beta = 1.0;

    int sites() const { return static_cast<int>(microstates.rows()); }
};

double default_coupling(int sites); // -1/K

// H_K = beta ( w/2 sum_{mu != nu} y^mu . y^nu - sum_mu y^mu . h )
//       - sum_mu log psi(y^mu),  psi = phi on constant-norm supports
double bath_energy(const BathConfig& config, const Target& target);

struct BathRunStats {
    Eigen::VectorXd mean_magnetization; // time average of ybar post burn-in
    double susceptibility = 0.0;        // beta K Var(ybar) fluctuation estimate
    double acceptance_rate = 0.0;
    double autocorrelation_time = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> magnetization_series; // per-sweep ybar . e_h (post burn-in)
};

// Single-site Metropolis over K sites at beta(t) = 1/(t sigma^2). Sites are
// initialized aligned with the field when h != 0 (pure-state measurement)
// and uniformly at random otherwise.
BathRunStats bath_mc_run(int sites, double t, double sigma, const Eigen::VectorXd& h,
                         const Target& target, int sweeps, int burn_in, RngStream& rng);

// stable root of m = tanh((m+h)/(t sigma^2)); positive branch at h = 0
double curie_weiss_magnetization(double t, double sigma, double h);

// T dm/dh by central differences (step 1e-6) within the h > 0 pure state;
// CriticalDivergence within 1e-6 of t sigma^2 = 1.
double pure_state_variance(double t, double sigma);

// Brownian particle driven by the bath's pure-state fluctuations:
//   x <- x + (m* - x) dt/t + B xi sqrt(dt/t) / sqrt(H)
// with m* the stable mean-field branch nearest to x and B the matrix square
// root of the pure-state covariance (I - beta C)^{-1} C.
dynamics::Trajectory bath_brownian_integrate(const Eigen::VectorXd& x_init,
                                             const dynamics::Schedule& schedule,
                                             int coupled_sites, const Target& target,
                                             double sigma, RngStream& rng);

struct ConvergenceRow {
    int sites = 0;
    double t = 0.0;
    double mean_magnetization = 0.0; // projection onto the field direction
    double stderr_ = 0.0;
    double mean_field_value = 0.0;
    double abs_error = 0.0;
};

// |<ybar>_K - m_mean-field| with stderr per (K, t); replicas use derived
// streams so the table is reproducible and thread-count independent.
std::vector<ConvergenceRow> mean_field_convergence_study(
    const std::vector<int>& site_counts, const std::vector<double>& t_grid,
    const Eigen::VectorXd& h, const Target& target, double sigma, int replicas,
    std::uint64_t master_seed, int sweeps, int burn_in);

} // namespace bath
} // namespace difflab
