#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "difflab/rng.hpp"
#include "difflab/target.hpp"

namespace difflab {
namespace rem {

// standard-REM condensation temperature for 2^M levels E ~ N(0, M/2)
inline const double kBetaCritical = 2.0 * std::sqrt(std::log(2.0));

// Quenched disorder realization: N = 2^M points uniform on a sphere whose
// radius nu sqrt(M d / 2) makes the field projections x_hat . y_j Gaussian
// with variance nu^2 M / 2 for large d — the scaling that maps the quenched
// partition function onto the standard REM with beta_tilde = nu beta ||x||.
struct RemDataset {
    int m_exponent = 0; // N = 2^M
    int dim = 0;
    double nu = 0.0;
    double radius = 0.0;
    RowMatrixXd points; // N x d, all rows of norm `radius`
    std::uint64_t seed = 0;

    Eigen::Index count() const { return points.rows(); }
};

RemDataset build_rem_dataset(int m_exponent, int dim, double nu, RngStream& rng);

// log[(1/N) sum_j exp(-beta (||y_j||^2/2 - x.y_j))], log-domain
double quenched_log_partition(const RemDataset& dataset, const Eigen::VectorXd& x, double beta);

// sum_j w_j^2 over the normalized Boltzmann weights (equals
// Z(2 beta)/Z(beta)^2 without the 1/N bookkeeping)
double participation_ratio(const RemDataset& dataset, const Eigen::VectorXd& x,
                           double t, double sigma);

// t_cond = nu ||x|| / (2 sigma^2 sqrt(log 2))
double condensation_time(const Eigen::VectorXd& x, double nu, double sigma);

// asymptotic disorder mean: 0 below beta_c, 1 - beta_c/beta_tilde above
double expected_participation_ratio(double beta_tilde);

struct RemScanParams {
    int m_exponent = 16;
    int dim = 128;
    double nu = 1.0;
};

struct CondensationReport {
    RemScanParams params;
    double t_cond = 0.0;
    std::vector<double> t_grid;
    std::vector<double> beta_tilde;
    std::vector<double> y_mean;    // disorder mean of the participation ratio
    std::vector<double> y_stderr;
    std::vector<double> y_theory;
    std::vector<double> n_eff;     // 1 / y_mean
};

// Disorder-averaged participation ratio over fresh datasets (one substream
// per replica), with the asymptotic theory overlay.
CondensationReport condensation_scan(const RemScanParams& params, const Eigen::VectorXd& x,
                                     double sigma, const std::vector<double>& t_grid,
                                     int replicas, std::uint64_t master_seed);

} // namespace rem
} // namespace difflab
