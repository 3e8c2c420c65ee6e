#include "difflab/rem.hpp"

#include <cmath>

#include "difflab/parallel.hpp"
#include "difflab/stats.hpp"
#include "difflab/thermo.hpp"

namespace difflab {
namespace rem {

RemDataset build_rem_dataset(int m_exponent, int dim, double nu, RngStream& rng) {
    require(m_exponent >= 8 && m_exponent <= 24, Errc::size_overflow,
            "REM dataset needs M in [8, 24]");
    require(dim >= 2, Errc::invalid_argument, "REM dataset needs d >= 2");
    require(nu > 0.0, Errc::invalid_argument, "nu must be > 0 (degenerate radius)");

    RemDataset ds;
    ds.m_exponent = m_exponent;
    ds.dim = dim;
    ds.nu = nu;
    ds.radius = nu * std::sqrt(0.5 * m_exponent * dim);
    ds.seed = rng.seed();

    const Eigen::Index n = Eigen::Index{1} << m_exponent;
    ds.points.resize(n, dim);
    Eigen::VectorXd g(dim);
    for (Eigen::Index j = 0; j < n; ++j) {
        double norm = 0.0;
        do {
            for (int k = 0; k < dim; ++k) g[k] = rng.gaussian();
            norm = g.norm();
        } while (norm == 0.0);
        ds.points.row(j) = (ds.radius / norm) * g.transpose();
    }
    return ds;
}

namespace {

// shifted log-domain sums of exp(-beta E_j) and exp(-2 beta E_j) in one pass;
// E_j = ||y_j||^2/2 - x.y_j
struct QuenchedSums {
    double lse1; // logsumexp(-beta E)
    double lse2; // logsumexp(-2 beta E)
};

QuenchedSums quenched_sums(const RemDataset& dataset, const Eigen::VectorXd& x, double beta) {
    require(x.size() == dataset.dim, Errc::invalid_argument, "dimension mismatch");
    const double half_r2 = 0.5 * dataset.radius * dataset.radius;
    const Eigen::VectorXd a = -beta * (half_r2 - (dataset.points * x).array()).matrix();
    const double amax = a.maxCoeff();
    double s1 = 0.0, s2 = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double e = std::exp(a[j] - amax);
        s1 += e;
        s2 += e * e;
    }
    return {amax + std::log(s1), 2.0 * amax + std::log(s2)};
}

} // namespace

double quenched_log_partition(const RemDataset& dataset, const Eigen::VectorXd& x, double beta) {
    return quenched_sums(dataset, x, beta).lse1
           - std::log(static_cast<double>(dataset.count()));
}

double participation_ratio(const RemDataset& dataset, const Eigen::VectorXd& x,
                           double t, double sigma) {
    require(t > kTimeFloor, Errc::invalid_argument, "participation_ratio needs t > 1e-9");
    const double beta = 1.0 / (t * sigma * sigma);
    const QuenchedSums s = quenched_sums(dataset, x, beta);
    return std::exp(s.lse2 - 2.0 * s.lse1);
}

double condensation_time(const Eigen::VectorXd& x, double nu, double sigma) {
    const double xnorm = x.norm();
    require(xnorm > 0.0, Errc::zero_field, "condensation_time needs ||x|| > 0");
    return nu * xnorm / (2.0 * sigma * sigma * std::sqrt(std::log(2.0)));
}

double expected_participation_ratio(double beta_tilde) {
    require(beta_tilde >= 0.0, Errc::invalid_argument, "beta_tilde must be >= 0");
    return beta_tilde <= kBetaCritical ? 0.0 : 1.0 - kBetaCritical / beta_tilde;
}

CondensationReport condensation_scan(const RemScanParams& params, const Eigen::VectorXd& x,
                                     double sigma, const std::vector<double>& t_grid,
                                     int replicas, std::uint64_t master_seed) {
    require(replicas >= 8, Errc::invalid_argument, "condensation_scan needs >= 8 replicas");
    require(!t_grid.empty(), Errc::invalid_argument, "empty time grid");

    CondensationReport report;
    report.params = params;
    report.t_cond = condensation_time(x, params.nu, sigma);
    report.t_grid = t_grid;

    const double xnorm = x.norm();
    // disorder replicas in parallel, one derived stream each
    std::vector<std::vector<double>> ys(t_grid.size(),
                                        std::vector<double>(static_cast<std::size_t>(replicas)));
    parallel_for(replicas, [&](std::int64_t r) {
        RngStream rng = RngStream::substream(master_seed, static_cast<std::uint64_t>(r));
        const RemDataset ds = build_rem_dataset(params.m_exponent, params.dim, params.nu, rng);
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            ys[i][static_cast<std::size_t>(r)] = participation_ratio(ds, x, t_grid[i], sigma);
    });

    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const MeanStderr ms = mean_stderr(ys[i]);
        const double beta = 1.0 / (t_grid[i] * sigma * sigma);
        report.beta_tilde.push_back(params.nu * beta * xnorm);
        report.y_mean.push_back(ms.mean);
        report.y_stderr.push_back(ms.stderr_of_mean);
        report.y_theory.push_back(expected_participation_ratio(report.beta_tilde.back()));
        report.n_eff.push_back(1.0 / ms.mean);
    }
    return report;
}

} // namespace rem
} // namespace difflab
