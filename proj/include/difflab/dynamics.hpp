#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "difflab/rng.hpp"
#include "difflab/target.hpp"
#include "difflab/thermo.hpp"

namespace difflab {
namespace dynamics {

struct Schedule {
    enum class Spacing { linear, log };

    double t_end = 1.0;
    double t_min = 1e-4;
    int steps = 1000;
    Spacing spacing = Spacing::log;

    void validate() const;

    // descending grid with steps+1 points from t_end to t_min
    std::vector<double> grid() const;
};

struct Trajectory {
    std::vector<double> times;            // descending for reverse runs
    std::vector<Eigen::VectorXd> states;  // one per time
    std::uint64_t seed = 0;
};

// Divergence guard tripped (||x|| > 1e6); carries the steps completed so far.
class NonFiniteStateError : public Error {
public:
    NonFiniteStateError(std::string what, Trajectory partial)
        : Error(Errc::non_finite_state, std::move(what)), partial_trajectory(std::move(partial)) {}
    Trajectory partial_trajectory;
};

// One-shot exact forward propagator: y0 + sqrt(t) sigma xi. The forward
// marginal is Gaussian in closed form, so there is nothing to integrate.
Eigen::VectorXd forward_sample(const Eigen::VectorXd& y0, double t, double sigma, RngStream& rng);

// sigma^2 * score: the reverse drift per unit time, identically equal to
// -sigma^2 beta grad F_reg
Eigen::VectorXd reverse_drift(const ThermoState& state, const Target& target);

// Euler-Maruyama on the reverse SDE with the exact score:
//   x <- x + sigma^2 score(x,t) dt + noise_scale sigma sqrt(dt) xi
// noise_scale 0 gives the deterministic drift flow.
Trajectory reverse_integrate(const Eigen::VectorXd& x_init, const Schedule& schedule,
                             const Target& target, double sigma, RngStream& rng,
                             double noise_scale = 1.0);

// Same step rule with the drift computed through the regularized free energy
// gradient; agrees with reverse_integrate stream-for-stream.
Trajectory free_energy_descent(const Eigen::VectorXd& x_init, const Schedule& schedule,
                               const Target& target, double sigma, RngStream& rng,
                               double noise_scale = 1.0);

// Moment-matched Gaussian initialization at t_start: mean = E_phi[y],
// covariance = Cov_phi(y) + t_start sigma^2 I.
RowMatrixXd late_start_init(double t_start, const Target& target, double sigma,
                            RngStream& rng, int n);

// n exact draws from p_t: y ~ phi followed by the forward propagator.
// Row i uses substream (master_seed, stream_offset + i).
RowMatrixXd sample_p_t(const Target& target, double t, double sigma, int n,
                       std::uint64_t master_seed, std::uint64_t stream_offset = 0);

// Parallel trajectory ensemble from the given initial rows; trajectory i uses
// substream (master_seed, stream_offset + i). Optionally records the state at
// the grid time closest to snapshot_t.
struct EnsembleResult {
    RowMatrixXd terminal;
    std::optional<RowMatrixXd> snapshot;
    double snapshot_t = 0.0;
};
EnsembleResult reverse_ensemble(const RowMatrixXd& inits, const Schedule& schedule,
                                const Target& target, double sigma, std::uint64_t master_seed,
                                std::uint64_t stream_offset = 0,
                                std::optional<double> snapshot_t = std::nullopt);

} // namespace dynamics
} // namespace difflab
