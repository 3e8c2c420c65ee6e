#include "difflab/dynamics.hpp"

#include <cmath>

#include "difflab/parallel.hpp"

namespace difflab {
namespace dynamics {

namespace {
constexpr double kDivergenceGuard = 1e6;
}

void Schedule::validate() const {
    require(t_min >= 1e-4, Errc::invalid_argument, "schedule t_min must be >= 1e-4");
    require(t_end > t_min, Errc::invalid_argument, "schedule needs t_end > t_min");
    require(steps >= 2, Errc::invalid_argument, "schedule needs >= 2 steps");
}

std::vector<double> Schedule::grid() const {
    validate();
    std::vector<double> ts(static_cast<std::size_t>(steps) + 1);
    if (spacing == Spacing::linear) {
        const double dt = (t_end - t_min) / steps;
        for (int i = 0; i <= steps; ++i) ts[static_cast<std::size_t>(i)] = t_end - i * dt;
    } else {
        const double dl = (std::log(t_end) - std::log(t_min)) / steps;
        for (int i = 0; i <= steps; ++i)
            ts[static_cast<std::size_t>(i)] = std::exp(std::log(t_end) - i * dl);
    }
    ts.front() = t_end;
    ts.back() = t_min;
    return ts;
}

Eigen::VectorXd forward_sample(const Eigen::VectorXd& y0, double t, double sigma,
                               RngStream& rng) {
    require(t > 0.0, Errc::invalid_argument, "forward_sample needs t > 0");
    const double scale = std::sqrt(t) * sigma;
    Eigen::VectorXd x = y0;
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += scale * rng.gaussian();
    return x;
}

Eigen::VectorXd reverse_drift(const ThermoState& state, const Target& target) {
    return state.sigma * state.sigma * thermo::score(state, target);
}

namespace {

enum class DriftRoute { score, free_energy };

// Shared Euler-Maruyama stepper; the two public entry points differ only in
// which algebraic route produces the drift.
Trajectory integrate(const Eigen::VectorXd& x_init, const Schedule& schedule,
                     const Target& target, double sigma, RngStream& rng,
                     double noise_scale, DriftRoute route) {
    require(x_init.size() == target.dim(), Errc::invalid_argument, "dimension mismatch");
    require(x_init.allFinite(), Errc::invalid_argument, "non-finite initial state");
    const std::vector<double> ts = schedule.grid();

    Trajectory traj;
    traj.seed = rng.seed();
    traj.times = ts;
    traj.states.reserve(ts.size());
    traj.states.push_back(x_init);

    const double sigma2 = sigma * sigma;
    Eigen::VectorXd x = x_init;
    Eigen::VectorXd drift(x.size());
    ThermoState state{x, ts[0], sigma};
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double t = ts[i];
        const double dt = t - ts[i + 1];
        state.x = x;
        state.t = t;
        if (route == DriftRoute::score) {
            thermo::score_into(state, target, drift);
            drift *= sigma2;
        } else {
            drift = thermo::regularized_free_energy_gradient(state, target);
            drift *= -sigma2 * state.beta();
        }
        x += dt * drift;
        if (noise_scale != 0.0) {
            const double amp = noise_scale * sigma * std::sqrt(dt);
            for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += amp * rng.gaussian();
        }
        if (!x.allFinite() || x.norm() > kDivergenceGuard) {
            throw NonFiniteStateError(
                "trajectory diverged at t = " + std::to_string(ts[i + 1]), std::move(traj));
        }
        traj.states.push_back(x);
    }
    return traj;
}

} // namespace

Trajectory reverse_integrate(const Eigen::VectorXd& x_init, const Schedule& schedule,
                             const Target& target, double sigma, RngStream& rng,
                             double noise_scale) {
    return integrate(x_init, schedule, target, sigma, rng, noise_scale, DriftRoute::score);
}

Trajectory free_energy_descent(const Eigen::VectorXd& x_init, const Schedule& schedule,
                               const Target& target, double sigma, RngStream& rng,
                               double noise_scale) {
    return integrate(x_init, schedule, target, sigma, rng, noise_scale, DriftRoute::free_energy);
}

RowMatrixXd late_start_init(double t_start, const Target& target, double sigma,
                            RngStream& rng, int n) {
    require(t_start > 0.0, Errc::invalid_argument, "late_start_init needs t_start > 0");
    require(n >= 1, Errc::invalid_argument, "late_start_init needs n >= 1");
    const int d = target.dim();
    Eigen::MatrixXd cov = target.covariance()
        + t_start * sigma * sigma * Eigen::MatrixXd::Identity(d, d);

    // principal square root with eigenvalue clipping at 0
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root =
        es.eigenvectors() * sqrt_ev.asDiagonal() * es.eigenvectors().transpose();

    RowMatrixXd out(n, d);
    Eigen::VectorXd g(d);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) g[k] = rng.gaussian();
        out.row(i) = (target.mean() + root * g).transpose();
    }
    return out;
}

RowMatrixXd sample_p_t(const Target& target, double t, double sigma, int n,
                       std::uint64_t master_seed, std::uint64_t stream_offset) {
    require(n >= 1, Errc::invalid_argument, "sample_p_t needs n >= 1");
    RowMatrixXd out(n, target.dim());
    parallel_for(n, [&](std::int64_t i) {
        RngStream rng = RngStream::substream(master_seed,
                                             stream_offset + static_cast<std::uint64_t>(i));
        const Eigen::VectorXd y0 = target.sample(rng);
        out.row(i) = forward_sample(y0, t, sigma, rng).transpose();
    });
    return out;
}

EnsembleResult reverse_ensemble(const RowMatrixXd& inits, const Schedule& schedule,
                                const Target& target, double sigma, std::uint64_t master_seed,
                                std::uint64_t stream_offset, std::optional<double> snapshot_t) {
    require(inits.cols() == target.dim(), Errc::invalid_argument, "dimension mismatch");
    const std::vector<double> ts = schedule.grid();

    std::size_t snap_index = 0;
    EnsembleResult result;
    if (snapshot_t) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double diff = std::fabs(ts[i] - *snapshot_t);
            if (diff < best) {
                best = diff;
                snap_index = i;
            }
        }
        result.snapshot_t = ts[snap_index];
        result.snapshot = RowMatrixXd(inits.rows(), target.dim());
    }
    result.terminal.resize(inits.rows(), target.dim());

    const double sigma2 = sigma * sigma;
    parallel_for(inits.rows(), [&](std::int64_t i) {
        RngStream rng = RngStream::substream(master_seed,
                                             stream_offset + static_cast<std::uint64_t>(i));
        Eigen::VectorXd x = inits.row(i).transpose();
        Eigen::VectorXd drift(x.size());
        ThermoState state{x, ts[0], sigma};
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (result.snapshot && k == snap_index) result.snapshot->row(i) = x.transpose();
            if (k + 1 == ts.size()) break;
            const double t = ts[k];
            const double dt = t - ts[k + 1];
            state.x = x;
            state.t = t;
            thermo::score_into(state, target, drift);
            x += (sigma2 * dt) * drift;
            const double amp = sigma * std::sqrt(dt);
            for (Eigen::Index c = 0; c < x.size(); ++c) x[c] += amp * rng.gaussian();
            if (!x.allFinite() || x.norm() > kDivergenceGuard)
                fail(Errc::non_finite_state,
                     "ensemble trajectory diverged at t = " + std::to_string(ts[k + 1]));
        }
        result.terminal.row(i) = x.transpose();
    });
    return result;
}

} // namespace dynamics
} // namespace difflab
