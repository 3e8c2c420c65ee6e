#include "difflab/thermo.hpp"

#include <cmath>
#include <limits>

#include "difflab/quadrature.hpp"

namespace difflab {

void validate(const ThermoState& state, const Target& target) {
    require(state.t > kTimeFloor, Errc::invalid_argument,
            "thermo state requires t > 1e-9 (beta diverges)");
    require(state.sigma > 0.0, Errc::invalid_argument, "sigma must be > 0");
    require(state.x.size() == target.dim(), Errc::invalid_argument,
            "state dimension does not match target");
    require(state.x.allFinite(), Errc::invalid_argument, "non-finite state");
}

namespace thermo {
namespace {

// One-pass Boltzmann sums over the support in the shifted log domain.
// order 0: log Z only; 1: + first moment; 2: + second moment.
struct BoltzmannSums {
    double log_z = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

BoltzmannSums enumerable_sums(const ThermoState& state, const Target& target, int order) {
    const double beta = state.beta();
    const int d = target.dim();
    double amax = -std::numeric_limits<double>::infinity();
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(order >= 1 ? d : 0);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(order >= 2 ? d : 0, order >= 2 ? d : 0);
    const double* xp = state.x.data();

    target.for_each_atom([&](const double* y, double logw) {
        double dot = 0.0, sq = 0.0;
        for (int k = 0; k < d; ++k) {
            dot += xp[k] * y[k];
            sq += y[k] * y[k];
        }
        const double a = logw + beta * (dot - 0.5 * sq);
        if (a > amax) {
            const double scale = std::exp(amax - a); // 0 on the first atom
            s0 *= scale;
            if (order >= 1) s1 *= scale;
            if (order >= 2) s2 *= scale;
            amax = a;
        }
        const double e = std::exp(a - amax);
        s0 += e;
        Eigen::Map<const Eigen::VectorXd> v(y, d);
        if (order >= 1) s1.noalias() += e * v;
        if (order >= 2) s2.noalias() += e * v * v.transpose();
    });

    BoltzmannSums out;
    out.log_z = amax + std::log(s0);
    if (order >= 1) out.mean = s1 / s0;
    if (order >= 2) {
        out.covariance = s2 / s0 - out.mean * out.mean.transpose();
        out.covariance = 0.5 * (out.covariance + out.covariance.transpose().eval());
    }
    return out;
}

// Hypersphere: by symmetry the ensemble only depends on a = beta r ||x||,
// with the posterior mean along x and an axial/transverse covariance split.
BoltzmannSums sphere_sums(const ThermoState& state, const Target& target, int order) {
    const double beta = state.beta();
    const double r = target.radius();
    const int d = target.dim();
    const double xnorm = state.x.norm();
    const double a = beta * r * xnorm;

    double log_s0_normalized, cos_mean, cos2_mean;
    if (d == 1) {
        // S^0 = {-r, +r}: the angular average is exact
        log_s0_normalized = std::log(std::cosh(a));
        if (!std::isfinite(log_s0_normalized)) log_s0_normalized = std::fabs(a) - std::log(2.0);
        cos_mean = std::tanh(a);
        cos2_mean = 1.0;
    } else {
        const SphereMoments m = sphere_angular_moments(a, d);
        log_s0_normalized = m.log_s0 - log_sphere_angular_norm(d);
        cos_mean = m.cos_mean;
        cos2_mean = m.cos2_mean;
    }

    BoltzmannSums out;
    out.log_z = -0.5 * beta * r * r + log_s0_normalized;
    if (order >= 1) {
        Eigen::VectorXd xhat = xnorm > 0.0 ? (state.x / xnorm).eval()
                                           : Eigen::VectorXd::Unit(d, 0).eval();
        out.mean = (r * cos_mean) * xhat;
        if (order >= 2) {
            const double axial = r * r * (cos2_mean - cos_mean * cos_mean);
            if (d == 1) {
                out.covariance = Eigen::MatrixXd::Constant(1, 1, axial);
            } else {
                const double transverse = r * r * (1.0 - cos2_mean) / (d - 1);
                out.covariance = transverse * Eigen::MatrixXd::Identity(d, d)
                               + (axial - transverse) * (xhat * xhat.transpose());
            }
        }
    }
    return out;
}

BoltzmannSums sums(const ThermoState& state, const Target& target, int order) {
    validate(state, target);
    return target.enumerable() ? enumerable_sums(state, target, order)
                               : sphere_sums(state, target, order);
}

} // namespace

double hamiltonian(const Eigen::VectorXd& y, const ThermoState& state, const Target& target) {
    validate(state, target);
    require(y.size() == target.dim(), Errc::invalid_argument, "dimension mismatch");
    const double beta = state.beta();
    const double quad = beta * (0.5 * y.squaredNorm() - state.x.dot(y));
    if (!target.enumerable()) {
        const double r = target.radius();
        require(std::fabs(y.norm() - r) <= 1e-9 * std::max(1.0, r), Errc::off_support,
                "point is not on the sphere");
        return quad; // uniform -log phi constant dropped
    }
    return quad - target.atom_log_weight(y);
}

double log_partition(const ThermoState& state, const Target& target) {
    return sums(state, target, 0).log_z;
}

double free_energy(const ThermoState& state, const Target& target, bool regularized) {
    const double f = -log_partition(state, target) / state.beta();
    return regularized ? f + 0.5 * state.x.squaredNorm() : f;
}

Eigen::VectorXd posterior_mean(const ThermoState& state, const Target& target) {
    return sums(state, target, 1).mean;
}

void posterior_mean_into(const ThermoState& state, const Target& target,
                         Eigen::Ref<Eigen::VectorXd> out) {
    out = sums(state, target, 1).mean;
}

Eigen::VectorXd score(const ThermoState& state, const Target& target) {
    return state.beta() * (posterior_mean(state, target) - state.x);
}

void score_into(const ThermoState& state, const Target& target, Eigen::Ref<Eigen::VectorXd> out) {
    out = sums(state, target, 1).mean;
    out -= state.x;
    out *= state.beta();
}

double log_marginal(const ThermoState& state, const Target& target) {
    // p_t(x) = (2 pi t s^2)^{-d/2} E_y[exp(-||x-y||^2 / (2 t s^2))]; completing
    // the square relates the expectation to Z at the same (x, t).
    const double beta = state.beta();
    const double d = target.dim();
    return -0.5 * d * std::log(2.0 * M_PI * state.t * state.sigma * state.sigma)
           - 0.5 * beta * state.x.squaredNorm() + log_partition(state, target);
}

Eigen::MatrixXd boltzmann_covariance(const ThermoState& state, const Target& target) {
    return sums(state, target, 2).covariance;
}

Eigen::MatrixXd susceptibility(const ThermoState& state, const Target& target) {
    return state.beta() * boltzmann_covariance(state, target);
}

Eigen::MatrixXd score_jacobian(const ThermoState& state, const Target& target) {
    const double beta = state.beta();
    const int d = target.dim();
    return beta * beta * boltzmann_covariance(state, target)
           - beta * Eigen::MatrixXd::Identity(d, d);
}

Eigen::VectorXd regularized_free_energy_gradient(const ThermoState& state, const Target& target) {
    // grad F = -<y>, so grad F_reg = x - <y>
    return state.x - posterior_mean(state, target);
}

ThermoReport report(const ThermoState& state, const Target& target) {
    const BoltzmannSums s = sums(state, target, 2);
    const double beta = state.beta();
    const int d = target.dim();
    ThermoReport rep;
    rep.log_Z = s.log_z;
    rep.free_energy = -s.log_z / beta;
    rep.regularized_free_energy = rep.free_energy + 0.5 * state.x.squaredNorm();
    rep.posterior_mean = s.mean;
    rep.score = beta * (s.mean - state.x);
    rep.covariance = s.covariance;
    rep.susceptibility = beta * s.covariance;
    rep.score_jacobian = beta * beta * s.covariance - beta * Eigen::MatrixXd::Identity(d, d);
    return rep;
}

} // namespace thermo
} // namespace difflab
