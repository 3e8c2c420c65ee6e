#include "difflab/quadrature.hpp"

#include <cmath>
#include <map>

#include "difflab/errors.hpp"

namespace difflab {

namespace {

// Newton iteration on P_n with the Tricomi initial guess; nodes computed in
// symmetric pairs. Standard gauleg construction.
GaussLegendreRule build_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

} // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    require(order >= 2, Errc::invalid_argument, "gauss_legendre: order >= 2");
    static const std::map<int, GaussLegendreRule> ladder = [] {
        std::map<int, GaussLegendreRule> m;
        for (int n = 64; n <= 16384; n *= 2) m.emplace(n, build_rule(n));
        return m;
    }();
    const auto it = ladder.find(order);
    require(it != ladder.end(), Errc::invalid_argument,
            "gauss_legendre: order must be a power of two in [64, 16384]");
    return it->second;
}

double log_sphere_angular_norm(int dim) {
    // integral_0^pi sin^{d-2} = sqrt(pi) Gamma((d-1)/2) / Gamma(d/2)
    return 0.5 * std::log(M_PI) + std::lgamma(0.5 * (dim - 1)) - std::lgamma(0.5 * dim);
}

SphereMoments sphere_angular_moments(double a, int dim) {
    require(dim >= 2, Errc::invalid_argument, "sphere_angular_moments: dim >= 2");
    require(std::isfinite(a), Errc::invalid_argument, "sphere_angular_moments: non-finite tilt");

    SphereMoments prev{};
    bool have_prev = false;
    for (int n = 64; n <= 16384; n *= 2) {
        const auto& rule = gauss_legendre(n);

        // g(theta) = a cos(theta) + (d-2) log sin(theta), peak-shifted sums
        double gmax = -std::numeric_limits<double>::infinity();
        std::vector<double> g(rule.nodes.size()), c(rule.nodes.size());
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double theta = 0.5 * M_PI * (rule.nodes[i] + 1.0);
            const double ct = std::cos(theta);
            const double st = std::sin(theta);
            c[i] = ct;
            g[i] = a * ct + (dim > 2 ? (dim - 2) * std::log(st) : 0.0);
            gmax = std::max(gmax, g[i]);
        }
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double e = rule.weights[i] * std::exp(g[i] - gmax);
            s0 += e;
            s1 += c[i] * e;
            s2 += c[i] * c[i] * e;
        }
        SphereMoments cur;
        cur.log_s0 = gmax + std::log(0.5 * M_PI * s0); // jacobian of theta(u)
        cur.cos_mean = s1 / s0;
        cur.cos2_mean = s2 / s0;

        if (have_prev) {
            const double d0 = std::fabs(cur.log_s0 - prev.log_s0) / (1.0 + std::fabs(cur.log_s0));
            const double d1 = std::fabs(cur.cos_mean - prev.cos_mean);
            const double d2 = std::fabs(cur.cos2_mean - prev.cos2_mean);
            if (d0 < 1e-10 && d1 < 1e-10 && d2 < 1e-10) return cur;
        }
        prev = cur;
        have_prev = true;
    }
    fail(Errc::quadrature_not_converged,
         "sphere quadrature did not converge at 2^14 nodes (tilt a = " + std::to_string(a) + ")");
}

} // namespace difflab
