#include "difflab/criticality.hpp"

#include <algorithm>
#include <cmath>

#include "difflab/parallel.hpp"
#include "difflab/stats.hpp"

namespace difflab {
namespace criticality {

namespace {

constexpr double kMarginalBand = 1e-6;
constexpr double kDistinctTol = 1e-6;

double leading_eigenvalue_of(const Eigen::MatrixXd& sym) {
    if (sym.rows() == 1) return sym(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

Stability classify(double lambda) {
    if (lambda > 1.0 + kMarginalBand) return Stability::unstable;
    if (lambda < 1.0 - kMarginalBand) return Stability::stable;
    return Stability::marginal;
}

} // namespace

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "unknown";
}

FixedPoint solve_self_consistency(double t, const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& m0, const Target& target,
                                  double sigma, const SolveOptions& options) {
    require(m0.allFinite() && h.allFinite(), Errc::invalid_argument, "non-finite seed/field");
    const int d = target.dim();
    Eigen::VectorXd m = m0;
    ThermoState state{m + h, t, sigma};
    const double beta = state.beta();

    double residual = std::numeric_limits<double>::infinity();
    double best_residual = residual;
    Eigen::VectorXd f(d);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        state.x = m + h;
        thermo::posterior_mean_into(state, target, f);
        const Eigen::VectorXd g = m - f; // root of g(m) = m + grad F(m+h)
        residual = g.norm();
        best_residual = std::min(best_residual, residual);
        if (residual < options.tolerance) break;

        if (residual < options.newton_threshold) {
            // Newton with the analytic Jacobian I - beta C
            const Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(d, d)
                - beta * thermo::boltzmann_covariance(state, target);
            const Eigen::VectorXd step = jac.partialPivLu().solve(g);
            if (step.allFinite()) {
                m -= step;
                continue;
            }
        }
        m = (1.0 - options.damping) * m + options.damping * f;
    }
    if (!(residual < options.tolerance))
        fail(Errc::no_convergence,
             "self-consistency solve stalled at t = " + std::to_string(t)
                 + " (best residual " + std::to_string(best_residual) + ")");

    FixedPoint fp;
    fp.m = m;
    fp.t = t;
    fp.h = h;
    fp.residual = residual;
    state.x = m + h;
    fp.leading_eigenvalue =
        leading_eigenvalue_of(beta * thermo::boltzmann_covariance(state, target));
    fp.stability = classify(fp.leading_eigenvalue);
    return fp;
}

int BranchDiagram::count_at(double t, double tol) const {
    int n = 0;
    for (const auto& p : points)
        if (std::fabs(p.t - t) <= tol) ++n;
    return n;
}

BranchDiagram bifurcation_scan(const std::vector<double>& t_grid, const Target& target,
                               double sigma, std::vector<Eigen::VectorXd> seeds,
                               double branch_jump_tol) {
    require(!t_grid.empty(), Errc::invalid_argument, "empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        require(t_grid[i] < t_grid[i - 1], Errc::invalid_argument, "t grid must be descending");
    if (branch_jump_tol <= 0.0) branch_jump_tol = 0.05 * target.support_diameter();

    if (seeds.empty()) {
        seeds.push_back(target.mean());
        if (target.enumerable()) {
            for (const auto& atom : target.enumerate_support()) {
                seeds.push_back(atom.point);
                seeds.push_back(target.mean() + 0.1 * (atom.point - target.mean()));
                seeds.push_back(target.mean() - 0.1 * (atom.point - target.mean()));
            }
        }
    }
    require(!seeds.empty(), Errc::invalid_argument, "need at least one seed");

    const Eigen::VectorXd h = Eigen::VectorXd::Zero(target.dim());

    // solve every grid point in parallel, dedupe fixed points per point
    std::vector<std::vector<FixedPoint>> per_t(t_grid.size());
    parallel_for(static_cast<std::int64_t>(t_grid.size()), [&](std::int64_t i) {
        std::vector<FixedPoint> found;
        for (const auto& seed : seeds) {
            FixedPoint fp;
            try {
                fp = solve_self_consistency(t_grid[static_cast<std::size_t>(i)], h, seed,
                                            target, sigma);
            } catch (const Error& e) {
                if (e.code() == Errc::no_convergence) continue; // seed did not settle
                throw;
            }
            bool duplicate = false;
            for (const auto& other : found)
                if ((other.m - fp.m).norm() < kDistinctTol) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) found.push_back(std::move(fp));
        }
        per_t[static_cast<std::size_t>(i)] = std::move(found);
    });

    // serial continuation pass: greedy nearest matching to the previous grid
    // time under the jump tolerance; unmatched points open new branches
    BranchDiagram diagram;
    diagram.t_grid = t_grid;
    int next_id = 0;
    std::vector<std::pair<int, Eigen::VectorXd>> prev;
    for (std::size_t gi = 0; gi < t_grid.size(); ++gi) {
        auto& here = per_t[gi];
        std::vector<int> assigned(here.size(), -1);
        std::vector<bool> prev_used(prev.size(), false);
        for (;;) {
            double best = branch_jump_tol;
            int bi = -1, bj = -1;
            for (std::size_t i = 0; i < here.size(); ++i) {
                if (assigned[i] >= 0) continue;
                for (std::size_t j = 0; j < prev.size(); ++j) {
                    if (prev_used[j]) continue;
                    const double dist = (here[i].m - prev[j].second).norm();
                    if (dist < best) {
                        best = dist;
                        bi = static_cast<int>(i);
                        bj = static_cast<int>(j);
                    }
                }
            }
            if (bi < 0) break;
            assigned[static_cast<std::size_t>(bi)] = prev[static_cast<std::size_t>(bj)].first;
            prev_used[static_cast<std::size_t>(bj)] = true;
        }
        for (std::size_t i = 0; i < here.size(); ++i)
            if (assigned[i] < 0) assigned[i] = next_id++;

        std::vector<std::size_t> order(here.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return assigned[a] < assigned[b]; });
        std::vector<std::pair<int, Eigen::VectorXd>> cur;
        for (std::size_t i : order) {
            diagram.points.push_back({t_grid[gi], assigned[i], here[i]});
            cur.emplace_back(assigned[i], here[i].m);
        }
        prev = std::move(cur);
    }
    diagram.branch_count = next_id;
    return diagram;
}

namespace {

double trivial_branch_eigenvalue(double t, const Target& target, double sigma) {
    const Eigen::VectorXd h = Eigen::VectorXd::Zero(target.dim());
    return solve_self_consistency(t, h, target.mean(), target, sigma).leading_eigenvalue;
}

} // namespace

double critical_time(const Target& target, double sigma) {
    // for constant-norm symmetric targets the answer is lambda_max(Cov_phi) /
    // sigma^2 exactly; use it to center the bracket
    const double guess = leading_eigenvalue_of(target.covariance()) / (sigma * sigma);
    require(guess > 0.0, Errc::no_bracket, "target has zero covariance: no transition");

    double lo = std::max(2.0 * kTimeFloor, guess / 4.0);
    double hi = guess * 4.0;
    auto excess = [&](double t) { return trivial_branch_eigenvalue(t, target, sigma) - 1.0; };

    double flo = excess(lo);
    double fhi = excess(hi);
    for (int expand = 0; expand < 40 && flo * fhi > 0.0 && hi < 1e12; ++expand) {
        if (flo < 0.0) {
            lo = std::max(2.0 * kTimeFloor, lo / 4.0);
            flo = excess(lo);
        } else {
            hi *= 4.0;
            fhi = excess(hi);
        }
    }
    require(flo > 0.0 && fhi < 0.0, Errc::no_bracket,
            "no marginal-stability crossing found: no transition in range");

    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::MatrixXd self_consistent_susceptibility(double t, const Target& target, double sigma) {
    const Eigen::VectorXd h = Eigen::VectorXd::Zero(target.dim());
    const FixedPoint fp = solve_self_consistency(t, h, target.mean(), target, sigma);
    ThermoState state{fp.m, t, sigma};
    const Eigen::MatrixXd bc = state.beta() * thermo::boltzmann_covariance(state, target);
    const double lambda = leading_eigenvalue_of(bc);
    require(std::fabs(1.0 - lambda) > 1e-10, Errc::singular_resummation,
            "susceptibility resummation singular: t is at the critical point");
    const int d = target.dim();
    return (Eigen::MatrixXd::Identity(d, d) - bc).partialPivLu().solve(bc);
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return v;
}

ExponentFit make_fit(const std::string& name, const LinearFit& lf, double sign,
                     double lo, double hi) {
    ExponentFit fit;
    fit.name = name;
    fit.value = sign * lf.slope;
    fit.stderr_ = lf.slope_stderr;
    fit.window_lo = lo;
    fit.window_hi = hi;
    fit.r_squared = lf.r_squared;
    require(fit.r_squared > 0.99, Errc::fit_rejected,
            name + " fit rejected: r^2 = " + std::to_string(fit.r_squared));
    return fit;
}

} // namespace

std::array<ExponentFit, 3> fit_critical_exponents(const Target& target, double sigma) {
    constexpr int kPoints = 25;
    const double tc = critical_time(target, sigma);
    const Eigen::VectorXd h0 = Eigen::VectorXd::Zero(target.dim());

    // symmetry-breaking direction: toward the atom farthest from the mean
    Eigen::VectorXd direction;
    if (target.enumerable()) {
        double best = -1.0;
        for (const auto& atom : target.enumerate_support()) {
            const double dist = (atom.point - target.mean()).norm();
            if (dist > best) {
                best = dist;
                direction = atom.point - target.mean();
            }
        }
    } else {
        direction = Eigen::VectorXd::Unit(target.dim(), 0) * target.radius();
    }
    const Eigen::VectorXd e_hat = direction.normalized();

    // order parameter: log ||m|| vs log(-tau) on a stable branch, continued
    // from deep in the broken phase toward t_c
    const auto taus = log_spaced(0.001 * tc, 0.1 * tc, kPoints);
    std::vector<double> log_tau(taus.size()), log_m(taus.size());
    Eigen::VectorXd seed = target.mean() + direction;
    for (std::size_t i = taus.size(); i-- > 0;) {
        const FixedPoint fp = solve_self_consistency(tc - taus[i], h0, seed, target, sigma);
        seed = fp.m;
        log_tau[i] = std::log(taus[i]);
        log_m[i] = std::log((fp.m - target.mean()).norm());
    }
    const ExponentFit beta_order =
        make_fit("beta_order", fit_line(log_tau, log_m), 1.0, -0.1 * tc, -0.001 * tc);

    // delta: log h vs log ||m|| at exactly t_c, field swept along e_hat
    const auto hs = log_spaced(1e-6, 1e-2, kPoints);
    std::vector<double> log_h(hs.size()), log_mh(hs.size());
    seed = target.mean() + 0.3 * direction;
    for (std::size_t i = hs.size(); i-- > 0;) {
        const FixedPoint fp = solve_self_consistency(tc, hs[i] * e_hat, seed, target, sigma);
        seed = fp.m;
        log_h[i] = std::log(hs[i]);
        log_mh[i] = std::log((fp.m - target.mean()).norm());
    }
    const ExponentFit delta = make_fit("delta", fit_line(log_mh, log_h), 1.0, 1e-6, 1e-2);

    // gamma: chi_sc diverges approaching t_c from above; its leading
    // eigenvalue is lambda/(1-lambda) with lambda the eigenvalue of beta C
    std::vector<double> log_tau_hi(taus.size()), log_chi(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const FixedPoint fp =
            solve_self_consistency(tc + taus[i], h0, target.mean(), target, sigma);
        log_tau_hi[i] = std::log(taus[i]);
        log_chi[i] = std::log(fp.leading_eigenvalue / (1.0 - fp.leading_eigenvalue));
    }
    const ExponentFit gamma =
        make_fit("gamma", fit_line(log_tau_hi, log_chi), -1.0, 0.001 * tc, 0.1 * tc);

    return {beta_order, delta, gamma};
}

} // namespace criticality
} // namespace difflab
