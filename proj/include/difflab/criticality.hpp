#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "difflab/target.hpp"
#include "difflab/thermo.hpp"

namespace difflab {
namespace criticality {

enum class Stability { stable, unstable, marginal };

std::string to_string(Stability s);

// Solution of m = -grad F(m + h, t). leading_eigenvalue is the largest
// eigenvalue of beta C at the fixed point; the branch is stable when it is
// below 1 (band +-1e-6 labels marginal).
struct FixedPoint {
    Eigen::VectorXd m;
    double t = 0.0;
    Eigen::VectorXd h;
    Stability stability = Stability::stable;
    double leading_eigenvalue = 0.0;
    double residual = 0.0;
};

struct SolveOptions {
    double damping = 0.5;           // m <- (1-a) m + a (-grad F)
    double newton_threshold = 1e-3; // switch to Newton below this residual
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

FixedPoint solve_self_consistency(double t, const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& m0, const Target& target,
                                  double sigma, const SolveOptions& options = {});

// Fixed points per grid time, grouped into continuity-tracked branches.
struct BranchDiagram {
    struct Point {
        double t;
        int branch_id;
        FixedPoint fp;
    };
    std::vector<double> t_grid;   // descending
    std::vector<Point> points;    // ordered by grid position, then branch id
    int branch_count = 0;

    int count_at(double t, double tol = 1e-12) const;
};

// Seeds default to: target mean, every support atom, and mean +- 0.1 (atom -
// mean) — enough to capture each symmetry-breaking direction of the toy
// geometries. branch_jump_tol <= 0 means 0.05 * support diameter.
BranchDiagram bifurcation_scan(const std::vector<double>& t_grid, const Target& target,
                               double sigma, std::vector<Eigen::VectorXd> seeds = {},
                               double branch_jump_tol = -1.0);

// Time where the trivial branch turns marginal: leading eigenvalue of
// beta(t) C equals 1. Bisection to |dt| < 1e-8; NoBracket if the eigenvalue
// never crosses 1 in the searched range.
double critical_time(const Target& target, double sigma);

struct ExponentFit {
    std::string name; // beta_order | delta | gamma
    double value = 0.0;
    double stderr_ = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double r_squared = 0.0;
};

// order parameter exponent from m(t) on the stable branch, delta from the
// field sweep at t_c, gamma from the diverging self-consistent
// susceptibility above t_c. FitRejected if any r^2 <= 0.99.
std::array<ExponentFit, 3> fit_critical_exponents(const Target& target, double sigma);

// (I - beta C)^{-1} beta C at the trivial branch; SingularResummation at t_c.
Eigen::MatrixXd self_consistent_susceptibility(double t, const Target& target, double sigma);

} // namespace criticality
} // namespace difflab
