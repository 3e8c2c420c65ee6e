#pragma once

#include <vector>

namespace difflab {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Rule of the given order; orders are restricted to the adaptive ladder
// 64, 128, ..., 16384. Tables are built once and cached immutably.
const GaussLegendreRule& gauss_legendre(int order);

// Angular moments of the tilted uniform measure on S^{d-1}:
//   s_k(a) = integral_0^pi cos^k(theta) e^{a cos(theta)} sin^{d-2}(theta) dtheta
// evaluated in the log domain. Node count doubles until the relative change
// of every requested moment is < 1e-10 (cap 2^14), else QuadratureNotConverged.
struct SphereMoments {
    double log_s0;     // log s_0(a)
    double cos_mean;   // s_1 / s_0
    double cos2_mean;  // s_2 / s_0
};
SphereMoments sphere_angular_moments(double a, int dim);

// log of integral_0^pi sin^{d-2}(theta) dtheta, in closed form
double log_sphere_angular_norm(int dim);

} // namespace difflab
