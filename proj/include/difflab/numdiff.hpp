#pragma once

#include <Eigen/Dense>
#include <functional>

namespace difflab {

// Central-difference oracles used to check analytic gradients throughout the
// test suites (and by pure_state_variance). Deliberately independent of any
// analytic derivative path.

inline Eigen::VectorXd gradient_central(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        xp[i] = xi + step;
        const double fp = f(xp);
        xp[i] = xi - step;
        const double fm = f(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

inline Eigen::MatrixXd jacobian_central(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double step) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd jac(f0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double xj = x[j];
        xp[j] = xj + step;
        const Eigen::VectorXd fp = f(xp);
        xp[j] = xj - step;
        const Eigen::VectorXd fm = f(xp);
        xp[j] = xj;
        jac.col(j) = (fp - fm) / (2.0 * step);
    }
    return jac;
}

} // namespace difflab
