#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace difflab {

double log_sum_exp(const std::vector<double>& values);

struct MeanStderr {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t n = 0;
};
MeanStderr mean_stderr(const std::vector<double>& values);

// Ordinary least squares y = slope*x + intercept with the usual slope
// standard error and coefficient of determination.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Upper regularized incomplete gamma Q(a, x); series/continued-fraction.
double regularized_gamma_q(double a, double x);

// Pearson chi-square goodness-of-fit p-value for observed counts against
// expected counts (same total). dof = bins - 1.
double chi_square_gof_pvalue(const std::vector<double>& observed,
                             const std::vector<double>& expected);

// Anderson-Darling normality test with estimated mean/variance
// (D'Agostino-Stephens case-4 p-value approximation).
double anderson_darling_normality_pvalue(std::vector<double> samples);

// Kolmogorov-Smirnov distance between an empirical sample and a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// Integrated autocorrelation time with a Sokal self-consistent window
// (window = first W such that W >= c * tau_int, c = 5). Returns >= 1.
double integrated_autocorrelation_time(const std::vector<double>& series);

} // namespace difflab
