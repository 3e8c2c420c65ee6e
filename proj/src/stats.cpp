#include "difflab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "difflab/errors.hpp"

namespace difflab {

double log_sum_exp(const std::vector<double>& values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - m);
    return m + std::log(sum);
}

MeanStderr mean_stderr(const std::vector<double>& values) {
    MeanStderr out;
    out.n = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    out.stderr_of_mean = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 3, Errc::invalid_argument,
            "fit_line needs >= 3 paired points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, Errc::invalid_argument, "fit_line: degenerate abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return fit;
}

// Lower regularized gamma P(a,x) by series, upper Q(a,x) by Lentz continued
// fraction; the split at x = a+1 keeps both rapidly convergent.
static double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

static double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double regularized_gamma_q(double a, double x) {
    require(a > 0.0 && x >= 0.0, Errc::invalid_argument, "regularized_gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_gof_pvalue(const std::vector<double>& observed,
                             const std::vector<double>& expected) {
    require(observed.size() == expected.size() && observed.size() >= 2,
            Errc::invalid_argument, "chi_square_gof_pvalue: bad bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        require(expected[i] > 0.0, Errc::invalid_argument, "expected count must be positive");
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    const double dof = static_cast<double>(observed.size() - 1);
    return regularized_gamma_q(dof / 2.0, stat / 2.0);
}

double anderson_darling_normality_pvalue(std::vector<double> samples) {
    const std::size_t n = samples.size();
    require(n >= 8, Errc::invalid_argument, "anderson_darling: need >= 8 samples");
    std::sort(samples.begin(), samples.end());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    require(sd > 0.0, Errc::invalid_argument, "anderson_darling: zero variance");

    auto std_normal_cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };

    double a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = (samples[i] - mean) / sd;
        const double zr = (samples[n - 1 - i] - mean) / sd;
        double fi = std_normal_cdf(zi);
        double fr = std_normal_cdf(zr);
        fi = std::clamp(fi, 1e-300, 1.0 - 1e-16);
        fr = std::clamp(fr, 1e-300, 1.0 - 1e-16);
        a2 += (2.0 * static_cast<double>(i) + 1.0) * (std::log(fi) + std::log1p(-fr));
    }
    a2 = -static_cast<double>(n) - a2 / static_cast<double>(n);
    // small-sample adjustment and p-value (D'Agostino & Stephens, table 4.9)
    const double a2s = a2 * (1.0 + 0.75 / static_cast<double>(n)
                             + 2.25 / (static_cast<double>(n) * static_cast<double>(n)));
    if (a2s >= 0.6) return std::exp(1.2937 - 5.709 * a2s + 0.0186 * a2s * a2s);
    if (a2s >= 0.34) return std::exp(0.9177 - 4.279 * a2s - 1.38 * a2s * a2s);
    if (a2s >= 0.2) return 1.0 - std::exp(-8.318 + 42.796 * a2s - 59.938 * a2s * a2s);
    return 1.0 - std::exp(-13.436 + 101.14 * a2s - 223.73 * a2s * a2s);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    require(!samples.empty(), Errc::invalid_argument, "ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        dmax = std::max(dmax, std::max(std::fabs(f - lo), std::fabs(f - hi)));
    }
    return dmax;
}

double integrated_autocorrelation_time(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 16) return 1.0;
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double c0 = 0.0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return 1.0;

    double tau = 1.0;
    const double c = 5.0;
    const std::size_t max_lag = n / 4;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double ck = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            ck += (series[i] - mean) * (series[i + lag] - mean);
        ck /= static_cast<double>(n - lag);
        tau += 2.0 * ck / c0;
        if (static_cast<double>(lag) >= c * tau) break;
    }
    return std::max(tau, 1.0);
}

} // namespace difflab
