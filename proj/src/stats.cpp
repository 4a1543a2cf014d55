#include "subriem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace subriem::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p in (0,1) required");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley step on normal_cdf(x) - p
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

WilsonInterval wilson_interval(long k, long n, double z) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n >= 1 required");
    const double p = static_cast<double>(k) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LinearFit least_squares(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares: need >= 2 matched points");
    }
    const double mx = x.mean(), my = y.mean();
    const double sxx = ((x - mx) * (x - mx)).sum();
    const double sxy = ((x - mx) * (y - my)).sum();
    LinearFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    const double ss_tot = ((y - my) * (y - my)).sum();
    const double ss_res = (y - (fit.intercept + fit.slope * x)).square().sum();
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-24 ? 1.0 : 0.0);
    return fit;
}

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

KsResult ks_test_standard_normal(const Eigen::ArrayXd& samples, bool enforce_min_n) {
    const long n = samples.size();
    if (enforce_min_n && n < 500) {
        throw std::invalid_argument("ks_test_standard_normal: n >= 500 required");
    }
    if (n < 1) throw std::invalid_argument("ks_test_standard_normal: empty sample");
    std::vector<double> v(samples.data(), samples.data() + n);
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (long i = 0; i < n; ++i) {
        const double f = normal_cdf(v[i]);
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
    }
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    return {d, kolmogorov_sf(lambda), n};
}

double mean(const Eigen::ArrayXd& x) { return x.mean(); }

double variance(const Eigen::ArrayXd& x) {
    if (x.size() < 2) return 0.0;
    const double m = x.mean();
    return (x - m).square().sum() / (x.size() - 1);
}

double correlation(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("correlation: need >= 2 matched points");
    }
    const double mx = x.mean(), my = y.mean();
    const double sxy = ((x - mx) * (y - my)).sum();
    const double sxx = ((x - mx) * (x - mx)).sum();
    const double syy = ((y - my) * (y - my)).sum();
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace subriem::stats
