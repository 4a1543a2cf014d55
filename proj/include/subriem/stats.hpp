#pragma once

#include <Eigen/Dense>

namespace subriem::stats {

double normal_cdf(double x);
// Inverse standard normal CDF (Acklam's rational approximation plus one
// Halley refinement; good to machine precision away from the tails).
double normal_quantile(double p);

struct WilsonInterval {
    double lower = 0.0;
    double upper = 1.0;
};

// 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(long k, long n, double z = 1.959963984540054);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

LinearFit least_squares(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    long n = 0;
};

// One-sample Kolmogorov-Smirnov test against the standard normal CDF, with the
// asymptotic p-value. Requires n >= 500 (smaller samples would make the
// asymptotic p-value misleading); set enforce_min_n = false in tests that
// exercise the statistic itself.
KsResult ks_test_standard_normal(const Eigen::ArrayXd& samples, bool enforce_min_n = true);

// Sample mean / unbiased variance helpers.
double mean(const Eigen::ArrayXd& x);
double variance(const Eigen::ArrayXd& x);
double correlation(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y);

}  // namespace subriem::stats
