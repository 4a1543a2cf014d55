#pragma once

#include <Eigen/Dense>
#include <utility>

#include "subriem/curvature.hpp"
#include "subriem/geometry.hpp"
#include "subriem/rng.hpp"

namespace subriem::sde {

struct SdeConfig {
    Curvature k = Curvature::Spherical;
    double dt = 1e-3;
    double phi_floor = 1e-4;
    // ceiling applies only on the sphere: pi - phi_ceiling_margin
    double phi_ceiling_margin = 1e-4;

    double phi_ceiling() const;
    void validate(double phi0) const;
};

struct IntegratorDiagnostics {
    long clamp_events = 0;
    long steps = 0;
    // more than 1% clamped steps signals dt too coarse or phi0 too close to a pole
    bool clamp_saturated() const { return steps > 0 && clamp_events * 100 > steps; }
};

// Shared radial part: phi path, its driving increments and the sigma clock.
struct RadialPath {
    Curvature k = Curvature::Spherical;
    double dt = 0.0;
    Eigen::ArrayXd times;          // n+1 grid points, 0 = t_0 < ... < t_n = T
    Eigen::ArrayXd phi;            // n+1
    Eigen::ArrayXd sigma;          // n+1, sigma[0] = 0, strictly increasing
    Eigen::ArrayXd b1_increments;  // n
    IntegratorDiagnostics diag;

    Eigen::Index steps() const { return b1_increments.size(); }
    double horizon() const { return times[times.size() - 1]; }
    double sigma_T() const { return sigma[sigma.size() - 1]; }
};

struct FullPath {
    RadialPath radial;
    Eigen::ArrayXd theta;          // n+1, unwrapped
    Eigen::ArrayXd z;              // n+1, unwrapped
    Eigen::ArrayXd b2_increments;  // n
};

// Drift of the radial coordinate: (1/2) sqrt(k) cot(sqrt(k) phi).
double drift_phi(Curvature k, double phi);

// (theta coefficient, z coefficient) of the driving noise B^2.
std::pair<double, double> diffusion_coeffs(Curvature k, double phi);

// Trapezoidal cumulative integral of k/sin^2(sqrt(k) phi) along the path.
Eigen::ArrayXd sigma_clock(Curvature k, double dt, const Eigen::ArrayXd& phi);

// Euler-Maruyama with the supplied driving increments (used by deterministic
// tests and by the coupling layer, which shares one radial path).
RadialPath simulate_radial_driven(const SdeConfig& cfg, double phi0,
                                  const Eigen::ArrayXd& db1);
RadialPath simulate_radial(const SdeConfig& cfg, double phi0, double T, Rng& rng);

FullPath simulate_full_driven(const SdeConfig& cfg, const geo::CylPoint& start,
                              const Eigen::ArrayXd& db1, const Eigen::ArrayXd& db2);
FullPath simulate_full(const SdeConfig& cfg, const geo::CylPoint& start, double T, Rng& rng);

}  // namespace subriem::sde
