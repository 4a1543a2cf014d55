#include "subriem/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace subriem::sde {

namespace {
constexpr double kPi = 3.14159265358979323846;

long round_steps(double T, double dt) {
    const double n = T / dt;
    const long rounded = static_cast<long>(std::llround(n));
    if (rounded < 1 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
        throw std::invalid_argument("horizon must be an integer multiple of dt");
    }
    return rounded;
}
}  // namespace

double SdeConfig::phi_ceiling() const {
    return k == Curvature::Spherical ? kPi - phi_ceiling_margin
                                     : std::numeric_limits<double>::infinity();
}

void SdeConfig::validate(double phi0) const {
    if (dt <= 0.0) throw std::invalid_argument("SdeConfig: dt > 0 required");
    if (!(phi_floor > 0.0 && phi_floor < phi0)) {
        throw std::invalid_argument("SdeConfig: 0 < phi_floor < phi0 required");
    }
    if (phi0 >= phi_ceiling()) {
        throw std::invalid_argument("SdeConfig: phi0 below the ceiling required");
    }
}

double drift_phi(Curvature k, double phi) { return 0.5 * cot_k(k, phi); }

std::pair<double, double> diffusion_coeffs(Curvature k, double phi) {
    return {theta_coeff_k(k, phi), z_coeff_k(k, phi)};
}

Eigen::ArrayXd sigma_clock(Curvature k, double dt, const Eigen::ArrayXd& phi) {
    const Eigen::Index n = phi.size();
    if (n < 2) throw std::invalid_argument("sigma_clock: need at least two grid points");
    Eigen::ArrayXd sigma(n);
    sigma[0] = 0.0;
    double prev = sigma_density_k(k, phi[0]);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double cur = sigma_density_k(k, phi[i]);
        sigma[i] = sigma[i - 1] + 0.5 * dt * (prev + cur);
        prev = cur;
    }
    return sigma;
}

RadialPath simulate_radial_driven(const SdeConfig& cfg, double phi0, const Eigen::ArrayXd& db1) {
    cfg.validate(phi0);
    const Eigen::Index n = db1.size();
    RadialPath path;
    path.k = cfg.k;
    path.dt = cfg.dt;
    path.times = Eigen::ArrayXd::LinSpaced(n + 1, 0.0, cfg.dt * n);
    path.phi.resize(n + 1);
    path.b1_increments = db1;
    path.diag.steps = n;

    const double lo = cfg.phi_floor;
    const double hi = cfg.phi_ceiling();
    double phi = phi0;
    path.phi[0] = phi;
    for (Eigen::Index i = 0; i < n; ++i) {
        phi += db1[i] + drift_phi(cfg.k, phi) * cfg.dt;
        if (phi <= lo) {
            phi = lo;
            ++path.diag.clamp_events;
        } else if (phi >= hi) {
            phi = hi;
            ++path.diag.clamp_events;
        }
        path.phi[i + 1] = phi;
    }
    path.sigma = sigma_clock(cfg.k, cfg.dt, path.phi);
    return path;
}

RadialPath simulate_radial(const SdeConfig& cfg, double phi0, double T, Rng& rng) {
    const long n = round_steps(T, cfg.dt);
    const double sq = std::sqrt(cfg.dt);
    Eigen::ArrayXd db1(n);
    for (long i = 0; i < n; ++i) db1[i] = sq * rng.gaussian();
    return simulate_radial_driven(cfg, phi0, db1);
}

FullPath simulate_full_driven(const SdeConfig& cfg, const geo::CylPoint& start,
                              const Eigen::ArrayXd& db1, const Eigen::ArrayXd& db2) {
    if (db1.size() != db2.size()) {
        throw std::invalid_argument("simulate_full_driven: increment streams must match");
    }
    FullPath full;
    full.radial = simulate_radial_driven(cfg, start.surface.phi, db1);
    const Eigen::Index n = db1.size();
    full.theta.resize(n + 1);
    full.z.resize(n + 1);
    full.b2_increments = db2;
    full.theta[0] = start.surface.theta;
    full.z[0] = start.z;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto [tc, zc] = diffusion_coeffs(cfg.k, full.radial.phi[i]);
        full.theta[i + 1] = full.theta[i] + tc * db2[i];
        full.z[i + 1] = full.z[i] + zc * db2[i];
    }
    return full;
}

FullPath simulate_full(const SdeConfig& cfg, const geo::CylPoint& start, double T, Rng& rng) {
    const long n = round_steps(T, cfg.dt);
    const double sq = std::sqrt(cfg.dt);
    Eigen::ArrayXd db1(n), db2(n);
    for (long i = 0; i < n; ++i) db1[i] = sq * rng.gaussian();
    for (long i = 0; i < n; ++i) db2[i] = sq * rng.gaussian();
    return simulate_full_driven(cfg, start, db1, db2);
}

}  // namespace subriem::sde
