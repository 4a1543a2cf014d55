#include <doctest.h>

#include <cmath>

#include "subriem/montecarlo.hpp"
#include "subriem/sde.hpp"
#include "subriem/stats.hpp"

using namespace subriem;
using namespace subriem::sde;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("drift and diffusion coefficients") {
    CHECK(drift_phi(Curvature::Flat, 2.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(drift_phi(Curvature::Spherical, kPi / 2) == doctest::Approx(0.0));
    CHECK(drift_phi(Curvature::Hyperbolic, 1.0) ==
          doctest::Approx(0.5 / std::tanh(1.0)).epsilon(1e-14));

    auto [t0, z0] = diffusion_coeffs(Curvature::Flat, 2.0);
    CHECK(t0 == doctest::Approx(0.5));
    CHECK(z0 == doctest::Approx(1.0));
    auto [t1, z1] = diffusion_coeffs(Curvature::Spherical, kPi / 2);
    CHECK(t1 == doctest::Approx(1.0));
    CHECK(z1 == doctest::Approx(1.0));
    auto [t2, z2] = diffusion_coeffs(Curvature::Hyperbolic, 1.0);
    CHECK(t2 == doctest::Approx(1.0 / std::sinh(1.0)).epsilon(1e-14));
    CHECK(z2 == doctest::Approx(std::tanh(0.5)).epsilon(1e-14));
}

TEST_CASE("coefficient identity z_coeff / theta_coeff = sector density") {
    Rng rng(2);
    for (Curvature k : {Curvature::Spherical, Curvature::Hyperbolic, Curvature::Flat}) {
        for (int i = 0; i < 200; ++i) {
            const double phi = rng.uniform(0.05, k == Curvature::Spherical ? 3.0 : 4.0);
            auto [tc, zc] = diffusion_coeffs(k, phi);
            CHECK(zc / tc == doctest::Approx(sector_density_k(k, phi)).epsilon(1e-12));
        }
    }
}

TEST_CASE("k -> 0 continuity of the coefficients") {
    const double eps = 1e-4;
    for (double u : {0.5, 1.0, 2.0}) {
        const double phi = eps * u;
        for (Curvature k : {Curvature::Spherical, Curvature::Hyperbolic}) {
            CHECK(drift_phi(k, phi) ==
                  doctest::Approx(drift_phi(Curvature::Flat, phi)).epsilon(1e-6));
            auto [tc, zc] = diffusion_coeffs(k, phi);
            auto [tf, zf] = diffusion_coeffs(Curvature::Flat, phi);
            CHECK(tc == doctest::Approx(tf).epsilon(1e-6));
            CHECK(zc == doctest::Approx(zf).epsilon(1e-6));
        }
    }
}

TEST_CASE("deterministic radial paths") {
    SdeConfig cfg;
    cfg.k = Curvature::Spherical;
    cfg.dt = 1e-3;
    const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(1000);
    const auto path = simulate_radial_driven(cfg, kPi / 2, zero);
    for (Eigen::Index i = 0; i < path.phi.size(); ++i) {
        CHECK(path.phi[i] == doctest::Approx(kPi / 2).epsilon(1e-12));
    }
    CHECK(path.sigma_T() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(path.diag.clamp_events == 0);

    SdeConfig flat;
    flat.k = Curvature::Flat;
    flat.dt = 0.01;
    const Eigen::ArrayXd one_step = Eigen::ArrayXd::Zero(1);
    const auto euler = simulate_radial_driven(flat, 1.0, one_step);
    CHECK(euler.phi[1] == doctest::Approx(1.005).epsilon(1e-15));
}

TEST_CASE("sigma clock closed forms") {
    SdeConfig cfg;
    cfg.k = Curvature::Flat;
    cfg.dt = 1e-2;
    Eigen::ArrayXd phi = Eigen::ArrayXd::Constant(101, 2.0);
    const auto sigma = sigma_clock(Curvature::Flat, cfg.dt, phi);
    CHECK(sigma[100] == doctest::Approx(1.0 / 4.0).epsilon(1e-12));

    Eigen::ArrayXd phi_h = Eigen::ArrayXd::Constant(101, 1.0);
    const auto sigma_h = sigma_clock(Curvature::Hyperbolic, cfg.dt, phi_h);
    const double s1 = std::sinh(1.0);
    CHECK(sigma_h[100] == doctest::Approx(1.0 / (s1 * s1)).epsilon(1e-12));
    for (Eigen::Index i = 1; i < sigma_h.size(); ++i) CHECK(sigma_h[i] > sigma_h[i - 1]);
}

TEST_CASE("radial variance at small T") {
    // with phi0 = pi/2 (k = 1) the drift vanishes and Var(phi_T - phi0) = T
    SdeConfig cfg;
    cfg.k = Curvature::Spherical;
    cfg.dt = 1e-4;
    const double T = 0.01;
    const long trials = 10000;
    auto vals = mc::parallel_map<double>(trials, 2, [&](long trial) {
        Rng rng = Rng::for_trial(902, "radial_var", static_cast<uint64_t>(trial));
        const auto p = simulate_radial(cfg, kPi / 2, T, rng);
        return p.phi[p.phi.size() - 1] - kPi / 2;
    });
    Eigen::Map<Eigen::ArrayXd> x(vals.data(), vals.size());
    CHECK(stats::variance(x) == doctest::Approx(T).epsilon(0.05));
}

TEST_CASE("full paths") {
    SdeConfig cfg;
    cfg.k = Curvature::Spherical;
    cfg.dt = 1e-3;
    const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(1000);
    const auto frozen = simulate_full_driven(cfg, {{kPi / 2, 0.0}, 0.0}, zero, zero);
    CHECK(frozen.theta[1000] == 0.0);
    CHECK(frozen.z[1000] == 0.0);
    CHECK(frozen.radial.phi[1000] == doctest::Approx(kPi / 2));

    // freeze phi at 1 by cancelling the drift with the driving increments,
    // then a constant dB^2 = c accumulates z at rate z_coeff(1) = 1/2
    SdeConfig flat;
    flat.k = Curvature::Flat;
    flat.dt = 0.01;
    const int n = 500;
    Eigen::ArrayXd db1(n), db2(n);
    const double c = 0.02;
    db1.setConstant(-drift_phi(Curvature::Flat, 1.0) * flat.dt);
    db2.setConstant(c);
    const auto pinned = simulate_full_driven(flat, {{1.0, 0.0}, 0.0}, db1, db2);
    CHECK(pinned.radial.phi[n] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pinned.z[n] == doctest::Approx(0.5 * c * n).epsilon(1e-12));

    // z is a martingale: E[z_T] = 0 within 3 SE
    const long trials = 10000;
    auto zs = mc::parallel_map<double>(trials, 2, [&](long trial) {
        Rng rng = Rng::for_trial(903, "z_martingale", static_cast<uint64_t>(trial));
        const auto p = simulate_full(cfg, {{kPi / 2, 0.0}, 0.0}, 0.5, rng);
        return p.z[p.z.size() - 1];
    });
    Eigen::Map<Eigen::ArrayXd> z(zs.data(), zs.size());
    const double se = std::sqrt(stats::variance(z) / trials);
    CHECK(std::abs(stats::mean(z)) < 3.0 * se);
}

TEST_CASE("weak error sanity against a finer grid") {
    const double T = 0.5;
    const long n_coarse = 40000, n_fine = 10000;
    SdeConfig coarse;
    coarse.k = Curvature::Spherical;
    coarse.dt = 1e-3;
    SdeConfig fine = coarse;
    fine.dt = 1e-4;
    auto run = [&](const SdeConfig& cfg, long trials, const char* tag) {
        auto vals = mc::parallel_map<double>(trials, 2, [&](long trial) {
            Rng rng = Rng::for_trial(904, tag, static_cast<uint64_t>(trial));
            const auto p = simulate_radial(cfg, kPi / 2, T, rng);
            return std::cos(p.phi[p.phi.size() - 1]);
        });
        Eigen::Map<Eigen::ArrayXd> x(vals.data(), vals.size());
        return std::pair<double, double>(stats::mean(x), std::sqrt(stats::variance(x) / trials));
    };
    const auto [m_coarse, se_coarse] = run(coarse, n_coarse, "weak_coarse");
    const auto [m_fine, se_fine] = run(fine, n_fine, "weak_fine");
    CHECK(std::abs(m_coarse - m_fine) < 3.0 * std::hypot(se_coarse, se_fine));
}

TEST_CASE("clamp saturation is reported") {
    SdeConfig cfg;
    cfg.k = Curvature::Spherical;
    cfg.dt = 1e-2;
    cfg.phi_floor = 1e-4;
    Rng rng(42);
    const auto p = simulate_radial(cfg, 2e-4, 1.0, rng);
    CHECK(p.diag.clamp_saturated());
}
