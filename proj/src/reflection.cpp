#include "subriem/reflection.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "subriem/geometry.hpp"

namespace subriem::reflection {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 0.5 * kPi;
constexpr double kGuard = kHalfPi - 1e-6;
}  // namespace

double mirror_half_step(double h, double gauss, double dt, bool with_drift) {
    const double y = h - std::sqrt(dt) * gauss;
    if (!with_drift) return y;
    if (y <= 0.0) return y;
    // solve x + (dt/2) tan(x) = y on (0, min(y, pi/2)) by safeguarded Newton
    const double c = 0.5 * dt;
    double lo = 0.0;
    double hi = std::min(y, kHalfPi - 1e-12);
    double x = std::min(y, 1.0);
    for (int it = 0; it < 60; ++it) {
        const double t = std::tan(x);
        const double f = x + c * t - y;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double fp = 1.0 + c * (1.0 + t * t);
        double next = x - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-14) return next;
        x = next;
    }
    return x;
}

ReflectionResult run_reflection(double rho0, double zeta0, const ReflectionConfig& cfg, Rng& rng) {
    if (!(rho0 > 0.0 && rho0 < kPi)) {
        throw std::invalid_argument("run_reflection: rho0 in (0, pi) required");
    }
    if (cfg.dt <= 0.0 || cfg.h_tol <= 0.0) {
        throw std::invalid_argument("run_reflection: dt, h_tol > 0 required");
    }

    ReflectionResult res;
    const long max_steps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    const double sq = std::sqrt(cfg.dt);
    double h = 0.5 * rho0;
    double zeta_acc = 0.0;  // -2 int tan(h) dB^2
    std::vector<double> rho;
    if (cfg.keep_rho_path) {
        rho.reserve(max_steps + 1);
        rho.push_back(2.0 * h);
    }

    long step = 0;
    for (; step < max_steps && h > cfg.h_tol; ++step) {
        // one gaussian for the distance, one for the fiber stream, in this order
        const double g1 = rng.gaussian();
        const double g2 = rng.gaussian();
        zeta_acc -= 2.0 * std::tan(h) * sq * g2;
        h = mirror_half_step(h, g1, cfg.dt);
        if (h >= kGuard) {
            h = kGuard;
            ++res.clamp_events;
        }
        if (h < 0.0) h = 0.0;
        if (cfg.keep_rho_path) rho.push_back(2.0 * h);
    }

    res.tau1 = step * cfg.dt;
    res.zeta_tau1 = geo::wrap_mod_4pi(zeta0 + zeta_acc);
    res.censored = h > cfg.h_tol;
    if (cfg.keep_rho_path) {
        res.rho_path = Eigen::Map<Eigen::ArrayXd>(rho.data(), rho.size());
    }
    return res;
}

double sample_stopped_time(double rho0, double u, double dt, Rng& rng, bool with_drift) {
    if (!(u > 0.5 * rho0 && u < kHalfPi)) {
        throw std::invalid_argument("sample_stopped_time: rho0/2 < u < pi/2 required");
    }
    const double h_tol = 1e-3;
    double h = 0.5 * rho0;
    long step = 0;
    while (h > h_tol && h < u) {
        h = mirror_half_step(h, rng.gaussian(), dt, with_drift);
        ++step;
    }
    return step * dt;
}

StoppedExpectationReport stopped_expectation_check(double rho0, double u, double dt, long trials,
                                                   uint64_t master_seed, bool with_drift) {
    StoppedExpectationReport rep;
    rep.trials = trials;
    rep.bound = 0.5 * rho0 * (2.0 * u - 0.5 * rho0);
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < trials; ++i) {
        Rng rng = Rng::for_trial(master_seed, "stopped_expectation", i);
        const double t = sample_stopped_time(rho0, u, dt, rng, with_drift);
        sum += t;
        sum2 += t * t;
    }
    rep.estimate = sum / trials;
    const double var = std::max(0.0, sum2 / trials - rep.estimate * rep.estimate);
    rep.std_error = std::sqrt(var / trials);
    rep.within_bound = rep.estimate <= rep.bound + 3.0 * rep.std_error;
    return rep;
}

double reflection_tail_bound(double rho0, double t, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw std::domain_error("reflection_tail_bound: delta in (0, 1/2) required");
    }
    if (!(t > 0.0) || !(rho0 > 0.0 && rho0 < kPi)) {
        throw std::domain_error("reflection_tail_bound: t > 0 and rho0 in (0, pi) required");
    }
    const double c = std::cos(std::sqrt(0.5 * delta) * kPi);
    return std::exp(-delta * t) / t * (kPi - 0.5 * rho0) * (0.5 * rho0) / (c * c);
}

FullCouplingResult run_full_su2(double rho0, double zeta0, const bridge::BlockConfig& block_cfg,
                                const ReflectionConfig& refl_cfg, int max_blocks, Rng& rng) {
    if (block_cfg.k != Curvature::Spherical) {
        throw std::invalid_argument("run_full_su2: spherical base required");
    }
    FullCouplingResult res;
    const ReflectionResult phase1 = run_reflection(rho0, zeta0, refl_cfg, rng);
    res.tau1 = phase1.tau1;
    res.zeta_tau1 = phase1.zeta_tau1;
    if (phase1.censored) {
        res.censored = true;
        return res;
    }
    const double gap = std::abs(phase1.zeta_tau1);  // role exchange maps into (0, 4pi)
    if (gap == 0.0) {
        res.tau2 = 0.0;
        res.tau = res.tau1;
        return res;
    }
    const bridge::CouplingRun phase2 = bridge::run_until_coupled(block_cfg, gap, max_blocks, rng);
    if (phase2.censored) {
        res.censored = true;
        return res;
    }
    res.tau2 = *phase2.tau;
    res.tau = res.tau1 + *phase2.tau;
    return res;
}

}  // namespace subriem::reflection
