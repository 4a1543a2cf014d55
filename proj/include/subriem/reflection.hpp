#pragma once

#include <Eigen/Dense>
#include <optional>

#include "subriem/bridge.hpp"
#include "subriem/rng.hpp"

namespace subriem::reflection {

// Mirror coupling on the sphere. The half-distance h = rho/2 follows
// dh = -dB^1 - (1/2) tan(h) dt and is absorbed at h_tol; the fiber gap
// accumulates zeta_t = zeta_0 - 2 int tan(h_s) dB^2_s with an independent
// driving stream.
struct ReflectionConfig {
    double dt = 1e-3;
    double h_tol = 1e-3;     // absorption threshold for h = rho/2
    double horizon = 50.0;   // censoring horizon
    bool keep_rho_path = false;
};

struct ReflectionResult {
    double tau1 = 0.0;       // surface coupling time (undefined when censored)
    double zeta_tau1 = 0.0;  // fiber gap at tau1, in (-2pi, 2pi]
    bool censored = false;
    long clamp_events = 0;   // guard clamps at pi/2 - 1e-6; should stay 0
    std::optional<Eigen::ArrayXd> rho_path;
};

// One Euler step of h with the drift taken implicitly:
//   h' + (dt/2) tan(h') = h - sqrt(dt) g.
// The left side sweeps (0, inf) as h' runs over (0, pi/2), so the step has a
// unique solution below pi/2 whenever the noise leaves the state positive;
// explicit stepping would jump across the pole with visible probability.
// Returns a non-positive value when the noise pushes the state through 0.
double mirror_half_step(double h, double gauss, double dt, bool with_drift = true);

// Spherical base only: no successful coupling exists on the hyperbolic plane.
ReflectionResult run_reflection(double rho0, double zeta0, const ReflectionConfig& cfg, Rng& rng);

// One sample of T_0 ^ T_u for the h process (drift optional, for the
// drift-free exit-time oracle).
double sample_stopped_time(double rho0, double u, double dt, Rng& rng, bool with_drift = true);

struct StoppedExpectationReport {
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;  // (rho0/2)(2u - rho0/2)
    long trials = 0;
    bool within_bound = false;  // estimate <= bound + 3 SE
};

StoppedExpectationReport stopped_expectation_check(double rho0, double u, double dt, long trials,
                                                   uint64_t master_seed, bool with_drift = true);

// Closed-form tail bound e^{-delta t}/t * (pi - rho0/2)(rho0/2) / cos^2(sqrt(delta/2) pi)
// valid for delta in (0, 1/2).
double reflection_tail_bound(double rho0, double t, double delta);

struct FullCouplingResult {
    double tau1 = 0.0;
    std::optional<double> tau2;
    std::optional<double> tau;  // tau1 + tau2
    double zeta_tau1 = 0.0;
    bool censored = false;
};

// Reflection coupling until the surface processes meet, then the fiber-bridge
// coupling seeded with |zeta_{tau1}|.
FullCouplingResult run_full_su2(double rho0, double zeta0, const bridge::BlockConfig& block_cfg,
                                const ReflectionConfig& refl_cfg, int max_blocks, Rng& rng);

}  // namespace subriem::reflection
