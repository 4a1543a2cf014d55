#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "subriem/bridge.hpp"
#include "subriem/montecarlo.hpp"
#include "subriem/onedim.hpp"
#include "subriem/reflection.hpp"

namespace subriem::mc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// exit-time verification (closed forms of the one-dimensional toolbox)

struct ExitSuiteConfig {
    std::vector<onedim::ExitInterval> intervals = {{-1.0, 1.0}, {-1.0, 2.0}, {-0.5, 1.0}};
    std::vector<double> deltas = {0.5};
    double dt_w = 1e-4;
    double horizon = 1e3;
    onedim::CrossingDetection detection = onedim::CrossingDetection::grid;
    double z_threshold = 3.0;
};

json verify_exit_formulas(const ExitSuiteConfig& suite, const McConfig& cfg);

// Empirical tail of the first hitting time of level a against the stated
// bound |a|/sqrt(2 pi t) and the sharp bound 2|a|/sqrt(2 pi t).
json verify_hitting_tail(double a, const std::vector<double>& ts, double dt_w, const McConfig& cfg);

// ---------------------------------------------------------------------------
// K(T) small-T law

struct KtSuiteConfig {
    std::vector<double> T_list = {0.05, 0.02, 0.01};
    Curvature k = Curvature::Spherical;
    double phi0 = 1.5707963267948966;
    double dt = 1e-4;
};

json verify_kt_asymptotics(const KtSuiteConfig& suite, const McConfig& cfg);

// ---------------------------------------------------------------------------
// geometry identities

struct GeometrySuiteConfig {
    long frame_trials = 1000;   // random frame/triple invariance checks per curvature
    long pair_trials = 1000;    // coupled path pairs for the mod-4pi frame identity
    bridge::BlockConfig pair_block;  // block generating the matched-endpoint pairs

    GeometrySuiteConfig() {
        pair_block.T = 0.1;
        pair_block.dt = 1e-3;
        pair_block.keep_paths = true;
    }
};

json verify_geometry(const GeometrySuiteConfig& suite, const McConfig& cfg);

// ---------------------------------------------------------------------------
// coupling experiments

struct BridgeTailExperiment {
    TailCurve curve;
    RateFit fit;
    long total_blocks = 0;
    long total_successes = 0;
    double block_success_rate = 0.0;
    double block_success_lower95 = 0.0;  // Wilson lower bound
    // symmetric-exit statistics, the i.i.d. comparison behind the geometric
    // tail envelope (1 - p)^n
    long total_symmetric = 0;
    double symmetric_rate = 0.0;
    double symmetric_lower95 = 0.0;
    json records;  // one entry per trial
};

BridgeTailExperiment bridge_tail_experiment(const bridge::BlockConfig& block, double dz0,
                                            int max_blocks, const McConfig& cfg,
                                            bool with_records = true);

struct ReflectExperiment {
    TailCurve curve;         // tail of tau1
    double mean_tau1 = 0.0;
    double se_tau1 = 0.0;
    double mean_bound = 0.0;          // (rho0/2)(pi - rho0/2)
    Eigen::ArrayXd bound_curve;       // reflection_tail_bound on curve.ts (delta below)
    double delta = 0.4;
    long clamp_events = 0;
    json records;
};

ReflectExperiment reflect_experiment(double rho0, double zeta0,
                                     const reflection::ReflectionConfig& refl,
                                     const Eigen::ArrayXd& ts, double delta, const McConfig& cfg,
                                     bool with_records = true);

// E[|zeta_tau1|^{1/2+p}] over a grid of rho0 (zeta0 = 0), with the ratio to the
// d_cc proxy of the starting configuration (= rho0).
json zeta_moment_check(const std::vector<double>& rho0_grid, double p,
                       const reflection::ReflectionConfig& refl, const McConfig& cfg);

// ---------------------------------------------------------------------------
// full SU(2) coupling with optional state tracing for the semigroup demo

enum class TestFunction { cos_half_z, cos_phi, product };

double eval_test_function(TestFunction f, double phi, double z);
const char* test_function_name(TestFunction f);
std::optional<TestFunction> test_function_from_name(const std::string& name);

struct FullCouplingExperiment {
    std::vector<std::optional<double>> taus;
    std::vector<double> tau1s;
    std::vector<double> zeta_tau1s;
    long n_censored = 0;
    TailCurve tail;
    RateFit fit;
    // tracing results, one row per test function (empty when fs is empty)
    Eigen::ArrayXd ts;
    std::vector<Eigen::ArrayXd> mean_diff;  // mean of f(B_t) - f(B'_t) over trials
    std::vector<Eigen::ArrayXd> se_diff;
    json records;
};

FullCouplingExperiment full_su2_experiment(double rho0, double zeta0,
                                           const bridge::BlockConfig& block,
                                           const reflection::ReflectionConfig& refl,
                                           int max_blocks, const Eigen::ArrayXd& tail_ts,
                                           const Eigen::ArrayXd& trace_ts,
                                           const std::vector<TestFunction>& fs,
                                           const McConfig& cfg, bool with_records = true);

// Gradient/semigroup demonstration: for each f and t, checks
// |mean f(B_t) - mean f(B'_t)| <= 2 sup|f| p_hat(t) + 3 (SE_diff + 2 sup|f| SE_p).
json gradient_demo(const FullCouplingExperiment& exp, const std::vector<TestFunction>& fs);

}  // namespace subriem::mc
