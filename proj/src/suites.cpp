#include "subriem/suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subriem/geometry.hpp"
#include "subriem/stats.hpp"

namespace subriem::mc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    const long n = static_cast<long>(xs.size());
    if (n == 0) return {};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double m = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0};
}
}  // namespace

// ---------------------------------------------------------------------------
// exit formulas

json verify_exit_formulas(const ExitSuiteConfig& suite, const McConfig& cfg) {
    json out;
    out["trials"] = cfg.trials;
    out["dt_w"] = suite.dt_w;
    out["detection"] = suite.detection == onedim::CrossingDetection::grid ? "grid" : "bridge";
    out["z_threshold"] = suite.z_threshold;
    bool all_pass = true;

    json rows = json::array();
    for (const auto& iv : suite.intervals) {
        struct Draw {
            double h;
            bool upper;
        };
        auto draws = parallel_map<Draw>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
            Rng rng = Rng::for_trial(cfg.master_seed, "verify_exit", static_cast<uint64_t>(trial));
            const auto s = onedim::sample_exit_time(iv, suite.horizon, suite.dt_w, rng, suite.detection);
            if (!s) return Draw{suite.horizon, false};
            return Draw{s->time, s->side == onedim::ExitSide::upper};
        });

        json row;
        row["a"] = iv.a;
        row["b"] = iv.b;

        std::vector<double> hs(draws.size());
        long upper = 0;
        for (size_t i = 0; i < draws.size(); ++i) {
            hs[i] = draws[i].h;
            if (draws[i].upper) ++upper;
        }
        const MeanSe h = mean_se(hs);
        const double mean_exact = onedim::exit_mean(iv);
        row["mean"] = {{"estimate", h.mean},
                       {"exact", mean_exact},
                       {"z", (h.mean - mean_exact) / h.se}};
        all_pass &= std::abs((h.mean - mean_exact) / h.se) < suite.z_threshold;

        const double p_up = static_cast<double>(upper) / cfg.trials;
        const double p_exact = onedim::exit_hits_upper_prob(iv);
        const double p_se = std::sqrt(p_exact * (1.0 - p_exact) / cfg.trials);
        row["hit_upper"] = {{"estimate", p_up}, {"exact", p_exact}, {"z", (p_up - p_exact) / p_se}};
        all_pass &= std::abs((p_up - p_exact) / p_se) < suite.z_threshold;

        json mgfs = json::array();
        for (double delta : suite.deltas) {
            json m;
            m["delta"] = delta;
            {
                std::vector<double> es(hs.size());
                for (size_t i = 0; i < hs.size(); ++i) es[i] = std::exp(-delta * hs[i]);
                const MeanSe e = mean_se(es);
                const double exact = onedim::exit_mgf_neg(iv, delta);
                m["mgf_neg"] = {{"estimate", e.mean}, {"exact", exact}, {"z", (e.mean - exact) / e.se}};
                all_pass &= std::abs((e.mean - exact) / e.se) < suite.z_threshold;
            }
            // positive-exponent checks need a finite second moment, i.e.
            // sqrt(delta) (b - a) < pi/2
            if (std::sqrt(delta) * (iv.b - iv.a) < 0.5 * kPi) {
                std::vector<double> es(hs.size()), wes(hs.size());
                for (size_t i = 0; i < hs.size(); ++i) {
                    es[i] = std::exp(delta * hs[i]);
                    wes[i] = hs[i] * es[i];
                }
                const MeanSe e = mean_se(es);
                const double exact = onedim::exit_mgf_pos(iv, delta);
                m["mgf_pos"] = {{"estimate", e.mean}, {"exact", exact}, {"z", (e.mean - exact) / e.se}};
                all_pass &= std::abs((e.mean - exact) / e.se) < suite.z_threshold;

                const MeanSe w = mean_se(wes);
                const double bound = onedim::exit_weighted_bound(iv, delta);
                const bool ok = w.mean <= bound + suite.z_threshold * w.se;
                m["weighted_bound"] = {{"estimate", w.mean}, {"bound", bound}, {"pass", ok}};
                all_pass &= ok;
            }
            mgfs.push_back(m);
        }
        row["mgf"] = mgfs;
        rows.push_back(row);
    }
    out["intervals"] = rows;
    out["pass"] = all_pass;
    return out;
}

json verify_hitting_tail(double a, const std::vector<double>& ts, double dt_w, const McConfig& cfg) {
    const double horizon = *std::max_element(ts.begin(), ts.end());
    auto hits = parallel_map<double>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
        Rng rng = Rng::for_trial(cfg.master_seed, "hitting_tail", static_cast<uint64_t>(trial));
        const auto d = onedim::sample_hit_time(a, horizon, dt_w, rng);
        return d ? *d : horizon + 1.0;  // censored counts as D_a > t everywhere
    });

    json out;
    out["a"] = a;
    out["trials"] = cfg.trials;
    bool stated_ok = true, sharp_ok = true;
    json rows = json::array();
    for (double t : ts) {
        long count = 0;
        for (double h : hits) {
            if (h > t) ++count;
        }
        const double p = static_cast<double>(count) / cfg.trials;
        const double stated = onedim::hitting_tail_bound(a, t);
        const double sharp = onedim::sharp_hitting_tail_bound(a, t);
        stated_ok &= p <= stated;
        sharp_ok &= p <= sharp;
        rows.push_back({{"t", t},
                        {"p_hat", p},
                        {"stated_bound", stated},
                        {"sharp_bound", sharp},
                        {"below_stated", p <= stated},
                        {"below_sharp", p <= sharp}});
    }
    out["points"] = rows;
    out["pass_stated"] = stated_ok;
    out["pass_sharp"] = sharp_ok;
    return out;
}

// ---------------------------------------------------------------------------
// K(T) asymptotics

json verify_kt_asymptotics(const KtSuiteConfig& suite, const McConfig& cfg) {
    json out;
    out["k"] = curvature_to_int(suite.k);
    out["phi0"] = suite.phi0;
    out["dt"] = suite.dt;
    out["trials"] = cfg.trials;
    json rows = json::array();
    for (double T : suite.T_list) {
        struct Sample {
            double x;       // pi K(T) / (2T)
            double minus_a; // -A(T) from the stored increments
        };
        sde::SdeConfig sc;
        sc.k = suite.k;
        sc.dt = suite.dt;
        auto samples = parallel_map<Sample>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
            Rng rng = Rng::for_trial(cfg.master_seed, "verify_kt", static_cast<uint64_t>(trial));
            const auto radial = sde::simulate_radial(sc, suite.phi0, T, rng);
            const auto [K_grid, K_T] = bridge::compute_K(radial);
            double a = 0.0;
            const Eigen::Index n = radial.steps();
            for (Eigen::Index i = 0; i < n; ++i) {
                a += std::sin(kPi * radial.times[i] / T) * radial.b1_increments[i];
            }
            a *= std::sqrt(2.0 / T);
            return Sample{kPi * K_T / (2.0 * T), -a};
        });
        Eigen::ArrayXd xs(cfg.trials), mas(cfg.trials);
        for (long i = 0; i < cfg.trials; ++i) {
            xs[i] = samples[static_cast<size_t>(i)].x;
            mas[i] = samples[static_cast<size_t>(i)].minus_a;
        }
        const auto ks = stats::ks_test_standard_normal(xs);
        rows.push_back({{"T", T},
                        {"mean", stats::mean(xs)},
                        {"variance", stats::variance(xs)},
                        {"ks_statistic", ks.statistic},
                        {"ks_p_value", ks.p_value},
                        {"corr_with_minus_A", stats::correlation(xs, mas)}});
    }
    out["rows"] = rows;
    return out;
}

// ---------------------------------------------------------------------------
// geometry identities

json verify_geometry(const GeometrySuiteConfig& suite, const McConfig& cfg) {
    json out;

    // frame invariance of triangle areas, all three curvatures
    double max_area_residual = 0.0;
    double max_distance_residual = 0.0;
    for (Curvature k : {Curvature::Spherical, Curvature::Hyperbolic, Curvature::Flat}) {
        Rng rng = Rng::for_trial(cfg.master_seed, "verify_geometry_frames", curvature_to_int(k) + 1);
        for (long i = 0; i < suite.frame_trials; ++i) {
            const double phi_hi = k == Curvature::Spherical ? 1.4 : 2.0;
            geo::SurfacePoint pts[3];
            for (auto& p : pts) p = {rng.uniform(0.05, phi_hi), rng.uniform(0.0, 2.0 * kPi)};
            const auto frame = geo::FrameIsometry::random(k, rng);
            geo::SurfacePoint moved[3];
            bool at_pole = false;
            for (int j = 0; j < 3; ++j) {
                const auto f = frame.apply(pts[j]);
                moved[j] = f.p;
                at_pole |= f.at_pole;
            }
            if (at_pole) continue;
            const double a0 = geo::triangle_area(k, pts[0], pts[1], pts[2]).value;
            const double a1 = geo::triangle_area(k, moved[0], moved[1], moved[2]).value;
            max_area_residual = std::max(max_area_residual, std::abs(a1 - a0));
            const double d0 = geo::riemannian_distance(k, pts[0], pts[1]);
            const double d1 = geo::riemannian_distance(k, moved[0], moved[1]);
            max_distance_residual = std::max(max_distance_residual, std::abs(d1 - d0));
        }
    }
    out["max_area_residual"] = max_area_residual;
    out["max_distance_residual"] = max_distance_residual;

    // mod-4pi frame independence of I'_T - I_T on matched-endpoint pairs
    auto block_cfg = suite.pair_block;
    block_cfg.keep_paths = true;
    auto residuals = parallel_map<double>(suite.pair_trials, cfg.resolved_threads(), [&](long trial) {
        Rng rng = Rng::for_trial(cfg.master_seed, "verify_geometry_pairs", static_cast<uint64_t>(trial));
        const double dz = rng.uniform(0.1, kFourPi - 0.1);
        const auto block = bridge::run_block(block_cfg, dz, rng);
        const auto& paths = *block.paths;
        const auto f1 = geo::FrameIsometry::random(block_cfg.k, rng);
        const auto f2 = geo::FrameIsometry::random(block_cfg.k, rng);
        const double d1 = -dz +
                          geo::swept_area_path(block_cfg.k, paths.radial.phi, paths.theta_p, &f1) -
                          geo::swept_area_path(block_cfg.k, paths.radial.phi, paths.theta, &f1);
        const double d2 = -dz +
                          geo::swept_area_path(block_cfg.k, paths.radial.phi, paths.theta_p, &f2) -
                          geo::swept_area_path(block_cfg.k, paths.radial.phi, paths.theta, &f2);
        return std::abs(geo::wrap_mod_4pi(d1 - d2));
    });
    double max_pair_residual = 0.0;
    for (double r : residuals) max_pair_residual = std::max(max_pair_residual, r);
    out["pair_trials"] = suite.pair_trials;
    out["max_pair_mod4pi_residual"] = max_pair_residual;
    out["pass"] = max_area_residual < 1e-9 && max_pair_residual < 1e-6;
    return out;
}

// ---------------------------------------------------------------------------
// bridge coupling tails

BridgeTailExperiment bridge_tail_experiment(const bridge::BlockConfig& block, double dz0,
                                            int max_blocks, const McConfig& cfg, bool with_records) {
    struct Trial {
        std::optional<double> tau;
        int n_blocks;
        int n_successes;
        int n_symmetric;
        std::vector<double> K_T, varsigma, delta_z;
    };
    auto trials = parallel_map<Trial>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
        Rng rng = Rng::for_trial(cfg.master_seed, "couple_bridge", static_cast<uint64_t>(trial));
        const auto run = bridge::run_until_coupled(block, dz0, max_blocks, rng);
        Trial t;
        t.tau = run.tau;
        t.n_blocks = static_cast<int>(run.blocks.size());
        t.n_successes = 0;
        t.n_symmetric = 0;
        t.K_T.reserve(run.blocks.size());
        for (const auto& b : run.blocks) {
            t.K_T.push_back(b.K_T);
            t.varsigma.push_back(b.varsigma.value_or(-1.0));
            t.delta_z.push_back(b.delta_z_out);
            if (b.success) ++t.n_successes;
            if (b.symmetric_exit_by_one) ++t.n_symmetric;
        }
        return t;
    });

    BridgeTailExperiment exp;
    std::vector<std::optional<double>> taus(trials.size());
    for (size_t i = 0; i < trials.size(); ++i) {
        taus[i] = trials[i].tau;
        exp.total_blocks += trials[i].n_blocks;
        exp.total_successes += trials[i].n_successes;
        exp.total_symmetric += trials[i].n_symmetric;
    }
    Eigen::ArrayXd ts(max_blocks);
    for (int j = 0; j < max_blocks; ++j) ts[j] = (j + 1) * block.T;
    exp.curve = tail_from_taus(taus, ts);
    exp.fit = fit_exponential_rate(exp.curve);
    exp.curve.fitted_rate = exp.fit;
    exp.block_success_rate = static_cast<double>(exp.total_successes) / exp.total_blocks;
    exp.block_success_lower95 =
        stats::wilson_interval(exp.total_successes, exp.total_blocks).lower;
    exp.symmetric_rate = static_cast<double>(exp.total_symmetric) / exp.total_blocks;
    exp.symmetric_lower95 = stats::wilson_interval(exp.total_symmetric, exp.total_blocks).lower;

    if (with_records) {
        exp.records = json::array();
        for (size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            json rec;
            rec["trial"] = i;
            if (t.tau) rec["tau"] = *t.tau; else rec["tau"] = nullptr;
            rec["n_blocks"] = t.n_blocks;
            rec["K_T"] = t.K_T;
            rec["varsigma"] = t.varsigma;
            rec["delta_z"] = t.delta_z;
            exp.records.push_back(std::move(rec));
        }
    }
    return exp;
}

// ---------------------------------------------------------------------------
// reflection coupling

ReflectExperiment reflect_experiment(double rho0, double zeta0,
                                     const reflection::ReflectionConfig& refl,
                                     const Eigen::ArrayXd& ts, double delta, const McConfig& cfg,
                                     bool with_records) {
    struct Trial {
        double tau1;
        double zeta;
        bool censored;
        long clamps;
    };
    auto trials = parallel_map<Trial>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
        Rng rng = Rng::for_trial(cfg.master_seed, "couple_reflect", static_cast<uint64_t>(trial));
        const auto r = reflection::run_reflection(rho0, zeta0, refl, rng);
        return Trial{r.tau1, r.zeta_tau1, r.censored, r.clamp_events};
    });

    ReflectExperiment exp;
    exp.delta = delta;
    std::vector<std::optional<double>> taus(trials.size());
    std::vector<double> tau1s;
    tau1s.reserve(trials.size());
    for (size_t i = 0; i < trials.size(); ++i) {
        taus[i] = trials[i].censored ? std::nullopt : std::optional<double>(trials[i].tau1);
        exp.clamp_events += trials[i].clamps;
        if (!trials[i].censored) tau1s.push_back(trials[i].tau1);
    }
    exp.curve = tail_from_taus(taus, ts);
    const MeanSe m = mean_se(tau1s);
    exp.mean_tau1 = m.mean;
    exp.se_tau1 = m.se;
    exp.mean_bound = 0.5 * rho0 * (kPi - 0.5 * rho0);
    exp.bound_curve.resize(ts.size());
    for (Eigen::Index j = 0; j < ts.size(); ++j) {
        exp.bound_curve[j] = reflection::reflection_tail_bound(rho0, ts[j], delta);
    }
    if (with_records) {
        exp.records = json::array();
        for (size_t i = 0; i < trials.size(); ++i) {
            exp.records.push_back({{"trial", i},
                                   {"tau1", trials[i].tau1},
                                   {"zeta_tau1", trials[i].zeta},
                                   {"censored", trials[i].censored}});
        }
    }
    return exp;
}

json zeta_moment_check(const std::vector<double>& rho0_grid, double p,
                       const reflection::ReflectionConfig& refl, const McConfig& cfg) {
    if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("zeta_moment_check: p in (0, 1/2)");
    json out;
    out["p"] = p;
    out["trials"] = cfg.trials;
    json rows = json::array();
    double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
    for (double rho0 : rho0_grid) {
        auto moments = parallel_map<double>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
            Rng rng = Rng::for_trial(cfg.master_seed, "zeta_moment", static_cast<uint64_t>(trial));
            const auto r = reflection::run_reflection(rho0, 0.0, refl, rng);
            return std::pow(std::abs(r.zeta_tau1), 0.5 + p);
        });
        std::vector<double> xs(moments.begin(), moments.end());
        const MeanSe m = mean_se(xs);
        const double ratio = m.mean / rho0;  // d_cc proxy of the start is rho0 itself
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
        rows.push_back({{"rho0", rho0}, {"moment", m.mean}, {"se", m.se}, {"ratio", ratio}});
    }
    out["rows"] = rows;
    out["ratio_max_over_min"] = ratio_max / ratio_min;
    return out;
}

// ---------------------------------------------------------------------------
// full SU(2) coupling with tracing

double eval_test_function(TestFunction f, double phi, double z) {
    switch (f) {
        case TestFunction::cos_half_z: return std::cos(0.5 * z);
        case TestFunction::cos_phi: return std::cos(phi);
        default: return std::cos(0.5 * z) * std::cos(phi);
    }
}

const char* test_function_name(TestFunction f) {
    switch (f) {
        case TestFunction::cos_half_z: return "f1";
        case TestFunction::cos_phi: return "f2";
        default: return "f3";
    }
}

std::optional<TestFunction> test_function_from_name(const std::string& name) {
    if (name == "f1") return TestFunction::cos_half_z;
    if (name == "f2") return TestFunction::cos_phi;
    if (name == "f3") return TestFunction::product;
    return std::nullopt;
}

namespace {

struct FullTrial {
    std::optional<double> tau;
    double tau1 = 0.0;
    double zeta_tau1 = 0.0;
    bool censored = false;
    std::vector<double> diffs;  // flattened [f][t]
};

FullTrial run_full_trial(double rho0, double zeta0, const bridge::BlockConfig& block_in,
                         const reflection::ReflectionConfig& refl, int max_blocks,
                         const Eigen::ArrayXd& trace_ts, const std::vector<TestFunction>& fs,
                         Rng& rng) {
    const bool traced = !fs.empty() && trace_ts.size() > 0;
    const Eigen::Index nt = trace_ts.size();
    const size_t nf = fs.size();

    FullTrial trial;
    trial.diffs.assign(traced ? nf * static_cast<size_t>(nt) : 0, 0.0);

    Eigen::Index next_snap = 0;
    // states of the two physical processes; during phase 1 process 1 sits
    // below the equator (phi = pi/2 - h) and process 2 mirrors it
    double z1 = 0.0, z2 = zeta0;

    auto record = [&](double time, double phi1, double phi2, double z1v, double z2v) {
        while (next_snap < nt && trace_ts[next_snap] <= time + 1e-12) {
            for (size_t fi = 0; fi < nf; ++fi) {
                trial.diffs[fi * nt + next_snap] = eval_test_function(fs[fi], phi1, z1v) -
                                                   eval_test_function(fs[fi], phi2, z2v);
            }
            ++next_snap;
        }
    };

    // phase 1: mirror coupling, identical draws to run_reflection
    const double sq = std::sqrt(refl.dt);
    const double guard = 0.5 * kPi - 1e-6;
    const long max_steps = static_cast<long>(std::llround(refl.horizon / refl.dt));
    double h = 0.5 * rho0;
    double zeta_acc = 0.0;
    long step = 0;
    for (; step < max_steps && h > refl.h_tol; ++step) {
        if (traced) record(step * refl.dt, 0.5 * kPi - h, 0.5 * kPi + h, z1, z2);
        const double g1 = rng.gaussian();
        const double g2 = rng.gaussian();
        zeta_acc -= 2.0 * std::tan(h) * sq * g2;
        if (traced) {
            const double dv = -sq * g2;
            z1 += std::tan(0.5 * (0.5 * kPi - h)) * dv;
            z2 += std::tan(0.5 * (0.5 * kPi + h)) * dv;
        }
        h = reflection::mirror_half_step(h, g1, refl.dt);
        if (h >= guard) h = guard;
        if (h < 0.0) h = 0.0;
    }
    trial.tau1 = step * refl.dt;
    trial.zeta_tau1 = geo::wrap_mod_4pi(zeta0 + zeta_acc);
    if (h > refl.h_tol) {
        // surface processes never met before the horizon
        if (traced) record(refl.horizon, 0.5 * kPi - h, 0.5 * kPi + h, z1, z2);
        trial.censored = true;
        return trial;
    }

    // phase 2: fiber coupling with frame resets; both processes share the
    // surface reset, the fiber values continue
    const double gap0 = std::abs(trial.zeta_tau1);
    if (gap0 == 0.0) {
        trial.tau = trial.tau1;
        return trial;
    }
    // zeta = z2 - z1; the construction assumes z_unprimed - z_primed > 0
    const bool swapped = trial.zeta_tau1 > 0.0;  // process 2 takes the unprimed role
    auto block_cfg = block_in;
    block_cfg.keep_paths = traced;
    double dz = gap0;
    double z_unpr = swapped ? z2 : z1;
    double z_pr = swapped ? z1 : z2;
    double t_base = trial.tau1;
    for (int j = 0; j < max_blocks; ++j) {
        const auto block = bridge::run_block(block_cfg, dz, rng);
        if (traced) {
            const auto& paths = *block.paths;
            const Eigen::Index n = paths.radial.steps();
            // on success the processes merge at the block end; snapshots from
            // the coupling time on stay exactly zero
            const Eigen::Index i_max = block.success ? n - 1 : n;
            for (Eigen::Index i = 0; i <= i_max && next_snap < nt; ++i) {
                const double time = t_base + i * block_cfg.dt;
                if (trace_ts[next_snap] > time + 1e-12) continue;
                const double phi = paths.radial.phi[i];
                const double zu = z_unpr + (paths.z[i] - dz);
                const double zp = z_pr + paths.z_p[i];
                const double za = swapped ? zp : zu;
                const double zb = swapped ? zu : zp;
                record(time, phi, phi, za, zb);
            }
            z_unpr += block.paths->z[block.paths->radial.steps()] - dz;
            z_pr += block.paths->z_p[block.paths->radial.steps()];
        }
        t_base += block_cfg.T;
        if (block.success) {
            trial.tau = trial.tau1 + (j + 1) * block_cfg.T;
            // merged from tau on: the remaining diffs stay exactly 0
            next_snap = nt;
            return trial;
        }
        dz = block.delta_z_out;
    }
    trial.censored = true;
    return trial;
}

}  // namespace

FullCouplingExperiment full_su2_experiment(double rho0, double zeta0,
                                           const bridge::BlockConfig& block,
                                           const reflection::ReflectionConfig& refl,
                                           int max_blocks, const Eigen::ArrayXd& tail_ts,
                                           const Eigen::ArrayXd& trace_ts,
                                           const std::vector<TestFunction>& fs,
                                           const McConfig& cfg, bool with_records) {
    if (trace_ts.size() > 0 && !fs.empty()) {
        const double t_max = trace_ts[trace_ts.size() - 1];
        if (t_max > refl.horizon || t_max > max_blocks * block.T) {
            throw std::invalid_argument("full_su2_experiment: trace grid exceeds the horizon");
        }
    }
    auto trials = parallel_map<FullTrial>(cfg.trials, cfg.resolved_threads(), [&](long trial) {
        Rng rng = Rng::for_trial(cfg.master_seed, "full_su2", static_cast<uint64_t>(trial));
        return run_full_trial(rho0, zeta0, block, refl, max_blocks, trace_ts, fs, rng);
    });

    FullCouplingExperiment exp;
    exp.ts = trace_ts;
    exp.taus.resize(trials.size());
    exp.tau1s.resize(trials.size());
    exp.zeta_tau1s.resize(trials.size());
    for (size_t i = 0; i < trials.size(); ++i) {
        exp.taus[i] = trials[i].tau;
        exp.tau1s[i] = trials[i].tau1;
        exp.zeta_tau1s[i] = trials[i].zeta_tau1;
        if (trials[i].censored) ++exp.n_censored;
    }
    exp.tail = tail_from_taus(exp.taus, tail_ts);
    exp.fit = fit_exponential_rate(exp.tail);
    exp.tail.fitted_rate = exp.fit;

    const Eigen::Index nt = trace_ts.size();
    for (size_t fi = 0; fi < fs.size(); ++fi) {
        Eigen::ArrayXd mean(nt), se(nt);
        for (Eigen::Index j = 0; j < nt; ++j) {
            double sum = 0.0;
            for (const auto& t : trials) sum += t.diffs[fi * nt + j];
            const double m = sum / trials.size();
            double ss = 0.0;
            for (const auto& t : trials) {
                const double d = t.diffs[fi * nt + j] - m;
                ss += d * d;
            }
            mean[j] = m;
            se[j] = trials.size() > 1 ? std::sqrt(ss / (trials.size() - 1) / trials.size()) : 0.0;
        }
        exp.mean_diff.push_back(std::move(mean));
        exp.se_diff.push_back(std::move(se));
    }

    if (with_records) {
        exp.records = json::array();
        for (size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            json rec;
            rec["trial"] = i;
            rec["tau1"] = t.tau1;
            rec["zeta_tau1"] = t.zeta_tau1;
            if (t.tau) {
                rec["tau2"] = *t.tau - t.tau1;
                rec["tau"] = *t.tau;
            } else {
                rec["tau2"] = nullptr;
                rec["tau"] = nullptr;
            }
            rec["censored"] = t.censored;
            exp.records.push_back(std::move(rec));
        }
    }
    return exp;
}

json gradient_demo(const FullCouplingExperiment& exp, const std::vector<TestFunction>& fs) {
    const long n = static_cast<long>(exp.taus.size());
    const Eigen::Index nt = exp.ts.size();
    json out;
    out["trials"] = n;
    bool all_pass = true;
    json rows = json::array();
    for (size_t fi = 0; fi < fs.size(); ++fi) {
        for (Eigen::Index j = 0; j < nt; ++j) {
            const double t = exp.ts[j];
            long count = 0;
            for (const auto& tau : exp.taus) {
                if (!tau || *tau > t) ++count;
            }
            const double p_hat = static_cast<double>(count) / n;
            const double se_p = std::sqrt(p_hat * (1.0 - p_hat) / n);
            const double diff = std::abs(exp.mean_diff[fi][j]);
            const double se_comb = exp.se_diff[fi][j] + 2.0 * se_p;
            const double bound = 2.0 * p_hat + 3.0 * se_comb;  // sup |f| = 1 for the built-ins
            const bool pass = diff <= bound;
            all_pass &= pass;
            rows.push_back({{"f", test_function_name(fs[fi])},
                            {"t", t},
                            {"abs_mean_diff", diff},
                            {"p_hat", p_hat},
                            {"bound", bound},
                            {"pass", pass}});
        }
    }
    out["rows"] = rows;
    out["pass"] = all_pass;
    return out;
}

}  // namespace subriem::mc
