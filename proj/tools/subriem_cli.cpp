// Command-line front end: configure an experiment, run it through the library,
// and emit CSV/JSON reports plus a static SVG tail plot. Every command writes
// a manifest sufficient to reproduce its outputs bit-exactly.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "subriem/report.hpp"
#include "subriem/sde.hpp"
#include "subriem/suites.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subriem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GlobalOpts {
    std::string out_dir;
    uint64_t seed = 20240901;
    int threads = 0;
    std::string config_path;
};

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    in >> j;
    if (j.contains("config")) j = j["config"];  // accept a previous manifest
    return j;
}

// fill options that were not given on the command line from the config file
void apply_config(CLI::App& cmd, const json& cfg) {
    for (CLI::Option* opt : cmd.get_options([](const CLI::Option*) { return true; })) {
        for (const auto& name : opt->get_lnames()) {
            if (cfg.contains(name) && opt->count() == 0) {
                const json& v = cfg[name];
                const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
                opt->add_result(text);
                opt->run_callback();
                break;
            }
        }
    }
}

fs::path resolve_out_dir(const GlobalOpts& g) {
    if (!g.out_dir.empty()) return g.out_dir;
    if (const char* env = std::getenv("SUBRIEM_OUT_DIR")) return env;
    return ".";
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("list", "expected comma-separated numbers");
    return out;
}

Eigen::ArrayXd to_array(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::ArrayXd>(v.data(), v.size());
}

std::string path_csv(const sde::FullPath& p) {
    std::ostringstream out;
    out << "t,phi,theta,z,sigma\n";
    char buf[160];
    for (Eigen::Index i = 0; i < p.radial.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.radial.times[i],
                      p.radial.phi[i], p.theta[i], p.z[i], p.radial.sigma[i]);
        out << buf;
    }
    return out.str();
}

int finish(report::RunManifest& manifest, const fs::path& dir, const std::string& name, bool pass) {
    manifest.finish();
    manifest.write(dir / (name + "_manifest.json"));
    std::cout << (pass ? "PASS" : "FAIL") << ": outputs in " << dir.string() << "\n";
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, int k, double phi0, double theta0, double z0, double T,
                 double dt) {
    sde::SdeConfig cfg;
    cfg.k = curvature_from_int(k);
    cfg.dt = dt;
    cfg.validate(phi0);  // rejects phi0 at or below the floor

    Rng rng = Rng::for_trial(g.seed, "simulate", 0);
    const auto path = sde::simulate_full(cfg, {{phi0, theta0}, z0}, T, rng);

    const fs::path dir = resolve_out_dir(g);
    fs::create_directories(dir);
    json config{{"k", k},   {"phi0", phi0},     {"theta0", theta0}, {"z0", z0}, {"T", T},
                {"dt", dt}, {"seed", g.seed}};
    report::RunManifest manifest("simulate", config);
    report::write_text_atomic(dir / "path.csv", path_csv(path));
    manifest.add_output(dir / "path.csv");
    if (path.radial.diag.clamp_saturated()) {
        std::cerr << "warning: " << path.radial.diag.clamp_events
                  << " clamped steps; decrease dt or move phi0 away from the poles\n";
    }
    return finish(manifest, dir, "simulate", true);
}

int cmd_verify(const GlobalOpts& g, const std::string& which, long trials, double dt_w,
               const std::string& detection, const std::string& T_csv, int k, double phi0,
               long pair_trials) {
    const fs::path dir = resolve_out_dir(g);
    fs::create_directories(dir);
    mc::McConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = g.seed;
    cfg.threads = g.threads;

    json config{{"which", which}, {"trials", trials}, {"seed", g.seed}, {"threads", g.threads}};
    json rep;
    bool pass = false;
    if (which == "exit") {
        mc::ExitSuiteConfig suite;
        suite.dt_w = dt_w;
        suite.detection = detection == "bridge" ? onedim::CrossingDetection::bridge
                                                : onedim::CrossingDetection::grid;
        config["dt-w"] = dt_w;
        config["detection"] = detection;
        rep = mc::verify_exit_formulas(suite, cfg);
        pass = rep["pass"].get<bool>();
    } else if (which == "kt") {
        mc::KtSuiteConfig suite;
        suite.T_list = parse_list(T_csv);
        suite.k = curvature_from_int(k);
        suite.phi0 = phi0;
        config["T"] = T_csv;
        config["k"] = k;
        config["phi0"] = phi0;
        rep = mc::verify_kt_asymptotics(suite, cfg);
        const auto& last = rep["rows"].back();
        pass = std::abs(last["variance"].get<double>() - 1.0) <= 0.1 &&
               last["ks_p_value"].get<double>() > 0.01 &&
               last["corr_with_minus_A"].get<double>() >= 0.95;
        rep["pass"] = pass;
    } else {
        mc::GeometrySuiteConfig suite;
        suite.pair_trials = pair_trials;
        config["pair-trials"] = pair_trials;
        rep = mc::verify_geometry(suite, cfg);
        pass = rep["pass"].get<bool>();
    }
    report::RunManifest manifest("verify_" + which, config);
    rep["config"] = config;
    report::write_json(dir / ("verify_" + which + ".json"), rep);
    manifest.add_output(dir / ("verify_" + which + ".json"));
    return finish(manifest, dir, "verify_" + which, pass);
}

int cmd_couple_bridge(const GlobalOpts& g, int k, double dz0, double T, double dt, long trials,
                      int max_blocks, bool records) {
    bridge::BlockConfig block;
    block.k = curvature_from_int(k);
    block.T = T;
    block.dt = dt;
    mc::McConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = g.seed;
    cfg.threads = g.threads;

    const auto exp = mc::bridge_tail_experiment(block, dz0, max_blocks, cfg, records);
    const fs::path dir = resolve_out_dir(g);
    fs::create_directories(dir);
    json config{{"k", k},         {"dz0", dz0},       {"T", T},
                {"dt", dt},       {"trials", trials}, {"max-blocks", max_blocks},
                {"seed", g.seed}, {"threads", g.threads}};
    report::RunManifest manifest("couple_bridge", config);

    report::write_text_atomic(dir / "bridge_tail.csv", report::tail_curve_csv(exp.curve));
    json rate = report::tail_curve_json(exp.curve);
    rate["config"] = config;
    rate["block_success_rate"] = exp.block_success_rate;
    rate["block_success_lower95"] = exp.block_success_lower95;
    rate["symmetric_exit_rate"] = exp.symmetric_rate;
    rate["symmetric_exit_lower95"] = exp.symmetric_lower95;
    rate["total_blocks"] = exp.total_blocks;
    report::write_json(dir / "bridge_rate.json", rate);
    if (records) {
        report::write_json(dir / "bridge_records.json", exp.records);
        manifest.add_output(dir / "bridge_records.json");
    }
    // geometric envelope from the symmetric-exit lower bound
    Eigen::ArrayXd envelope(exp.curve.ts.size());
    for (Eigen::Index j = 0; j < envelope.size(); ++j) {
        envelope[j] = std::pow(1.0 - exp.symmetric_lower95, static_cast<double>(j + 1));
    }
    report::write_text_atomic(dir / "bridge_tail.svg",
                              svg::tail_plot(exp.curve, envelope, "fiber coupling tail"));
    manifest.add_output(dir / "bridge_tail.csv");
    manifest.add_output(dir / "bridge_rate.json");
    manifest.add_output(dir / "bridge_tail.svg");

    const bool pass = exp.fit.n_points >= 2 && exp.fit.c_hat > 0.0;
    return finish(manifest, dir, "couple_bridge", pass);
}

int cmd_couple_reflect(const GlobalOpts& g, int k, double rho0, double zeta0, double dt,
                       double horizon, long trials, double delta, bool records) {
    if (k != 1) {
        // Wang's Liouville theorem rules out a successful coupling on the
        // hyperbolic plane; the reflection phase only exists on the sphere.
        throw CLI::ValidationError(
            "--k", "reflection coupling requires k=1: no successful coupling exists for k=-1, "
                   "and the k=0 surface offers none either");
    }
    reflection::ReflectionConfig refl;
    refl.dt = dt;
    refl.horizon = horizon;
    mc::McConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = g.seed;
    cfg.threads = g.threads;
    Eigen::ArrayXd ts = Eigen::ArrayXd::LinSpaced(24, 0.5, 12.0);
    const auto exp = mc::reflect_experiment(rho0, zeta0, refl, ts, delta, cfg, records);

    const fs::path dir = resolve_out_dir(g);
    fs::create_directories(dir);
    json config{{"k", k},           {"rho0", rho0},     {"zeta0", zeta0},
                {"dt", dt},         {"horizon", horizon}, {"trials", trials},
                {"delta", delta},   {"seed", g.seed},   {"threads", g.threads}};
    report::RunManifest manifest("couple_reflect", config);

    report::write_text_atomic(dir / "reflect_tail.csv", report::tail_curve_csv(exp.curve));
    json rep = report::tail_curve_json(exp.curve);
    rep["config"] = config;
    rep["mean_tau1"] = exp.mean_tau1;
    rep["se_tau1"] = exp.se_tau1;
    rep["mean_bound"] = exp.mean_bound;
    rep["clamp_events"] = exp.clamp_events;
    rep["bound_curve"] = std::vector<double>(exp.bound_curve.data(),
                                             exp.bound_curve.data() + exp.bound_curve.size());
    report::write_json(dir / "reflect_report.json", rep);
    if (records) {
        report::write_json(dir / "reflect_records.json", exp.records);
        manifest.add_output(dir / "reflect_records.json");
    }
    Eigen::ArrayXd capped = exp.bound_curve.min(1.0);
    report::write_text_atomic(dir / "reflect_tail.svg",
                              svg::tail_plot(exp.curve, capped, "reflection coupling tail"));
    manifest.add_output(dir / "reflect_tail.csv");
    manifest.add_output(dir / "reflect_report.json");
    manifest.add_output(dir / "reflect_tail.svg");

    bool pass = exp.mean_tau1 <= exp.mean_bound + 3.0 * exp.se_tau1 && exp.clamp_events == 0;
    for (Eigen::Index j = 0; j < ts.size(); ++j) {
        pass &= exp.curve.p_hat[j] <= exp.bound_curve[j];
    }
    return finish(manifest, dir, "couple_reflect", pass);
}

int cmd_couple_full(const GlobalOpts& g, double rho0, double zeta0, double T, double dt,
                    double horizon, long trials, int max_blocks, bool records) {
    bridge::BlockConfig block;
    block.T = T;
    block.dt = dt;
    reflection::ReflectionConfig refl;
    refl.dt = dt;
    refl.horizon = horizon;
    mc::McConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = g.seed;
    cfg.threads = g.threads;
    Eigen::ArrayXd tail_ts = Eigen::ArrayXd::LinSpaced(25, 2 * T, 50 * T);
    const auto exp = mc::full_su2_experiment(rho0, zeta0, block, refl, max_blocks, tail_ts,
                                             Eigen::ArrayXd(), {}, cfg, records);

    const fs::path dir = resolve_out_dir(g);
    fs::create_directories(dir);
    json config{{"rho0", rho0},     {"zeta0", zeta0},   {"T", T},
                {"dt", dt},         {"horizon", horizon}, {"trials", trials},
                {"max-blocks", max_blocks}, {"seed", g.seed}, {"threads", g.threads}};
    report::RunManifest manifest("couple_full", config);
    report::write_text_atomic(dir / "full_tail.csv", report::tail_curve_csv(exp.tail));
    json rep = report::tail_curve_json(exp.tail);
    rep["config"] = config;
    rep["n_censored"] = exp.n_censored;
    report::write_json(dir / "full_rate.json", rep);
    if (records) {
        report::write_json(dir / "full_records.json", exp.records);
        manifest.add_output(dir / "full_records.json");
    }
    report::write_text_atomic(dir / "full_tail.svg",
                              svg::tail_plot(exp.tail, std::nullopt, "full coupling tail"));
    manifest.add_output(dir / "full_tail.csv");
    manifest.add_output(dir / "full_rate.json");
    manifest.add_output(dir / "full_tail.svg");

    const bool pass = exp.fit.n_points >= 2 && exp.fit.c_hat > 0.0;
    return finish(manifest, dir, "couple_full", pass);
}

int cmd_gradient(const GlobalOpts& g, double rho0, double dz0, const std::string& f_csv,
                 const std::string& ts_csv, double T, double dt, double horizon, long trials,
                 int max_blocks) {
    std::vector<mc::TestFunction> fs;
    {
        std::stringstream ss(f_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto f = mc::test_function_from_name(tok);
            if (!f) throw CLI::ValidationError("--f", "unknown test function " + tok);
            fs.push_back(*f);
        }
        if (fs.empty()) throw CLI::ValidationError("--f", "at least one test function required");
    }
    const auto ts = parse_list(ts_csv);
    bridge::BlockConfig block;
    block.T = T;
    block.dt = dt;
    reflection::ReflectionConfig refl;
    refl.dt = dt;
    refl.horizon = horizon;
    mc::McConfig cfg;
    cfg.trials = trials;
    cfg.master_seed = g.seed;
    cfg.threads = g.threads;
    Eigen::ArrayXd tail_ts = to_array(ts);
    const auto exp = mc::full_su2_experiment(rho0, dz0, block, refl, max_blocks, tail_ts,
                                             to_array(ts), fs, cfg, false);
    const auto rep = mc::gradient_demo(exp, fs);

    const fs::path dir = resolve_out_dir(g);
    fs::create_directories(dir);
    json config{{"rho0", rho0}, {"dz0", dz0},       {"f", f_csv},
                {"ts", ts_csv}, {"T", T},           {"dt", dt},
                {"horizon", horizon}, {"trials", trials}, {"max-blocks", max_blocks},
                {"seed", g.seed}, {"threads", g.threads}};
    report::RunManifest manifest("gradient", config);
    json out = rep;
    out["config"] = config;
    report::write_json(dir / "gradient_report.json", out);
    manifest.add_output(dir / "gradient_report.json");

    std::ostringstream csv;
    csv << "f,t,abs_mean_diff,p_hat,bound,pass\n";
    for (const auto& row : rep["rows"]) {
        csv << row["f"].get<std::string>() << ',' << row["t"].get<double>() << ','
            << row["abs_mean_diff"].get<double>() << ',' << row["p_hat"].get<double>() << ','
            << row["bound"].get<double>() << ',' << (row["pass"].get<bool>() ? 1 : 0) << '\n';
    }
    report::write_text_atomic(dir / "gradient_table.csv", csv.str());
    manifest.add_output(dir / "gradient_table.csv");
    return finish(manifest, dir, "gradient", rep["pass"].get<bool>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"couplings of subelliptic Brownian motions on SU(2), SL(2,R) and the "
                 "Heisenberg group: simulation, verification suites and tail estimation"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out", g.out_dir, "output directory (default: $SUBRIEM_OUT_DIR or .)");
    app.add_option("--seed", g.seed, "master seed for all per-trial streams");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_option("--config", g.config_path,
                   "JSON config or a previous run manifest; flags override");

    // simulate
    auto* sim = app.add_subcommand("simulate", "write one sample path as CSV");
    int sim_k = 1;
    double sim_phi0 = kPi / 2, sim_theta0 = 0.0, sim_z0 = 0.0, sim_T = 1.0, sim_dt = 1e-3;
    sim->add_option("--k", sim_k, "curvature (-1, 0, 1)")->check(CLI::IsMember({-1, 0, 1}));
    sim->add_option("--phi0", sim_phi0, "initial radial coordinate");
    sim->add_option("--theta0", sim_theta0, "initial angle");
    sim->add_option("--z0", sim_z0, "initial fiber coordinate");
    sim->add_option("--T", sim_T, "horizon");
    sim->add_option("--dt", sim_dt, "step size");

    // verify
    auto* verify = app.add_subcommand("verify", "closed-form verification suites");
    verify->require_subcommand(1);
    long v_trials = 100000;
    double v_dtw = 1e-4, v_phi0 = kPi / 2;
    int v_k = 1;
    long v_pairs = 1000;
    std::string v_detection = "bridge", v_T = "0.05,0.02,0.01";
    auto* v_exit = verify->add_subcommand("exit", "exit-time closed forms (first-passage toolbox)");
    v_exit->add_option("--trials", v_trials, "Monte Carlo trials");
    v_exit->add_option("--dt-w", v_dtw, "walk step");
    v_exit->add_option("--detection", v_detection, "grid|bridge crossing detection")
        ->check(CLI::IsMember({"grid", "bridge"}));
    auto* v_kt = verify->add_subcommand("kt", "small-T law of the K functional");
    v_kt->add_option("--T", v_T, "comma-separated block lengths");
    v_kt->add_option("--k", v_k, "curvature")->check(CLI::IsMember({-1, 0, 1}));
    v_kt->add_option("--phi0", v_phi0, "radial start");
    v_kt->add_option("--trials", v_trials, "Monte Carlo trials");
    auto* v_geo = verify->add_subcommand("geometry", "frame-change identities");
    v_geo->add_option("--trials", v_trials, "random frame/triple trials");
    v_geo->add_option("--pair-trials", v_pairs, "matched-endpoint path pairs");

    // couple
    auto* couple = app.add_subcommand("couple", "coupling tail experiments");
    couple->require_subcommand(1);
    int c_k = 1, c_max_blocks = 50;
    double c_dz0 = kPi, c_T = 2.0, c_dt = 1e-3, c_rho0 = 1.0, c_zeta0 = 0.0, c_horizon = 100.0;
    double c_delta = 0.4;
    long c_trials = 10000;
    bool c_records = true;
    auto* c_bridge = couple->add_subcommand("bridge", "fiber coupling from a same-surface start");
    c_bridge->add_option("--k", c_k, "curvature")->check(CLI::IsMember({-1, 0, 1}));
    c_bridge->add_option("--dz0", c_dz0, "initial fiber gap in (0, 4pi)");
    c_bridge->add_option("--T", c_T, "block length");
    c_bridge->add_option("--dt", c_dt, "SDE step");
    c_bridge->add_option("--trials", c_trials, "runs");
    c_bridge->add_option("--max-blocks", c_max_blocks, "censoring cap");
    c_bridge->add_flag("--records,!--no-records", c_records, "emit per-trial records");
    auto* c_reflect = couple->add_subcommand("reflect", "reflection coupling on the sphere");
    c_reflect->add_option("--k", c_k, "curvature (must be 1)");
    c_reflect->add_option("--rho0", c_rho0, "initial surface distance in (0, pi)");
    c_reflect->add_option("--zeta0", c_zeta0, "initial fiber gap");
    c_reflect->add_option("--dt", c_dt, "step");
    c_reflect->add_option("--horizon", c_horizon, "censoring horizon");
    c_reflect->add_option("--trials", c_trials, "runs");
    c_reflect->add_option("--delta", c_delta, "tail bound exponent, in (0, 1/2)");
    c_reflect->add_flag("--records,!--no-records", c_records, "emit per-trial records");
    auto* c_full = couple->add_subcommand("full", "reflection followed by the fiber coupling");
    c_full->add_option("--rho0", c_rho0, "initial surface distance");
    c_full->add_option("--zeta0", c_zeta0, "initial fiber gap in (-2pi, 2pi]");
    c_full->add_option("--T", c_T, "block length");
    c_full->add_option("--dt", c_dt, "step");
    c_full->add_option("--horizon", c_horizon, "reflection-phase horizon");
    c_full->add_option("--trials", c_trials, "runs");
    c_full->add_option("--max-blocks", c_max_blocks, "fiber-phase censoring cap");
    c_full->add_flag("--records,!--no-records", c_records, "emit per-trial records");

    // gradient
    auto* grad = app.add_subcommand("gradient", "semigroup difference vs coupling tail");
    double g_rho0 = 1.0, g_dz0 = kPi, g_T = 2.0, g_dt = 1e-3, g_horizon = 200.0;
    long g_trials = 10000;
    int g_max_blocks = 100;
    std::string g_f = "f1,f2,f3", g_ts = "1,2,5,10,15,20,30,40";
    grad->add_option("--rho0", g_rho0, "initial surface distance");
    grad->add_option("--dz0", g_dz0, "initial fiber gap");
    grad->add_option("--f", g_f, "test functions, subset of f1,f2,f3");
    grad->add_option("--ts", g_ts, "comma-separated evaluation times");
    grad->add_option("--T", g_T, "block length");
    grad->add_option("--dt", g_dt, "step");
    grad->add_option("--horizon", g_horizon, "total horizon");
    grad->add_option("--trials", g_trials, "runs");
    grad->add_option("--max-blocks", g_max_blocks, "fiber-phase cap");

    // global options may appear after the subcommand
    for (CLI::App* sub : app.get_subcommands(nullptr)) {
        sub->fallthrough();
        for (CLI::App* subsub : sub->get_subcommands(nullptr)) subsub->fallthrough();
    }

    try {
        // pre-scan for --config so file values can back unset flags
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") g.config_path = argv[i + 1];
        }
        json file_cfg;
        if (!g.config_path.empty()) file_cfg = load_config_file(g.config_path);

        app.parse(argc, argv);

        if (!file_cfg.empty()) {
            apply_config(app, file_cfg);
            for (CLI::App* sub : app.get_subcommands()) {
                apply_config(*sub, file_cfg);
                for (CLI::App* subsub : sub->get_subcommands()) apply_config(*subsub, file_cfg);
            }
        }

        if (sim->parsed()) return cmd_simulate(g, sim_k, sim_phi0, sim_theta0, sim_z0, sim_T, sim_dt);
        if (verify->parsed()) {
            const std::string which = v_exit->parsed() ? "exit" : v_kt->parsed() ? "kt" : "geometry";
            return cmd_verify(g, which, v_trials, v_dtw, v_detection, v_T, v_k, v_phi0, v_pairs);
        }
        if (couple->parsed()) {
            if (c_bridge->parsed())
                return cmd_couple_bridge(g, c_k, c_dz0, c_T, c_dt, c_trials, c_max_blocks, c_records);
            if (c_reflect->parsed())
                return cmd_couple_reflect(g, c_k, c_rho0, c_zeta0, c_dt, c_horizon, c_trials,
                                          c_delta, c_records);
            return cmd_couple_full(g, c_rho0, c_zeta0, c_T, c_dt, c_horizon, c_trials,
                                   c_max_blocks, c_records);
        }
        if (grad->parsed())
            return cmd_gradient(g, g_rho0, g_dz0, g_f, g_ts, g_T, g_dt, g_horizon, g_trials,
                                g_max_blocks);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
