#include "subriem/bridge.hpp"

#include <cmath>
#include <stdexcept>

#include "subriem/geometry.hpp"

namespace subriem::bridge {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;
}  // namespace

long BlockConfig::steps() const {
    const double n = T / dt;
    const long rounded = static_cast<long>(std::llround(n));
    if (rounded < 2 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
        throw std::invalid_argument("BlockConfig: T must be an integer multiple of dt (>= 2 steps)");
    }
    return rounded;
}

sde::SdeConfig BlockConfig::sde_config() const {
    sde::SdeConfig c;
    c.k = k;
    c.dt = dt;
    c.phi_floor = phi_floor;
    c.phi_ceiling_margin = phi_ceiling_margin;
    return c;
}

void BlockConfig::validate() const {
    steps();
    sde_config().validate(phi0);
    if (dt_w <= 0.0) throw std::invalid_argument("BlockConfig: dt_w > 0 required");
}

std::pair<Eigen::ArrayXd, double> compute_K(const sde::RadialPath& radial) {
    const Eigen::Index n = radial.steps();
    const double S = radial.sigma_T();
    Eigen::ArrayXd K(n + 1);
    K[0] = 0.0;
    const double scale = (2.0 / kPi) * std::sqrt(2.0 * S);
    double sin_prev = 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sin_next = i + 1 == n ? 0.0 : std::sin(kPi * radial.sigma[i + 1] / S);
        acc += sector_density_k(radial.k, radial.phi[i]) * (sin_next - sin_prev);
        K[i + 1] = scale * acc;
        sin_prev = sin_next;
    }
    return {K, K[n]};
}

Eigen::ArrayXd sample_bridge(const Eigen::ArrayXd& sigma_grid, Rng& rng) {
    const Eigen::Index n = sigma_grid.size();
    if (n < 2 || sigma_grid[0] != 0.0) {
        throw std::invalid_argument("sample_bridge: grid must start at 0 with >= 2 points");
    }
    const double S = sigma_grid[n - 1];
    Eigen::ArrayXd b(n);
    b[0] = 0.0;
    b[n - 1] = 0.0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double s = sigma_grid[i - 1], u = sigma_grid[i];
        if (!(u > s)) throw std::invalid_argument("sample_bridge: grid must be strictly increasing");
        const double mean = b[i - 1] * (S - u) / (S - s);
        const double var = (u - s) * (S - u) / (S - s);
        b[i] = mean + std::sqrt(var) * rng.gaussian();
    }
    return b;
}

Eigen::ArrayXd first_mode_shape(const Eigen::ArrayXd& sigma_grid) {
    const Eigen::Index n = sigma_grid.size();
    const double S = sigma_grid[n - 1];
    const double amp = std::sqrt(S) * std::sqrt(2.0) / kPi;
    Eigen::ArrayXd mode(n);
    for (Eigen::Index i = 0; i < n; ++i) mode[i] = amp * std::sin(kPi * sigma_grid[i] / S);
    mode[n - 1] = 0.0;  // sin(pi) exactly
    return mode;
}

double kl_first_coefficient(const Eigen::ArrayXd& b, const Eigen::ArrayXd& sigma_grid) {
    const Eigen::Index n = sigma_grid.size();
    if (b.size() != n || n < 2) throw std::invalid_argument("kl_first_coefficient: size mismatch");
    const double S = sigma_grid[n - 1];
    const double norm = std::sqrt(2.0 / S);
    double acc = 0.0;
    double prev = 0.0;  // b[0] * sin(0)
    for (Eigen::Index i = 1; i < n; ++i) {
        const double cur = b[i] * norm * std::sin(kPi * sigma_grid[i] / S);
        acc += 0.5 * (prev + cur) * (sigma_grid[i] - sigma_grid[i - 1]);
        prev = cur;
    }
    return acc * kPi / S;
}

BlockResult run_block(const BlockConfig& cfg, double delta_z_in, Rng& rng,
                      const WalkSupplier& walk_supplier) {
    cfg.validate();
    if (!(delta_z_in > 0.0 && delta_z_in < kFourPi)) {
        throw std::invalid_argument("run_block: delta_z_in in (0, 4pi) required");
    }

    // Draw order per block: radial increments, bridge, endpoint Gaussian, walk.
    const sde::RadialPath radial = sde::simulate_radial(cfg.sde_config(), cfg.phi0, cfg.T, rng);
    auto [K_grid, K_T] = compute_K(radial);
    const double S = radial.sigma_T();

    const Eigen::ArrayXd raw = sample_bridge(radial.sigma, rng);
    const Eigen::ArrayXd mode = first_mode_shape(radial.sigma);
    const double z1_raw = kl_first_coefficient(raw, radial.sigma);
    const double G = std::sqrt(S) * rng.gaussian();

    BlockResult res;
    res.K_T = K_T;
    res.sigma_T = S;
    res.delta_z_in = delta_z_in;
    res.clamp_events = radial.diag.clamp_events;

    onedim::ExitInterval iv;
    if (std::abs(K_T) < cfg.kappa()) {
        res.degenerate_K = true;
        iv = onedim::ExitInterval::infinite();
    } else {
        const double e0 = -delta_z_in / K_T;
        const double e1 = (kFourPi - delta_z_in) / K_T;
        iv = {std::min(e0, e1), std::max(e0, e1)};
    }

    const onedim::WalkPath walk =
        walk_supplier ? walk_supplier(iv) : onedim::sample_walk_with_exit(iv, 1.0, cfg.dt_w, rng);
    const onedim::WalkPath walk_p = onedim::reflect_at_exit(walk);

    res.Z1 = walk.final_value();
    res.Z1_prime = walk_p.final_value();
    res.varsigma = walk.exit_time();
    res.success = res.varsigma.has_value();
    if (!res.degenerate_K) {
        const double symmetric = kFourPi / std::abs(K_T);
        res.symmetric_exit_by_one = walk.values.abs().maxCoeff() > symmetric;
    }

    // Bridge surgery: project the first mode out of the sampled bridge and
    // re-insert the coupled coefficients W_1 and W'_1.
    const Eigen::Index n = radial.steps();
    Eigen::ArrayXd theta(n + 1), theta_p(n + 1), z(n + 1), z_p(n + 1);
    z[0] = delta_z_in;
    z_p[0] = 0.0;
    double beta_prev = 0.0, beta_p_prev = 0.0;
    theta[0] = cfg.theta0;
    theta_p[0] = cfg.theta0;
    for (Eigen::Index i = 1; i <= n; ++i) {
        const double residual = raw[i] - z1_raw * mode[i];
        const double drift_part = radial.sigma[i] / S * G;
        const double beta = residual + res.Z1 * mode[i] + drift_part;
        const double beta_p = residual + res.Z1_prime * mode[i] + drift_part;
        theta[i] = cfg.theta0 + beta;
        theta_p[i] = cfg.theta0 + beta_p;
        const double c = sector_density_k(cfg.k, radial.phi[i - 1]);
        z[i] = z[i - 1] + c * (beta - beta_prev);
        z_p[i] = z_p[i - 1] + c * (beta_p - beta_p_prev);
        beta_prev = beta;
        beta_p_prev = beta_p;
    }
    res.z_diff_direct = z[n] - z_p[n];

    const double w_capped = walk.value_at_capped(1.0);  // W_{1 ^ varsigma}
    res.delta_z_out = geo::wrap_to_0_4pi(delta_z_in + K_T * w_capped);
    if (!res.success && res.delta_z_out == 0.0) {
        throw std::logic_error("run_block: failed block produced a zero gap");
    }

    if (cfg.keep_paths) {
        auto paths = std::make_shared<BlockPaths>();
        paths->radial = radial;
        paths->K_grid = std::move(K_grid);
        paths->theta = std::move(theta);
        paths->theta_p = std::move(theta_p);
        paths->z = std::move(z);
        paths->z_p = std::move(z_p);
        paths->walk = walk;
        paths->walk_reflected = walk_p;
        paths->endpoint_gaussian = G;
        res.paths = std::move(paths);
    }
    return res;
}

CouplingRun run_until_coupled(const BlockConfig& cfg, double delta_z0, int max_blocks, Rng& rng,
                              bool stop_on_success, const WalkSupplier& walk_supplier) {
    if (max_blocks < 1) throw std::invalid_argument("run_until_coupled: max_blocks >= 1 required");
    CouplingRun run;
    run.blocks.reserve(std::min(max_blocks, 64));
    double dz = delta_z0;
    for (int j = 0; j < max_blocks; ++j) {
        BlockResult block = run_block(cfg, dz, rng, walk_supplier);
        dz = block.delta_z_out;
        const bool success = block.success;
        run.blocks.push_back(std::move(block));
        if (success && !run.tau) run.tau = (j + 1) * cfg.T;
        if (success && stop_on_success) break;
        if (dz == 0.0) dz = kFourPi * 0.5;  // unreachable on failure; guards the trace mode
    }
    run.censored = !run.tau.has_value();
    return run;
}

MartingaleTrace martingale_trace(double delta_z0, const CouplingRun& run, double T) {
    const Eigen::Index m = static_cast<Eigen::Index>(run.blocks.size());
    MartingaleTrace tr;
    tr.t.resize(m + 1);
    tr.M.resize(m + 1);
    tr.S.resize(m + 1);
    tr.t[0] = 0.0;
    tr.M[0] = delta_z0;
    tr.S[0] = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const BlockResult& b = run.blocks[j];
        tr.t[j + 1] = (j + 1) * T;
        tr.M[j + 1] = tr.M[j] + b.K_T * b.Z1;
        tr.S[j + 1] = tr.S[j] + b.K_T * b.K_T;
    }
    return tr;
}

}  // namespace subriem::bridge
