#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "subriem/curvature.hpp"
#include "subriem/onedim.hpp"
#include "subriem/rng.hpp"
#include "subriem/sde.hpp"

namespace subriem::bridge {

// One [0, T] coupling block. The radial path is shared by both processes; the
// angular parts are rebuilt from one Brownian bridge whose first mode carries
// the coupled pair (W_1, W'_1).
struct BlockConfig {
    Curvature k = Curvature::Spherical;
    double T = 2.0;
    double dt = 1e-3;  // SDE grid step; n = T/dt steps per block
    double phi0 = 1.5707963267948966;
    double theta0 = 1.0;
    double dt_w = 1e-4;      // auxiliary walk step, walk horizon is exactly 1
    double kappa_min = 0.0;  // |K(T)| degeneracy threshold; 0 means 1e-8 * T
    double phi_floor = 1e-4;
    double phi_ceiling_margin = 1e-4;
    bool keep_paths = false;

    double kappa() const { return kappa_min > 0.0 ? kappa_min : 1e-8 * T; }
    long steps() const;
    sde::SdeConfig sde_config() const;
    void validate() const;
};

// Retained per-block trajectories (keep_paths only).
struct BlockPaths {
    sde::RadialPath radial;
    Eigen::ArrayXd K_grid;
    Eigen::ArrayXd theta, theta_p;  // angle paths, unwrapped, n+1 points
    Eigen::ArrayXd z, z_p;          // fiber paths; z starts at delta_z_in, z' at 0
    onedim::WalkPath walk, walk_reflected;
    double endpoint_gaussian = 0.0;
};

struct BlockResult {
    double K_T = 0.0;
    double sigma_T = 0.0;
    std::optional<double> varsigma;  // walk exit time, present iff <= 1
    bool success = false;            // varsigma present
    // whether |W| left [-4pi/|K|, 4pi/|K|] by time 1: the symmetric exit
    // dominates every block interval, so its success probability is an
    // i.i.d. lower bound used by the geometric tail envelope
    bool symmetric_exit_by_one = false;
    bool degenerate_K = false;       // |K(T)| < kappa_min; block fails deterministically
    double delta_z_in = 0.0;
    double delta_z_out = 0.0;  // wrap of delta_z_in + K_T W_{1 ^ varsigma} into [0, 4pi)
    double z_diff_direct = 0.0;  // z_T - z'_T from direct path integration (pre-wrap)
    double Z1 = 0.0;             // W_1
    double Z1_prime = 0.0;       // W'_1
    long clamp_events = 0;
    std::shared_ptr<const BlockPaths> paths;
};

// K(t) on the SDE grid and K(T), integrating the sector-area density against
// d sin(pi sigma / sigma(T)). This quadrature makes the block identity
// z_T - z'_T = dz + K(T)(Z_1 - Z_1')/2 exact on the grid.
std::pair<Eigen::ArrayXd, double> compute_K(const sde::RadialPath& radial);

// Exact Brownian bridge on the (non-uniform) grid [0, S] by sequential
// conditional sampling; endpoints are exactly 0.
Eigen::ArrayXd sample_bridge(const Eigen::ArrayXd& sigma_grid, Rng& rng);

// First Karhunen-Loeve coefficient: (pi/S) int_0^S B_s sqrt(2/S) sin(pi s/S) ds
// by trapezoidal quadrature.
double kl_first_coefficient(const Eigen::ArrayXd& bridge, const Eigen::ArrayXd& sigma_grid);

// Shape of the first mode, sqrt(S) (sqrt(2)/pi) sin(pi sigma/S), with the end
// entry forced to exactly zero so both angle paths meet bit-exactly at T.
Eigen::ArrayXd first_mode_shape(const Eigen::ArrayXd& sigma_grid);

// Supplier for the auxiliary walk; tests inject deterministic walks here.
using WalkSupplier = std::function<onedim::WalkPath(const onedim::ExitInterval&)>;

// One coupling block. delta_z_in must lie in (0, 4pi).
BlockResult run_block(const BlockConfig& cfg, double delta_z_in, Rng& rng,
                      const WalkSupplier& walk_supplier = nullptr);

struct CouplingRun {
    std::vector<BlockResult> blocks;
    std::optional<double> tau;  // (index of first success + 1) * T
    bool censored = false;      // max_blocks exhausted without success
};

// Iterates blocks with the frame-reset convention: every block restarts the
// surface state at (phi0, theta0) and only the fiber gap (mod 4pi) is carried.
// With stop_on_success = false the blocks keep running on the residual gap,
// which the martingale diagnostics use.
CouplingRun run_until_coupled(const BlockConfig& cfg, double delta_z0, int max_blocks, Rng& rng,
                              bool stop_on_success = true,
                              const WalkSupplier& walk_supplier = nullptr);

struct MartingaleTrace {
    Eigen::ArrayXd t;  // block boundaries 0, T, 2T, ...
    Eigen::ArrayXd M;  // M_{t_j} = dz0 + sum_{i<j} K^i(T) W^i_1
    Eigen::ArrayXd S;  // S(t_j) = sum_{i<j} K^i(T)^2
};

MartingaleTrace martingale_trace(double delta_z0, const CouplingRun& run, double T);

}  // namespace subriem::bridge
