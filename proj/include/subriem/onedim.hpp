#pragma once

#include <Eigen/Dense>
#include <optional>

#include "subriem/rng.hpp"

namespace subriem::onedim {

// Exit interval (a, b) with a < 0 < b. The infinite sentinel encodes the
// degenerate K(T) = 0 coupling block, whose walk never exits.
struct ExitInterval {
    double a = -1.0;
    double b = 1.0;

    static ExitInterval infinite();
    bool is_infinite() const;
    void validate() const;
};

// min(|a|/sqrt(2 pi t), 1). Upper bound for P(D_a > t) as stated in the source
// material; the sharp constant is 2|a|/sqrt(2 pi t) (see sharp_hitting_tail_bound
// and the acceptance notes).
double hitting_tail_bound(double a, double t);
double sharp_hitting_tail_bound(double a, double t);

// Density |a|/sqrt(2 pi u^3) exp(-a^2/(2u)) of the first hitting time of a.
double hitting_density(double a, double u);

// E[H_{a,b}] = -ab.
double exit_mean(const ExitInterval& iv);

// P(exit through b) = -a/(b-a).
double exit_hits_upper_prob(const ExitInterval& iv);

// E[exp(-delta H)] = cosh(sqrt(delta/2)(a+b)) / cosh(sqrt(delta/2)(b-a)).
double exit_mgf_neg(const ExitInterval& iv, double delta);

// E[exp(+delta H)] = cos(sqrt(delta/2)(a+b)) / cos(sqrt(delta/2)(b-a));
// throws std::domain_error when sqrt(delta/2)(b-a) >= pi/2.
double exit_mgf_pos(const ExitInterval& iv, double delta);

// Upper bound -ab / cos^2(sqrt(delta/2)(b-a)) for E[H exp(delta H)];
// same domain restriction as exit_mgf_pos.
double exit_weighted_bound(const ExitInterval& iv, double delta);

enum class ExitSide { lower, upper };

// Grid walk W_0 = 0, W_{i+1} = W_i + N(0, dt_w). Exit is the first grid index
// outside the open interval; the walk always continues to the horizon because
// the post-exit values feed the reflection construction.
struct WalkPath {
    double dt_w = 1e-4;
    Eigen::ArrayXd values;  // m+1 values, values[0] = 0
    std::optional<Eigen::Index> exit_index;
    std::optional<ExitSide> exit_side;

    std::optional<double> exit_time() const {
        if (!exit_index) return std::nullopt;
        return *exit_index * dt_w;
    }
    double final_value() const { return values[values.size() - 1]; }
    // value at min(t, exit time) on the grid
    double value_at_capped(double t) const;
};

WalkPath sample_walk_with_exit(const ExitInterval& iv, double horizon, double dt_w, Rng& rng);
// Deterministic variant driven by explicit increments.
WalkPath make_walk(const ExitInterval& iv, double dt_w, const Eigen::ArrayXd& increments);

// Mirror construction: W'_t = -W_t up to the exit, W_t - 2 W_exit afterwards.
// Applied twice it returns the original path exactly.
WalkPath reflect_at_exit(const WalkPath& w);

// Streaming first-exit / first-hit samplers (no path storage). `bridge`
// additionally samples the Brownian-bridge crossing probability between grid
// points, which removes the O(sqrt(dt_w)) late-detection bias of grid
// monitoring.
enum class CrossingDetection { grid, bridge };

struct ExitSample {
    double time = 0.0;
    ExitSide side = ExitSide::lower;
};

std::optional<ExitSample> sample_exit_time(const ExitInterval& iv, double horizon, double dt_w,
                                           Rng& rng, CrossingDetection detect = CrossingDetection::grid);

std::optional<double> sample_hit_time(double a, double horizon, double dt_w, Rng& rng,
                                      CrossingDetection detect = CrossingDetection::grid);

}  // namespace subriem::onedim
