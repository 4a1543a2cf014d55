#include "subriem/onedim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subriem::onedim {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kHalfPi = 1.57079632679489661923;
}  // namespace

ExitInterval ExitInterval::infinite() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
}

bool ExitInterval::is_infinite() const { return std::isinf(a) || std::isinf(b); }

void ExitInterval::validate() const {
    if (!(a < 0.0 && b > 0.0)) throw std::invalid_argument("ExitInterval: a < 0 < b required");
}

double hitting_tail_bound(double a, double t) {
    if (t <= 0.0) throw std::domain_error("hitting_tail_bound: t > 0 required");
    return std::min(1.0, std::abs(a) / std::sqrt(kTwoPi * t));
}

double sharp_hitting_tail_bound(double a, double t) {
    if (t <= 0.0) throw std::domain_error("sharp_hitting_tail_bound: t > 0 required");
    return std::min(1.0, 2.0 * std::abs(a) / std::sqrt(kTwoPi * t));
}

double hitting_density(double a, double u) {
    if (a == 0.0) throw std::domain_error("hitting_density: a != 0 required");
    if (u <= 0.0) return 0.0;
    const double e = a * a / (2.0 * u);
    if (e > 700.0) return 0.0;  // essential zero at u -> 0+
    return std::abs(a) / std::sqrt(kTwoPi * u * u * u) * std::exp(-e);
}

double exit_mean(const ExitInterval& iv) {
    iv.validate();
    return -iv.a * iv.b;
}

double exit_hits_upper_prob(const ExitInterval& iv) {
    iv.validate();
    return -iv.a / (iv.b - iv.a);
}

double exit_mgf_neg(const ExitInterval& iv, double delta) {
    iv.validate();
    if (delta < 0.0) throw std::domain_error("exit_mgf_neg: delta >= 0 required");
    const double r = std::sqrt(0.5 * delta);
    return std::cosh(r * (iv.a + iv.b)) / std::cosh(r * (iv.b - iv.a));
}

double exit_mgf_pos(const ExitInterval& iv, double delta) {
    iv.validate();
    if (delta < 0.0) throw std::domain_error("exit_mgf_pos: delta >= 0 required");
    const double r = std::sqrt(0.5 * delta);
    if (r * (iv.b - iv.a) >= kHalfPi) {
        throw std::domain_error("exit_mgf_pos: sqrt(delta/2)(b-a) < pi/2 required");
    }
    return std::cos(r * (iv.a + iv.b)) / std::cos(r * (iv.b - iv.a));
}

double exit_weighted_bound(const ExitInterval& iv, double delta) {
    iv.validate();
    if (delta < 0.0) throw std::domain_error("exit_weighted_bound: delta >= 0 required");
    const double r = std::sqrt(0.5 * delta);
    if (r * (iv.b - iv.a) >= kHalfPi) {
        throw std::domain_error("exit_weighted_bound: sqrt(delta/2)(b-a) < pi/2 required");
    }
    const double c = std::cos(r * (iv.b - iv.a));
    return -iv.a * iv.b / (c * c);
}

double WalkPath::value_at_capped(double t) const {
    Eigen::Index idx = static_cast<Eigen::Index>(std::llround(t / dt_w));
    idx = std::min<Eigen::Index>(idx, values.size() - 1);
    if (exit_index) idx = std::min(idx, *exit_index);
    return values[idx];
}

namespace {

WalkPath finish_walk(const ExitInterval& iv, double dt_w, Eigen::ArrayXd values) {
    WalkPath w;
    w.dt_w = dt_w;
    w.values = std::move(values);
    if (!iv.is_infinite()) {
        for (Eigen::Index i = 0; i < w.values.size(); ++i) {
            if (w.values[i] < iv.a || w.values[i] > iv.b) {
                w.exit_index = i;
                w.exit_side = w.values[i] < iv.a ? ExitSide::lower : ExitSide::upper;
                break;
            }
        }
    }
    return w;
}

}  // namespace

WalkPath sample_walk_with_exit(const ExitInterval& iv, double horizon, double dt_w, Rng& rng) {
    if (!iv.is_infinite()) iv.validate();
    if (horizon <= 0.0 || dt_w <= 0.0) {
        throw std::invalid_argument("sample_walk_with_exit: horizon, dt_w > 0 required");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(std::llround(horizon / dt_w));
    const double sq = std::sqrt(dt_w);
    Eigen::ArrayXd values(m + 1);
    values[0] = 0.0;
    double x = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        x += sq * rng.gaussian();
        values[i + 1] = x;
    }
    return finish_walk(iv, dt_w, std::move(values));
}

WalkPath make_walk(const ExitInterval& iv, double dt_w, const Eigen::ArrayXd& increments) {
    Eigen::ArrayXd values(increments.size() + 1);
    values[0] = 0.0;
    for (Eigen::Index i = 0; i < increments.size(); ++i) values[i + 1] = values[i] + increments[i];
    return finish_walk(iv, dt_w, std::move(values));
}

WalkPath reflect_at_exit(const WalkPath& w) {
    WalkPath r = w;
    if (!w.exit_index) {
        r.values = -w.values;
        return r;
    }
    const Eigen::Index e = *w.exit_index;
    const double we = w.values[e];
    for (Eigen::Index i = 0; i < r.values.size(); ++i) {
        r.values[i] = i <= e ? -w.values[i] : w.values[i] - 2.0 * we;
    }
    // the reflected path exits the mirrored interval at the same index; exit
    // metadata is kept as-is since both paths share the stopping time
    return r;
}

namespace {

// Probability that a Brownian bridge from x0 to x1 over dt crosses the level c
// lying on one side of both endpoints.
inline double bridge_crossing_prob(double x0, double x1, double c, double dt) {
    const double d0 = c - x0, d1 = c - x1;
    if (d0 * d1 <= 0.0) return 1.0;
    const double e = 2.0 * d0 * d1 / dt;
    if (e > 30.0) return 0.0;  // below 1e-13, not worth the exp
    return std::exp(-e);
}

}  // namespace

std::optional<ExitSample> sample_exit_time(const ExitInterval& iv, double horizon, double dt_w,
                                           Rng& rng, CrossingDetection detect) {
    if (!iv.is_infinite()) iv.validate();
    const long m = static_cast<long>(std::llround(horizon / dt_w));
    const double sq = std::sqrt(dt_w);
    double x = 0.0;
    for (long i = 0; i < m; ++i) {
        const double next = x + sq * rng.gaussian();
        if (!iv.is_infinite()) {
            if (next < iv.a) return ExitSample{(i + 1) * dt_w, ExitSide::lower};
            if (next > iv.b) return ExitSample{(i + 1) * dt_w, ExitSide::upper};
            if (detect == CrossingDetection::bridge) {
                const double pa = bridge_crossing_prob(x, next, iv.a, dt_w);
                const double pb = bridge_crossing_prob(x, next, iv.b, dt_w);
                if (pa + pb > 0.0) {
                    const double u = rng.uniform();
                    if (u < pa) return ExitSample{(i + 0.5) * dt_w, ExitSide::lower};
                    if (u < pa + pb) return ExitSample{(i + 0.5) * dt_w, ExitSide::upper};
                }
            }
        }
        x = next;
    }
    return std::nullopt;
}

std::optional<double> sample_hit_time(double a, double horizon, double dt_w, Rng& rng,
                                      CrossingDetection detect) {
    if (a == 0.0) return 0.0;
    const long m = static_cast<long>(std::llround(horizon / dt_w));
    const double sq = std::sqrt(dt_w);
    const double lvl = a;
    double x = 0.0;
    const bool up = a > 0.0;
    for (long i = 0; i < m; ++i) {
        const double next = x + sq * rng.gaussian();
        if (up ? next > lvl : next < lvl) return (i + 1) * dt_w;
        if (detect == CrossingDetection::bridge) {
            const double p = bridge_crossing_prob(x, next, lvl, dt_w);
            if (p > 0.0 && rng.uniform() < p) return (i + 0.5) * dt_w;
        }
        x = next;
    }
    return std::nullopt;
}

}  // namespace subriem::onedim
