#include "subriem/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

namespace subriem::mc {

TailCurve tail_from_taus(const std::vector<std::optional<double>>& taus, const Eigen::ArrayXd& ts) {
    for (Eigen::Index i = 1; i < ts.size(); ++i) {
        if (!(ts[i] > ts[i - 1])) throw std::invalid_argument("tail grid must be increasing");
    }
    TailCurve curve;
    curve.ts = ts;
    curve.trials = static_cast<long>(taus.size());
    curve.p_hat.resize(ts.size());
    curve.ci_lower.resize(ts.size());
    curve.ci_upper.resize(ts.size());
    for (const auto& tau : taus) {
        if (!tau) ++curve.n_censored;
    }
    for (Eigen::Index j = 0; j < ts.size(); ++j) {
        long count = 0;
        for (const auto& tau : taus) {
            if (!tau || *tau > ts[j]) ++count;  // censored counts as tau > t
        }
        curve.p_hat[j] = static_cast<double>(count) / curve.trials;
        const auto iv = stats::wilson_interval(count, curve.trials);
        curve.ci_lower[j] = iv.lower;
        curve.ci_upper[j] = iv.upper;
    }
    return curve;
}

TailCurve estimate_tail(const TailSampler& sampler, const Eigen::ArrayXd& ts, const McConfig& cfg,
                        const std::string& tag) {
    if (cfg.trials < 1) throw std::invalid_argument("estimate_tail: trials >= 1 required");
    auto taus = parallel_map<std::optional<double>>(
        cfg.trials, cfg.resolved_threads(), [&](long trial) -> std::optional<double> {
            Rng rng = Rng::for_trial(cfg.master_seed, tag, static_cast<uint64_t>(trial));
            return sampler(trial, rng);
        });
    return tail_from_taus(taus, ts);
}

RateFit fit_exponential_rate(const TailCurve& curve, long window_lo, long window_hi) {
    if (window_hi < 0) window_hi = curve.ts.size() - 1;
    window_lo = std::max<long>(0, window_lo);
    window_hi = std::min<long>(window_hi, curve.ts.size() - 1);
    const double floor = 5.0 / curve.trials;
    std::vector<double> xs, ys;
    for (long j = window_lo; j <= window_hi; ++j) {
        if (curve.p_hat[j] > floor) {
            xs.push_back(curve.ts[j]);
            ys.push_back(std::log(curve.p_hat[j]));
        }
    }
    RateFit fit;
    fit.n_points = static_cast<long>(xs.size());
    if (fit.n_points < 2) return fit;
    const auto lf = stats::least_squares(
        Eigen::Map<Eigen::ArrayXd>(xs.data(), xs.size()),
        Eigen::Map<Eigen::ArrayXd>(ys.data(), ys.size()));
    fit.c_hat = -lf.slope;
    fit.C_hat = std::exp(lf.intercept);
    fit.r_squared = lf.r_squared;
    return fit;
}

}  // namespace subriem::mc
