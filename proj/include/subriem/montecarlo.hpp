#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "subriem/rng.hpp"
#include "subriem/stats.hpp"

namespace subriem::mc {

struct McConfig {
    long trials = 10000;
    uint64_t master_seed = 20240901;
    int threads = 0;  // 0 = hardware concurrency
    double horizon = 50.0;

    int resolved_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
};

// Runs fn(trial) for trial = 0..n-1 on `threads` workers and returns the
// results indexed by trial. Work is handed out through an atomic counter, so
// the schedule varies but the result vector does not: every aggregation done
// in index order afterwards is bit-identical for any thread count.
template <class T, class Fn>
std::vector<T> parallel_map(long n, int threads, Fn&& fn) {
    std::vector<T> results(static_cast<size_t>(n));
    if (n == 0) return results;
    threads = std::max(1, threads);
    threads = static_cast<int>(std::min<long>(threads, n));
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) results[static_cast<size_t>(i)] = fn(i);
        return results;
    }
    std::atomic<long> next{0};
    constexpr long chunk = 16;
    auto worker = [&]() {
        for (;;) {
            const long start = next.fetch_add(chunk);
            if (start >= n) return;
            const long end = std::min(n, start + chunk);
            for (long i = start; i < end; ++i) results[static_cast<size_t>(i)] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

struct RateFit {
    double c_hat = 0.0;  // decay rate, P(tau > t) ~ C exp(-c t)
    double C_hat = 1.0;
    double r_squared = 1.0;
    long n_points = 0;
};

// Monte Carlo estimate of t -> P(tau > t) with Wilson 95% intervals. Censored
// trials (no coupling before the horizon) count as tau > t for every t.
struct TailCurve {
    Eigen::ArrayXd ts;
    Eigen::ArrayXd p_hat;
    Eigen::ArrayXd ci_lower;
    Eigen::ArrayXd ci_upper;
    long trials = 0;
    long n_censored = 0;
    std::optional<RateFit> fitted_rate;
};

// sampler(trial, rng) returns the coupling time, or nullopt when censored.
using TailSampler = std::function<std::optional<double>(long, Rng&)>;

TailCurve estimate_tail(const TailSampler& sampler, const Eigen::ArrayXd& ts, const McConfig& cfg,
                        const std::string& tag);

TailCurve tail_from_taus(const std::vector<std::optional<double>>& taus, const Eigen::ArrayXd& ts);

// Least squares on log p_hat over grid points inside [window_lo, window_hi]
// (indices), keeping only points with p_hat > 5/trials.
RateFit fit_exponential_rate(const TailCurve& curve, long window_lo = 0, long window_hi = -1);

using stats::KsResult;
using stats::ks_test_standard_normal;

}  // namespace subriem::mc
