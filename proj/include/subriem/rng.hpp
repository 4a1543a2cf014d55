#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace subriem {

// xoshiro256++ with splitmix64 seeding. Streams are derived by hashing
// (master_seed, experiment tag, trial index), so trial i always sees the same
// numbers no matter which thread runs it or in which order.
class Rng {
public:
    explicit Rng(uint64_t seed) { seed_state(seed); }

    static uint64_t mix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static uint64_t hash_tag(std::string_view tag) {
        uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static Rng for_trial(uint64_t master_seed, std::string_view tag, uint64_t trial) {
        uint64_t u = mix(master_seed ^ hash_tag(tag));
        u = mix(u ^ (trial * 0x9e3779b97f4a7c15ULL));
        return Rng(u);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1], safe as a log() argument
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // standard normal, Marsaglia polar pair with one value cached
    double gaussian() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cache_ = v * f;
        have_cache_ = true;
        return u * f;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    void seed_state(uint64_t seed) {
        uint64_t u = seed;
        for (auto& s : s_) s = (u = mix(u));
    }

    uint64_t s_[4];
    double cache_ = 0.0;
    bool have_cache_ = false;
};

}  // namespace subriem
