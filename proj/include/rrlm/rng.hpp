#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rrlm {

// SplitMix64 step. Deterministic across platforms, unlike std distributions.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of up to three words; used for counter-based streams
// (dropout masks, per-step batch composition) so any forward pass is
// replayable from (seed, counters) alone.
inline uint64_t mix64(uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = a;
    uint64_t h = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= splitmix64(s);
    s ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= splitmix64(s);
    return h;
}

inline uint64_t hash_string(std::string_view s, uint64_t seed = 0) {
    // FNV-1a folded through splitmix for avalanche.
    uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    uint64_t st = h;
    return splitmix64(st);
}

// Converts 53 high bits to a double in [0, 1).
inline double u64_to_unit(uint64_t x) {
    return static_cast<double>(x >> 11) * (1.0 / 9007199254740992.0);
}

// Sequential deterministic generator with a Box-Muller normal.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    double uniform() { return u64_to_unit(next_u64()); }

    // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
    uint64_t uniform_int(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + spare_ * stddev;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return mean + radius * std::cos(angle) * stddev;
    }

    uint64_t state() const { return state_; }
    void set_state(uint64_t s) {
        state_ = s;
        has_spare_ = false;
    }

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Counter-based dropout source: mask bits depend only on (base, op index,
// element index), so identical forward passes draw identical masks.
struct DropoutStream {
    uint64_t base = 0;
    uint64_t next_op = 0;
    bool enabled = false;

    uint64_t take_op() { return next_op++; }

    static bool keep(uint64_t base, uint64_t op, uint64_t element, double rate) {
        return u64_to_unit(mix64(base, op, element)) >= rate;
    }
};

}  // namespace rrlm
