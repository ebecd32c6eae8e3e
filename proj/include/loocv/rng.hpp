#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

namespace loocv {

// splitmix64 step; also used as the seed/substream mixing function. The mix
// is fixed so that identical (base_seed, path...) always yields the same
// stream, independent of thread count or platform.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
    std::uint64_t m = splitmix64(s);
    s ^= b;
    return m ^ splitmix64(s);
}

// Purpose tags for substream derivation (see harness docs).
enum class StreamTag : std::uint64_t {
    sample = 1,
    oracle = 2,
    z_samples = 3,
    probe = 4,
    delta3 = 5,
    restriction = 6,
    claims = 7,
};

// xoshiro256++ with hand-rolled uniform/normal transforms. std::mt19937_64
// would also be deterministic, but the distributions in <random> are not
// specified bit-exactly across standard libraries; these are.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Derive a child stream from a base seed and a path of indices/tags,
// e.g. substream(base, {n, rep, tag}).
inline Rng substream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base_seed;
    for (std::uint64_t p : path) s = mix_seed(s, p);
    return Rng(s);
}

}  // namespace loocv
