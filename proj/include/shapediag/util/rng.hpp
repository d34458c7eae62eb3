#ifndef SHAPEDIAG_UTIL_RNG_HPP
#define SHAPEDIAG_UTIL_RNG_HPP

#include <cstdint>
#include <cmath>

namespace shapediag {

// splitmix64-based generator. Hand-rolled so that streams are identical
// across standard libraries and so that (seed, index) substreams are cheap.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // substream for sample `index` of a seeded run
    static Rng substream(uint64_t seed, uint64_t index) {
        Rng r(seed);
        r.state_ ^= 0x9e3779b97f4a7c15ull * (index + 1);
        r.next_u64();
        r.next_u64();
        return r;
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [lo, hi] inclusive
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    // Box-Muller; one value per call, cached partner
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace shapediag

#endif
