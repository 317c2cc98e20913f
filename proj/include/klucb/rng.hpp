#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace klucb {

// splitmix64 step; used both as a stream mixer and to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic seed derivation: replication streams are a pure function of
// (seed, a, b), never of scheduling order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    std::uint64_t z = splitmix64(s);
    s ^= z + a;
    z = splitmix64(s);
    s ^= z + b;
    return splitmix64(s);
}

// mt19937_64 with explicit, platform-independent distributions.  The std::
// distribution objects are implementation defined, so uniform and normal
// draws are generated by hand to keep trajectories bit-identical everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Sample an index from a cumulative distribution table (last entry ~1).
    std::size_t from_cdf(const std::vector<double>& cdf) {
        const double u = uniform01();
        if (cdf.size() > 16) {
            std::size_t lo = 0, hi = cdf.size() - 1;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (cdf[mid] <= u) lo = mid + 1; else hi = mid;
            }
            return lo;
        }
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
            if (u < cdf[i]) return i;
        return cdf.size() - 1;
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace klucb
