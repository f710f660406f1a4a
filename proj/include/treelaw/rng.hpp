#pragma once

/**
 * Deterministic random streams.
 *
 * mt19937_64 gives a standard-specified, portable raw sequence; the uniform
 * and normal transforms are written out here (rather than taken from
 * <random>'s distributions) because the standard leaves distribution
 * algorithms implementation-defined and the determinism contract is
 * "same seed, same bytes" across toolchains.
 *
 * Independent sub-streams (per replica, per particle batch) are derived from
 * (master seed, stream index) through splitmix64 so that no two streams share
 * their seeding path.
 */

#include <cstdint>
#include <cmath>
#include <random>

namespace treelaw {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(mix_seed(seed, 0)) {}

    /// Independent stream derived from (master, index).
    static Rng stream(std::uint64_t master, std::uint64_t index) {
        Rng r(0);
        r.eng_.seed(mix_seed(master, index));
        return r;
    }

    std::uint64_t raw() { return eng_(); }

    /// Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (pair cached; fixed draw count per pair).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

  private:
    static std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
        std::uint64_t s = master ^ (0xA5A5A5A55A5A5A5Aull + index * 0xD1B54A32D192ED03ull);
        std::uint64_t a = splitmix64(s);
        std::uint64_t b = splitmix64(s);
        return a ^ (b << 1);
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace treelaw
