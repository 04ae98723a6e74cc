#ifndef MCSLAM_UTIL_RNG_HPP
#define MCSLAM_UTIL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace mcslam {

// Deterministic random stream. All randomness in the project goes through
// this wrapper so that a run is a pure function of its seeds: the uniform
// and Gaussian draws are implemented here instead of relying on
// implementation-defined std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1).
    double uniform() {
        return (next_u64() >> 11) * (1.0 / 9007199254740992.0);  // 2^53
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Zero-mean Gaussian via Box-Muller, one value per call.
    double gaussian(double sigma) {
        if (sigma == 0.0) {
            return 0.0;
        }
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) {
            u1 = 1.0 / 9007199254740992.0;
        }
        const double r = std::sqrt(-2.0 * std::log(u1));
        return sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double gaussian(double mean, double sigma) { return mean + gaussian(sigma); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent child seeds so that
// per-environment / per-particle / per-step streams never alias.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

}  // namespace mcslam

#endif  // MCSLAM_UTIL_RNG_HPP
