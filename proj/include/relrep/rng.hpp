// Deterministic random streams. All randomness in the library flows through
// Rng so that results depend only on the 64-bit seeds recorded in configs,
// not on platform distribution implementations.
#ifndef RELREP_RNG_HPP
#define RELREP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace relrep {

// splitmix64 step, used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent substream seed from a base seed and a path of
// stream identifiers. Same inputs give the same seed on every platform.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = base;
    std::uint64_t out = splitmix64(s);
    for (std::uint64_t word : path) {
        s ^= word + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        out = splitmix64(s);
    }
    return out;
}

// mt19937_64 engine with hand-rolled double conversions. std::mt19937_64 is
// fully specified by the standard; the distributions below avoid the
// implementation-defined std::*_distribution classes so that identical seeds
// produce identical streams everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // modulo bias is negligible for the index ranges used here (n << 2^64)
        return engine_() % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via Box-Muller; consumes exactly two engine outputs
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // index drawn from the categorical distribution with the given weights
    // (assumed nonnegative, summing to ~1)
    int categorical(const std::vector<double>& weights) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
            acc += weights[k];
            if (u < acc) return static_cast<int>(k);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace relrep

#endif
