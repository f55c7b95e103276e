#ifndef CREASE_PRNG_HPP
#define CREASE_PRNG_HPP

#include <cmath>
#include <cstdint>

namespace crease {

// Counter-based generator: value i of stream `seed` is splitmix64(seed) xor'd
// into the counter and mixed again. Constants are the standard splitmix64
// ones (Steele et al.). Stateless per index, so parallel fills are
// reproducible regardless of evaluation order.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_rand(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xD1342543DE82EF95ull + 1));
}

/// Uniform double in (0, 1]; never 0, so it is log-safe.
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    return (static_cast<double>(counter_rand(seed, index) >> 11) + 1.0) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two counter draws.
inline double normal01(std::uint64_t seed, std::uint64_t index) {
    double u1 = uniform01(seed, 2 * index);
    double u2 = uniform01(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

/// Small sequential generator for tests and fixtures.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t next_u64() { return counter_rand(seed_, index_++); }
    double uniform() { return uniform01(seed_, index_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    std::uint64_t seed_;
    std::uint64_t index_ = 0;
};

} // namespace crease

#endif
