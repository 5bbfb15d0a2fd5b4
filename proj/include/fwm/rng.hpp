#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fwm {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// mt19937_64 with explicit bit-to-double mapping so streams are identical
/// across standard library implementations (distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double unit() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// Uniform in [-scale, scale].
    double symmetric(double scale) { return (2.0 * unit() - 1.0) * scale; }

    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [0, n), bias-free via rejection.
    std::size_t index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = bits();
        while (v >= limit) v = bits();
        return static_cast<std::size_t>(v % n);
    }

    /// Independent substream; does not consume state from this generator.
    Rng fork(std::uint64_t stream) const {
        return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x51ed2701)));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

/// Fisher-Yates with the portable index draw above.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.index(i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace fwm
