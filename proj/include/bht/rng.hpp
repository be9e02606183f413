#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bht {

/// Seeded generator with library-independent sampling.
///
/// std::uniform_int_distribution and std::shuffle are implementation defined,
/// so every draw goes through the helpers below to keep runs reproducible
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    /// splitmix64 step.
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // rejection sampling removes modulo bias
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

    int index(std::size_t size) { return static_cast<int>(below(size)); }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Child stream for task `index`, independent of how many draws the parent made.
    static Rng derive(std::uint64_t master, std::uint64_t index) {
        Rng mix(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
        return Rng(mix.next());
    }

    /// Fresh child seeded from this stream.
    Rng split() { return Rng(next()); }

private:
    std::uint64_t state_;
};

}  // namespace bht
