#pragma once

#include <cstdint>
#include <vector>

namespace colmatch {

// Deterministic, platform-independent randomness. std::mt19937_64 is
// portable but the standard distributions are not, so draws go through
// the helpers below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds
        next();
        next();
    }

    std::uint64_t next() { return splitmix64(state_); }

    // uniform in [0, bound), bound >= 1; rejection sampling, no modulo bias
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

    // uniform double in [0,1)
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return real() < p; }

    // derive an independent stream, e.g. one per retry or per bucket
    Rng fork(std::uint64_t salt) {
        std::uint64_t s = next() ^ (salt * 0x9e3779b97f4a7c15ULL);
        return Rng(s);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace colmatch
