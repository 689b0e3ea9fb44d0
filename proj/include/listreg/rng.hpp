#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace listreg {

// Deterministic splittable RNG. All pipeline randomness flows from one master
// seed through tagged derivations, so runs are reproducible across platforms
// (std:: distributions are implementation-defined and never used here).
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return mix(state);
    }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // child generator for an independent purpose
    Rng derive(std::uint64_t tag) const { return Rng(mix(state ^ mix(tag))); }

    Rng derive(std::string_view tag) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        return derive(h);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }
};

}  // namespace listreg
