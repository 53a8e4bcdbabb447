#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace saddlebench {

// Splittable PRNG built on the SplitMix64 finalizer.
//
// A generator is identified by a 64-bit base key. substream(k) derives a
// statistically independent generator from (base, k) without consuming any
// state, so stream k always produces the same values no matter how much the
// parent was used or in which order substreams are created. That property is
// what makes Monte Carlo runs reproducible under --jobs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : base_(seed), state_(seed) {}

    // Child generator for (base, key); pure function of its arguments.
    Rng substream(std::uint64_t key) const {
        return Rng(mix(base_ + 0x9e3779b97f4a7c15ull * (2 * key + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return finalize(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, k). Modulo bias is negligible for the small k
    // used here and keeps the draw count per sample fixed.
    std::uint64_t below(std::uint64_t k) { return next_u64() % k; }

    // Standard normal via Box-Muller. The transform is spelled out (instead
    // of std::normal_distribution) so streams are bit-identical across
    // standard libraries. The second value of each pair is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        return finalize(x);
    }

    std::uint64_t base_;
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace saddlebench
