#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace octrack {

/// splitmix64 step (Steele, Lea, Vigna). Used only to expand seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna, 2019). Bit-exact across platforms; the
/// uniform mapping uses the top 53 bits, normals come from the Box-Muller
/// transform on two fresh uniforms (no cached spare), so every draw consumes
/// a fixed number of generator steps.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    /// Independent stream for (seed, stream_id), e.g. one per trial or target.
    static Xoshiro256pp stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t sm = seed;
        const std::uint64_t base = splitmix64(sm);
        return Xoshiro256pp(base ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1], safe as a logarithm argument.
    double uniform_positive() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = uniform_positive();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace octrack
