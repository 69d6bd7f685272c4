#pragma once

// Deterministic RNG plumbing. Every Monte-Carlo trial owns a private
// substream keyed by (master seed, trial index, stream tag), so results do
// not depend on thread schedule or evaluation order. The splitting rule is
// fixed here: three finalizer rounds folding each key word in turn.
// Determinism is promised within this implementation only, not across
// languages or versions.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace gef {

// splitmix64 finalizer (Stafford mix13 constants)
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

enum class StreamTag : uint64_t {
    realization = 1,
    conditional = 2,
    small_ball = 3,
    generic = 4,
};

inline uint64_t substream_key(uint64_t seed, uint64_t trial, uint64_t tag) {
    uint64_t x = 0x243F6A8885A308D3ull;  // pi
    x = mix64(x ^ seed);
    x = mix64(x ^ trial);
    x = mix64(x ^ tag);
    return x;
}

struct Xoshiro256pp {
    std::array<uint64_t, 4> s;

    explicit Xoshiro256pp(uint64_t key) {
        uint64_t sm = key;
        for (auto& w : s) {
            sm += 0x9E3779B97F4A7C15ull;
            w = mix64(sm);
        }
        if (s[0] == 0 && s[1] == 0 && s[2] == 0 && s[3] == 0) s[0] = 1;
    }
    Xoshiro256pp(uint64_t seed, uint64_t trial, StreamTag tag)
        : Xoshiro256pp(substream_key(seed, trial, uint64_t(tag))) {}

    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t next() {
        uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // uniform on (0,1]; never 0, so ln is always finite
    double u01() { return double((next() >> 11) + 1) * 0x1.0p-53; }
    // uniform on [0,1); for phases
    double u01_half_open() { return double(next() >> 11) * 0x1.0p-53; }

    double exponential() { return -std::log(u01()); }

    // standard complex gaussian: density e^{-|z|^2}/pi, E|xi|^2 = 1,
    // |xi| has CDF 1 - e^{-x^2}
    std::complex<double> complex_gaussian() {
        double mod = std::sqrt(-std::log(u01()));
        double ph = 2.0 * std::numbers::pi_v<double> * u01_half_open();
        return {mod * std::cos(ph), mod * std::sin(ph)};
    }

    std::complex<double> unit_phase() {
        double ph = 2.0 * std::numbers::pi_v<double> * u01_half_open();
        return {std::cos(ph), std::sin(ph)};
    }
};

}  // namespace gef
