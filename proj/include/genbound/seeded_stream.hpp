#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace genbound {

// Deterministic counter-based random stream.
//
// The i-th raw word is mix64(seed + i * golden), the SplitMix64 construction,
// so a stream is a pure function of (seed, counter) and can be forked cheaply.
// Substreams are derived by hashing a text label (and optional index) into a
// fresh seed; distinct labels give statistically independent streams, and
// drawing from one never advances another.
//
// Gaussians use the basic Box-Muller transform z = sqrt(-2 ln u1) * cos(2 pi u2)
// with no second-value caching, so every Gaussian consumes exactly two raw
// words. The counter counts raw words handed out, which makes the stream
// position after any fixed-size vector draw a constant known in advance.
class SeededStream {
  public:
    explicit SeededStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (counter_++ + 1) * 0x9e3779b97f4a7c15ULL;
        return mix64(z);
    }

    // Uniform on [0,1), 53 mantissa bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; keeps log() finite in the Box-Muller transform.
    double next_uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double next_gaussian() {
        double u1 = next_uniform_pos();
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Unbiased-enough bounded draw via 128-bit multiply-shift. bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
        unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * bound;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    SeededStream derive(std::string_view label) const {
        return SeededStream(mix64(mix64(seed_) ^ fnv1a(label)));
    }

    SeededStream derive(std::string_view label, std::uint64_t index) const {
        return SeededStream(mix64(mix64(mix64(seed_) ^ fnv1a(label)) ^ index));
    }

  private:
    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace genbound
