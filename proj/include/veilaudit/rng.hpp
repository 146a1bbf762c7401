#pragma once

#include <cstdint>
#include <string_view>

#include "veilaudit/algebra.hpp"

namespace veilaudit {

// Deterministic, platform-stable DRBG (ChaCha20 keystream keyed from a seed).
// All simulator and benchmark randomness flows through this; identical seeds
// give identical runs byte-for-byte.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed, std::string_view label = "");

    // Derives an independent child stream; order of forks matters, reuse of a
    // label under the same parent gives the same child.
    SeededRng fork(std::string_view label) const;

    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n);
    std::uint64_t next_u64();
    // Uniform in [0, bound), bound > 0. Rejection-sampled, no modulo bias.
    std::uint64_t uniform(std::uint64_t bound);
    // Uniform double in [0, 1) with 53-bit resolution.
    double uniform_real();
    Scalar scalar();
    Scalar nonzero_scalar();
    bool bernoulli(double p);

private:
    SeededRng() = default;
    std::array<std::uint8_t, 32> key_{};
    std::array<std::uint8_t, 8> nonce_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 64> block_{};
    std::size_t block_pos_ = 64;  // forces refill on first use
    void refill();
};

}  // namespace veilaudit
