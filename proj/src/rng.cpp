#include "veilaudit/rng.hpp"

#include <sodium.h>

#include <cstring>

namespace veilaudit {

SeededRng::SeededRng(std::uint64_t seed, std::string_view label) {
    Bytes input;
    input.reserve(8 + label.size() + 8);
    const char tag[] = "RNG/v1";
    input.insert(input.end(), tag, tag + sizeof(tag) - 1);
    for (int i = 0; i < 8; ++i) input.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
    input.insert(input.end(), label.begin(), label.end());
    auto digest = digest32("VEILAUDIT/GLOBAL/v1", input);
    std::memcpy(key_.data(), digest.data(), 32);
}

SeededRng SeededRng::fork(std::string_view label) const {
    Bytes input;
    const char tag[] = "RNG/fork";
    input.insert(input.end(), tag, tag + sizeof(tag) - 1);
    input.insert(input.end(), key_.begin(), key_.end());
    input.insert(input.end(), label.begin(), label.end());
    auto digest = digest32("VEILAUDIT/GLOBAL/v1", input);
    SeededRng child;
    std::memcpy(child.key_.data(), digest.data(), 32);
    return child;
}

void SeededRng::refill() {
    std::uint8_t ctr_block[64] = {0};
    std::uint8_t nonce[8];
    std::memcpy(nonce, nonce_.data(), 8);
    // ChaCha20 keystream over a zero block at the current counter.
    crypto_stream_chacha20_xor_ic(block_.data(), ctr_block, 64, nonce, counter_, key_.data());
    ++counter_;
    block_pos_ = 0;
}

void SeededRng::fill(std::span<std::uint8_t> out) {
    std::size_t off = 0;
    while (off < out.size()) {
        if (block_pos_ == 64) refill();
        std::size_t take = std::min<std::size_t>(64 - block_pos_, out.size() - off);
        std::memcpy(out.data() + off, block_.data() + block_pos_, take);
        block_pos_ += take;
        off += take;
    }
}

Bytes SeededRng::bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

std::uint64_t SeededRng::next_u64() {
    std::uint8_t buf[8];
    fill(buf);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t SeededRng::uniform(std::uint64_t bound) {
    if (bound == 0) throw Error("uniform bound must be positive");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

double SeededRng::uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Scalar SeededRng::scalar() {
    std::uint8_t wide[64];
    fill(wide);
    return Scalar::reduce_wide(wide);
}

Scalar SeededRng::nonzero_scalar() {
    for (;;) {
        Scalar s = scalar();
        if (!s.is_zero()) return s;
    }
}

bool SeededRng::bernoulli(double p) { return uniform_real() < p; }

}  // namespace veilaudit
