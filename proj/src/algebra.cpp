#include "veilaudit/algebra.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace veilaudit {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw Error("libsodium initialization failed");
    });
}

// H(len(domain) || domain || payload), 64 bytes.
std::array<std::uint8_t, 64> wide_digest(std::string_view domain,
                                         std::span<const std::uint8_t> payload) {
    ensure_sodium();
    crypto_generichash_state st;
    crypto_generichash_init(&st, nullptr, 0, 64);
    std::uint8_t len = static_cast<std::uint8_t>(domain.size());
    crypto_generichash_update(&st, &len, 1);
    crypto_generichash_update(&st, reinterpret_cast<const std::uint8_t*>(domain.data()),
                              domain.size());
    crypto_generichash_update(&st, payload.data(), payload.size());
    std::array<std::uint8_t, 64> out{};
    crypto_generichash_final(&st, out.data(), out.size());
    return out;
}

}  // namespace

Scalar::Scalar() { ensure_sodium(); }

Scalar Scalar::zero() { return Scalar{}; }

Scalar Scalar::one() { return from_u64(1); }

Scalar Scalar::from_u64(std::uint64_t v) {
    Scalar s;
    for (int i = 0; i < 8; ++i) s.repr_[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return s;
}

Scalar Scalar::reduce_wide(std::span<const std::uint8_t> wide64) {
    if (wide64.size() != 64) throw MalformedEncoding("wide scalar input must be 64 bytes");
    Scalar s;
    crypto_core_ristretto255_scalar_reduce(s.repr_.data(), wide64.data());
    return s;
}

Scalar Scalar::decode(std::span<const std::uint8_t> bytes32) {
    if (bytes32.size() != kBytes) throw MalformedEncoding("scalar encoding must be 32 bytes");
    ensure_sodium();
    // Canonical iff reduction is a no-op.
    std::uint8_t wide[64] = {0};
    std::memcpy(wide, bytes32.data(), kBytes);
    Scalar s;
    crypto_core_ristretto255_scalar_reduce(s.repr_.data(), wide);
    if (std::memcmp(s.repr_.data(), bytes32.data(), kBytes) != 0)
        throw MalformedEncoding("non-canonical scalar encoding");
    return s;
}

Bytes Scalar::encode() const { return Bytes(repr_.begin(), repr_.end()); }

Scalar Scalar::operator+(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_add(r.repr_.data(), repr_.data(), o.repr_.data());
    return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_sub(r.repr_.data(), repr_.data(), o.repr_.data());
    return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_mul(r.repr_.data(), repr_.data(), o.repr_.data());
    return r;
}

Scalar Scalar::negate() const {
    Scalar r;
    crypto_core_ristretto255_scalar_negate(r.repr_.data(), repr_.data());
    return r;
}

Scalar Scalar::invert() const {
    if (is_zero()) throw Error("inverse of zero scalar");
    Scalar r;
    crypto_core_ristretto255_scalar_invert(r.repr_.data(), repr_.data());
    return r;
}

bool Scalar::is_zero() const {
    std::uint8_t acc = 0;
    for (auto b : repr_) acc |= b;
    return acc == 0;
}

bool Scalar::operator==(const Scalar& o) const {
    return std::memcmp(repr_.data(), o.repr_.data(), kBytes) == 0;
}

GroupElement::GroupElement() { ensure_sodium(); }

GroupElement GroupElement::identity() { return GroupElement{}; }

GroupElement GroupElement::base() {
    return mul_base(Scalar::one());
}

GroupElement GroupElement::decode(std::span<const std::uint8_t> bytes32) {
    if (bytes32.size() != kBytes) throw MalformedEncoding("element encoding must be 32 bytes");
    ensure_sodium();
    if (crypto_core_ristretto255_is_valid_point(bytes32.data()) != 1) {
        // The identity is a valid element but is_valid_point rejects it.
        static const std::uint8_t zero[kBytes] = {0};
        if (std::memcmp(bytes32.data(), zero, kBytes) != 0)
            throw MalformedEncoding("invalid group element encoding");
    }
    GroupElement p;
    std::memcpy(p.repr_.data(), bytes32.data(), kBytes);
    return p;
}

Bytes GroupElement::encode() const { return Bytes(repr_.begin(), repr_.end()); }

GroupElement GroupElement::operator+(const GroupElement& o) const {
    if (is_identity()) return o;
    if (o.is_identity()) return *this;
    GroupElement r;
    if (crypto_core_ristretto255_add(r.repr_.data(), repr_.data(), o.repr_.data()) != 0)
        throw Error("group addition failed");
    return r;
}

GroupElement GroupElement::operator-(const GroupElement& o) const {
    if (o.is_identity()) return *this;
    GroupElement r;
    if (crypto_core_ristretto255_sub(r.repr_.data(), repr_.data(), o.repr_.data()) != 0)
        throw Error("group subtraction failed");
    return r;
}

bool GroupElement::is_identity() const {
    std::uint8_t acc = 0;
    for (auto b : repr_) acc |= b;
    return acc == 0;
}

bool GroupElement::operator==(const GroupElement& o) const {
    return std::memcmp(repr_.data(), o.repr_.data(), kBytes) == 0;
}

GroupElement operator*(const Scalar& s, const GroupElement& p) {
    if (s.is_zero() || p.is_identity()) return GroupElement::identity();
    std::uint8_t out[GroupElement::kBytes];
    if (crypto_scalarmult_ristretto255(out, s.data(), p.data()) != 0)
        return GroupElement::identity();  // only reachable for s*P = identity
    return GroupElement::decode(std::span<const std::uint8_t>(out, sizeof out));
}

GroupElement mul_base(const Scalar& s) {
    if (s.is_zero()) return GroupElement::identity();
    std::uint8_t out[GroupElement::kBytes];
    if (crypto_scalarmult_ristretto255_base(out, s.data()) != 0)
        return GroupElement::identity();
    return GroupElement::decode(std::span<const std::uint8_t>(out, sizeof out));
}

const GeneratorSet& GeneratorSet::instance() {
    static const GeneratorSet gens = [] {
        GeneratorSet g;
        g.G = GroupElement::base();
        g.H = hash_to_group(domains::kGenH, {});
        g.J = hash_to_group(domains::kGenJ, {});
        return g;
    }();
    return gens;
}

Scalar hash_to_scalar(std::string_view domain, std::span<const std::uint8_t> payload) {
    auto wide = wide_digest(domain, payload);
    return Scalar::reduce_wide(wide);
}

GroupElement hash_to_group(std::string_view domain, std::span<const std::uint8_t> payload) {
    auto wide = wide_digest(domain, payload);
    std::uint8_t out[GroupElement::kBytes];
    crypto_core_ristretto255_from_hash(out, wide.data());
    return GroupElement::decode(std::span<const std::uint8_t>(out, sizeof out));
}

Scalar kdf_derive(const Scalar& master_secret, std::span<const std::uint8_t> salt) {
    if (salt.empty()) throw EmptySalt{};
    Bytes payload;
    payload.reserve(4 + Scalar::kBytes + salt.size());
    payload.push_back('K');
    payload.push_back('D');
    payload.push_back('F');
    payload.push_back(0x01);
    payload.insert(payload.end(), master_secret.data(), master_secret.data() + Scalar::kBytes);
    payload.insert(payload.end(), salt.begin(), salt.end());
    Scalar out = hash_to_scalar(domains::kGlobal, payload);
    if (out.is_zero()) out = Scalar::one();  // negligible branch, keeps the contract total
    return out;
}

SchnorrSignature schnorr_sign(const Scalar& sk, std::string_view domain,
                              std::span<const std::uint8_t> message) {
    if (sk.is_zero()) throw ZeroKey{};
    GroupElement pk = mul_base(sk);
    // Deterministic nonce from (sk, domain, message).
    Bytes nonce_input;
    nonce_input.push_back(static_cast<std::uint8_t>(domain.size()));
    nonce_input.insert(nonce_input.end(), domain.begin(), domain.end());
    nonce_input.insert(nonce_input.end(), sk.data(), sk.data() + Scalar::kBytes);
    nonce_input.insert(nonce_input.end(), message.begin(), message.end());
    Scalar nonce = hash_to_scalar(domains::kGlobal, nonce_input);
    if (nonce.is_zero()) nonce = Scalar::one();
    GroupElement R = mul_base(nonce);

    Bytes challenge_input;
    auto r_bytes = R.encode();
    auto pk_bytes = pk.encode();
    challenge_input.insert(challenge_input.end(), r_bytes.begin(), r_bytes.end());
    challenge_input.insert(challenge_input.end(), pk_bytes.begin(), pk_bytes.end());
    challenge_input.insert(challenge_input.end(), message.begin(), message.end());
    Scalar e = hash_to_scalar(domain, challenge_input);

    return SchnorrSignature{e, nonce + e * sk};
}

bool schnorr_verify(const GroupElement& pk, std::string_view domain,
                    std::span<const std::uint8_t> message, const SchnorrSignature& sig) {
    // R' = z*G - e*pk; accept iff e == H(R' || pk || msg).
    GroupElement R = mul_base(sig.response) - (sig.commitment_hash * pk);
    Bytes challenge_input;
    auto r_bytes = R.encode();
    auto pk_bytes = pk.encode();
    challenge_input.insert(challenge_input.end(), r_bytes.begin(), r_bytes.end());
    challenge_input.insert(challenge_input.end(), pk_bytes.begin(), pk_bytes.end());
    challenge_input.insert(challenge_input.end(), message.begin(), message.end());
    return hash_to_scalar(domain, challenge_input) == sig.commitment_hash;
}

Address derive_address(const GroupElement& pk) {
    auto digest = digest32(domains::kAddr, pk.encode());
    Address addr;
    std::memcpy(addr.bytes.data(), digest.data(), Address::kBytes);
    return addr;
}

std::array<std::uint8_t, 32> digest32(std::string_view domain,
                                      std::span<const std::uint8_t> payload) {
    auto wide = wide_digest(domain, payload);
    std::array<std::uint8_t, 32> out{};
    std::memcpy(out.data(), wide.data(), 32);
    return out;
}

}  // namespace veilaudit
