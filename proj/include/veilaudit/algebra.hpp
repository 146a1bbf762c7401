#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Prime-order group (ristretto255) and scalar-field arithmetic, domain-separated
// hashing, key derivation, Schnorr signatures, and canonical 32-byte encodings.

namespace veilaudit {

using Bytes = std::vector<std::uint8_t>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySalt : Error { EmptySalt() : Error("empty salt") {} };
struct ZeroKey : Error { ZeroKey() : Error("zero secret key") {} };
struct MalformedEncoding : Error {
    explicit MalformedEncoding(const std::string& what) : Error(what) {}
};

// Registered domain-separation strings. Exact bytes, versioned.
namespace domains {
inline constexpr std::string_view kCtrl   = "VEILAUDIT/CTRL/v1";
inline constexpr std::string_view kExec   = "VEILAUDIT/EXEC/v1";
inline constexpr std::string_view kGlobal = "VEILAUDIT/GLOBAL/v1";
inline constexpr std::string_view kGenH   = "VEILAUDIT/GEN/H/v1";
inline constexpr std::string_view kGenJ   = "VEILAUDIT/GEN/J/v1";
inline constexpr std::string_view kFs     = "VEILAUDIT/FS/v1";
inline constexpr std::string_view kAddr   = "VEILAUDIT/ADDR/v1";
}  // namespace domains

class Scalar {
public:
    static constexpr std::size_t kBytes = 32;

    Scalar();  // zero
    static Scalar zero();
    static Scalar one();
    static Scalar from_u64(std::uint64_t v);
    // Reduces a 64-byte wide input mod the group order.
    static Scalar reduce_wide(std::span<const std::uint8_t> wide64);
    static Scalar decode(std::span<const std::uint8_t> bytes32);  // throws MalformedEncoding
    Bytes encode() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar negate() const;
    Scalar invert() const;  // throws Error on zero
    bool is_zero() const;
    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    const std::uint8_t* data() const { return repr_.data(); }

private:
    std::array<std::uint8_t, kBytes> repr_{};  // canonical little-endian, < q
};

class GroupElement {
public:
    static constexpr std::size_t kBytes = 32;

    GroupElement();  // identity
    static GroupElement identity();
    static GroupElement base();  // the standard generator G
    static GroupElement decode(std::span<const std::uint8_t> bytes32);  // throws MalformedEncoding
    Bytes encode() const;

    GroupElement operator+(const GroupElement& o) const;
    GroupElement operator-(const GroupElement& o) const;
    bool is_identity() const;
    bool operator==(const GroupElement& o) const;
    bool operator!=(const GroupElement& o) const { return !(*this == o); }

    const std::uint8_t* data() const { return repr_.data(); }

private:
    std::array<std::uint8_t, kBytes> repr_{};  // canonical ristretto encoding
};

// s * P (variable base) and s * G (fixed base).
GroupElement operator*(const Scalar& s, const GroupElement& p);
GroupElement mul_base(const Scalar& s);

struct GeneratorSet {
    GroupElement G;  // standard base
    GroupElement H;  // Pedersen blinding base, hash-to-group("VEILAUDIT/GEN/H/v1")
    GroupElement J;  // link-pseudonym base, hash-to-group("VEILAUDIT/GEN/J/v1")
    static const GeneratorSet& instance();
};

struct Address {
    static constexpr std::size_t kBytes = 20;
    std::array<std::uint8_t, kBytes> bytes{};
    auto operator<=>(const Address&) const = default;
    Bytes encode() const { return Bytes(bytes.begin(), bytes.end()); }
};

struct SchnorrSignature {
    Scalar commitment_hash;  // challenge e = H(R || pk || msg)
    Scalar response;         // z = nonce + e * sk
};

Scalar hash_to_scalar(std::string_view domain, std::span<const std::uint8_t> payload);
GroupElement hash_to_group(std::string_view domain, std::span<const std::uint8_t> payload);
Scalar kdf_derive(const Scalar& master_secret, std::span<const std::uint8_t> salt);

SchnorrSignature schnorr_sign(const Scalar& sk, std::string_view domain,
                              std::span<const std::uint8_t> message);
bool schnorr_verify(const GroupElement& pk, std::string_view domain,
                    std::span<const std::uint8_t> message, const SchnorrSignature& sig);

Address derive_address(const GroupElement& pk);

// 32-byte unkeyed digest (BLAKE2b-256) over domain-prefixed payload.
std::array<std::uint8_t, 32> digest32(std::string_view domain,
                                      std::span<const std::uint8_t> payload);

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

}  // namespace veilaudit
