#pragma once

#include <string_view>

#include "veilaudit/algebra.hpp"
#include "veilaudit/rng.hpp"

// Pedersen commitments and the Fiat-Shamir sigma protocols: control proof
// (key ownership of an anonymous address), the three-way consistency proof
// binding commitment / identity capsule / link ciphertext to one hidden
// identity scalar, and Chaum-Pedersen DLEQ.

namespace veilaudit {

struct AddressMismatch : Error { AddressMismatch() : Error("address does not match key") {} };
struct WitnessInconsistent : Error {
    explicit WitnessInconsistent(const std::string& what) : Error(what) {}
};

struct PedersenCommitment {
    GroupElement C;
    bool operator==(const PedersenCommitment&) const = default;
};

// C = x*G + r*H with the fixed Pedersen bases.
PedersenCommitment commit(const Scalar& x, const Scalar& r);

// Ordered, length-prefixed absorption of labeled byte strings; the challenge
// is hash_to_scalar over the running digest. Absorption order is binding.
class FiatShamirTranscript {
public:
    explicit FiatShamirTranscript(std::string_view domain);
    void absorb(std::string_view label, std::span<const std::uint8_t> bytes);
    void absorb(std::string_view label, const GroupElement& p) { absorb(label, p.encode()); }
    void absorb(std::string_view label, const Scalar& s) { absorb(label, s.encode()); }
    Scalar challenge() const;

private:
    std::string domain_;
    Bytes buffer_;
};

struct ControlProof {
    GroupElement pk_anon;
    SchnorrSignature sig;
};

ControlProof prove_ctrl(const Scalar& sk_anon, const Address& addr,
                        std::span<const std::uint8_t> nonce_sess);
bool verify_ctrl(const Address& addr, std::span<const std::uint8_t> nonce_sess,
                 const ControlProof& proof);

// Forward declarations: ciphertext shapes live with their schemes.
struct UidCiphertext;
struct LinkCiphertext;

struct LinkStatement {
    PedersenCommitment com;
    GroupElement uid_c1, uid_c2;
    GroupElement link_c1, link_c2;
    GroupElement tpk;
    GroupElement apk;
};

struct LinkProof {
    GroupElement a_com, a_uid1, a_uid2, a_link1, a_link2;
    Scalar z_x, z_r, z_k, z_s;
    // version 0x01 || 5 elements || 4 scalars
    Bytes serialize() const;
    static LinkProof deserialize(std::span<const std::uint8_t> bytes);
};

struct LinkWitness {
    Scalar x;  // identity scalar
    Scalar r;  // commitment blinding
    Scalar k;  // UID encryption randomness
    Scalar s;  // link-ciphertext randomness
};

LinkProof prove_link(const LinkWitness& w, const LinkStatement& st, SeededRng& rng);
bool verify_link(const LinkStatement& st, const LinkProof& proof);

// The five verification equations under an explicit challenge; verify_link is
// this with the Fiat-Shamir challenge. Exposed for the ZK simulator tests.
bool check_link_equations(const LinkStatement& st, const LinkProof& proof, const Scalar& c);
// HVZK simulator: accepting (announcements, responses) for a given challenge,
// no witness involved.
LinkProof simulate_link(const LinkStatement& st, const Scalar& challenge, SeededRng& rng);

struct DleqProof {
    GroupElement a1, a2;
    Scalar response;
};

DleqProof prove_dleq(const Scalar& w, const GroupElement& b1, const GroupElement& b2,
                     SeededRng& rng);
bool verify_dleq(const GroupElement& p1, const GroupElement& p2, const GroupElement& b1,
                 const GroupElement& b2, const DleqProof& proof);
bool check_dleq_equations(const GroupElement& p1, const GroupElement& p2, const GroupElement& b1,
                          const GroupElement& b2, const DleqProof& proof, const Scalar& c);
DleqProof simulate_dleq(const GroupElement& p1, const GroupElement& p2, const GroupElement& b1,
                        const GroupElement& b2, const Scalar& challenge, SeededRng& rng);

}  // namespace veilaudit
