#pragma once

#include <vector>

#include "veilaudit/pedersen_nizk.hpp"
#include "veilaudit/rng.hpp"

// t-of-n threshold ElGamal over the group: trusted-dealer Shamir sharing with
// Feldman commitments, identity-capsule encryption, DLEQ-proved partial
// decryptions, and Lagrange combination.

namespace veilaudit {

struct BadThreshold : Error {
    explicit BadThreshold(const std::string& what) : Error(what) {}
};
struct InvalidShare : Error { InvalidShare() : Error("share fails Feldman verification") {} };
struct BelowThreshold : Error { BelowThreshold() : Error("fewer shares than threshold") {} };
struct BadShareProof : Error { BadShareProof() : Error("decryption share proof invalid") {} };
struct DuplicateIndex : Error { DuplicateIndex() : Error("duplicate share index") {} };

struct ThresholdKeyset {
    GroupElement tpk;                  // a0 * G
    std::uint32_t n = 0;
    std::uint32_t t = 0;
    std::vector<GroupElement> feldman; // a_j * G, j = 0..t-1; feldman[0] == tpk
};

struct AuthorityShare {
    std::uint32_t index = 0;  // in [1, n]
    Scalar secret;            // f(index)
    // (index: 1 byte, secret: canonical scalar bytes) — committee fixture format.
    Bytes export_bytes() const;
    static AuthorityShare import_bytes(std::span<const std::uint8_t> bytes);
};

struct UidCiphertext {
    GroupElement c1;  // k * G
    GroupElement c2;  // PK_id + k * tpk
    bool operator==(const UidCiphertext&) const = default;
};

struct DecryptionShare {
    std::uint32_t index = 0;
    GroupElement value;  // secret_i * c1
    DleqProof proof;     // log_G(secret_i * G) == log_{c1}(value)
};

struct DealerOutput {
    ThresholdKeyset keyset;
    std::vector<AuthorityShare> shares;
    Scalar dealer_secret;  // a0; kept by tests and the attack control arms only
};

DealerOutput keygen(std::uint32_t t, std::uint32_t n, SeededRng& rng);

// The public share secret_i * G reconstructed from the Feldman commitments.
GroupElement feldman_public_share(const ThresholdKeyset& keyset, std::uint32_t index);
bool share_verify(const ThresholdKeyset& keyset, const AuthorityShare& share);

UidCiphertext encrypt_uid(const GroupElement& tpk, const GroupElement& pk_id, const Scalar& k);

DecryptionShare partial_decrypt(const ThresholdKeyset& keyset, const AuthorityShare& share,
                                const UidCiphertext& ct, SeededRng& rng);
bool share_verify_decryption(const ThresholdKeyset& keyset, const UidCiphertext& ct,
                             const DecryptionShare& share);

GroupElement combine(const ThresholdKeyset& keyset, const UidCiphertext& ct,
                     const std::vector<DecryptionShare>& shares);

// Lagrange coefficient at zero for index i over the given index set.
Scalar lagrange_at_zero(const std::vector<std::uint32_t>& indices, std::uint32_t i);

}  // namespace veilaudit
