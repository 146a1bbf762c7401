#pragma once

#include <string>
#include <utility>
#include <vector>

#include "veilaudit/linktag.hpp"
#include "veilaudit/pedersen_nizk.hpp"
#include "veilaudit/threshold_escrow.hpp"

// The canonical per-transfer audit record: provenance core, execution
// attestation, and the two per-party bundles.

namespace veilaudit {

using Hash32 = std::array<std::uint8_t, 32>;

Bytes to_bytes(const Hash32& h);

struct TagCore {
    std::string cid_src;
    Hash32 txid_src{};
    std::string cid_dst;
    Hash32 txid_dst{};
    Hash32 msg_id{};
    std::uint64_t ts = 0;  // virtual-clock ms; never load-bearing for correctness
};

// The verified bridge attestation set plus the anti-replay nullifier; stands
// in for a separate execution proof object.
struct ExecAttestation {
    std::uint64_t bridge_nonce = 0;  // per-source monotone message counter
    std::uint32_t required_depth = 0;
    std::vector<std::pair<std::uint32_t, SchnorrSignature>> attestations;
    Hash32 nullifier{};
};

struct PartyBundle {
    UidCiphertext uid;
    PedersenCommitment com;
    LinkCiphertext ct_link;
    LinkProof pi_link;
};

struct AuditTag {
    TagCore core;
    ExecAttestation exec;
    PartyBundle party_a;
    PartyBundle party_b;

    Bytes serialize() const;  // injective canonical form, version byte 0x01
    static AuditTag deserialize(std::span<const std::uint8_t> bytes);
};

// Canonical message bytes the relayers attest to.
Bytes exec_message(const TagCore& core, std::uint64_t bridge_nonce, std::uint32_t depth);

Hash32 compute_nullifier(const Hash32& txid_src, std::uint64_t nonce, const std::string& cid_src,
                         const std::string& cid_dst);
Hash32 compute_dedup_key(const std::string& cid_dst, const Hash32& txid_dst, const Hash32& msg_id);
Hash32 tag_hash(const AuditTag& tag);

}  // namespace veilaudit
