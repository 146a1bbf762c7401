#pragma once

#include <optional>

#include "veilaudit/chainsim.hpp"

// Orchestration of the three protocols: anonymous identity setup (AIP),
// audit-tag construction and commitment (AUD), and threshold-gated identity
// revelation (IRP), over the simulated multi-chain environment.

namespace veilaudit {

struct UnknownTag : Error { UnknownTag() : Error("referenced tag not in ledger") {} };

struct MasterIdentity {
    Scalar sk_master;
    Scalar x;            // identity scalar, kdf_derive(sk_master, "id")
    GroupElement pk_id;  // x * G; the key IRP reveals
    GroupElement wallet_pk;
    Address funding_addr;

    static MasterIdentity generate(SeededRng& rng);
};

struct AnonSession {
    Bytes salt_addr;
    Scalar sk_anon;
    GroupElement pk_anon;
    Address addr_anon;
    Bytes nonce_sess;
};

AnonSession derive_session(const MasterIdentity& user, SeededRng& rng);

// Fresh (r, k, s) per tag; the bundle plus its witnesses (witnesses stay
// caller-side, they never enter any tag artifact).
struct BundleWithWitness {
    PartyBundle bundle;
    LinkWitness witness;
};

BundleWithWitness make_bundle(const MasterIdentity& user, const GroupElement& tpk,
                              const GroupElement& apk, SeededRng& rng);

LinkStatement statement_for(const PartyBundle& bundle, const GroupElement& tpk,
                            const GroupElement& apk);

// The assembled simulation environment a scenario runs in.
struct SimEnv {
    std::map<std::string, SimChain> chains;
    std::map<std::string, EscrowContract> escrows;
    Bridge bridge;
    AuditLedger ledger;
    ThresholdKeyset keyset;              // committee public part
    std::vector<AuthorityShare> shares;  // committee secrets (simulator-held)
    EtKeypair et;                        // auditor keypair; only .apk is public
    std::uint32_t bridge_depth = 1;
    std::uint64_t now_ms = 0;
    std::uint64_t next_deposit_id = 1;

    // Advances virtual time, producing blocks and stepping the bridge at
    // every intervening block boundary.
    void advance(std::uint64_t to_ms);
    SimChain& chain(const std::string& cid);
};

struct EnvConfig {
    struct ChainCfg {
        std::string chain_id;
        std::uint64_t block_interval_ms = 500;
        std::uint64_t finality_depth = 1;
    };
    std::vector<ChainCfg> chains = {{"src", 500, 1}, {"dst", 500, 1}};
    std::uint32_t t_relay = 3;
    std::uint32_t n_relay = 4;
    std::uint64_t relay_delay_ms = 0;
    std::uint32_t bridge_depth = 1;
    std::uint32_t committee_t = 2;
    std::uint32_t committee_n = 3;
};

SimEnv make_env(const EnvConfig& cfg, SeededRng& rng);

struct AipResult {
    AnonSession session;
    BundleWithWitness bundle;
    std::uint64_t deposit_id = 0;
};

// Alg-1 run for one party on one chain: derive session, escrow deposit and
// proof-gated release to the anonymous address, and the per-tag bundle.
AipResult aip_run(const MasterIdentity& user, SimEnv& env, const std::string& cid,
                  std::int64_t amount, SeededRng& rng);

// Builds the AuditTag for a delivered bridge message and submits it; all
// verification happens inside ledger append.
AppendResult aud_build_and_submit(SimEnv& env, std::size_t msg_handle,
                                  const PartyBundle& bundle_a, const PartyBundle& bundle_b);

AuditTag build_tag(const SimEnv& env, std::size_t msg_handle, const PartyBundle& bundle_a,
                   const PartyBundle& bundle_b);

struct RevealCase {
    Bytes case_id;
    std::vector<Hash32> tags;
    LinkPseudonym cluster_evidence;
    std::set<std::uint32_t> approvals;  // authority indices
};

// Threshold-gated revelation. Returns nullopt (refusal, no ledger record)
// when approvals < t; otherwise the distinct recovered identity keys.
std::optional<std::vector<GroupElement>> irp_run(const RevealCase& reveal_case, SimEnv& env,
                                                 SeededRng& rng);

// One complete cross-chain transfer between two users, closed loop: source
// leg, bridge delivery at the configured depth, audit tag commit.
struct TransferOutcome {
    AppendResult append;
    std::size_t msg_handle = 0;
    std::uint64_t src_commit_ms = 0;
    std::uint64_t tag_commit_ms = 0;
};

TransferOutcome run_transfer(SimEnv& env, const MasterIdentity& sender,
                             const MasterIdentity& receiver, const std::string& cid_src,
                             const std::string& cid_dst, std::int64_t amount, SeededRng& rng);

}  // namespace veilaudit
