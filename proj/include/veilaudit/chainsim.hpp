#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "veilaudit/audit_tag.hpp"

// Deterministic in-process simulation of the network model: Layer-1 chains
// with block cadence and escrow contracts, a bridge with t-of-n relayer
// attestations and confirmation depth, and the audit ledger with dedup and
// replay guards. Virtual millisecond clock throughout.

namespace veilaudit {

struct UnknownChain : Error { UnknownChain() : Error("unknown chain id") {} };
struct UnknownDeposit : Error { UnknownDeposit() : Error("unknown deposit id") {} };
struct ProofRejected : Error { ProofRejected() : Error("control proof rejected") {} };
struct AlreadyReleased : Error { AlreadyReleased() : Error("deposit already released") {} };
struct InsufficientFunds : Error { InsufficientFunds() : Error("insufficient balance") {} };
struct NotYetFinal : Error { NotYetFinal() : Error("source tx not final to required depth") {} };
struct InsufficientAttestations : Error {
    InsufficientAttestations() : Error("fewer valid attestations than relay threshold") {}
};

struct Transaction {
    Address sender;
    Address dest;
    std::int64_t amount = 0;
    std::uint64_t nonce = 0;
    Bytes payload;
    Bytes canonical_bytes() const;
};

Hash32 compute_txid(const Transaction& tx);

struct Block {
    std::uint64_t height = 0;
    std::uint64_t time_ms = 0;
    std::vector<Hash32> txids;
};

struct TxRecord {
    Transaction tx;
    std::uint64_t submit_ms = 0;
    std::uint64_t inclusion_height = 0;
    std::uint64_t inclusion_ms = 0;
    bool included = false;
};

class SimChain {
public:
    SimChain(std::string chain_id, std::uint64_t block_interval_ms, std::uint64_t finality_depth);

    const std::string& chain_id() const { return chain_id_; }
    std::uint64_t block_interval_ms() const { return block_interval_ms_; }
    std::uint64_t finality_depth() const { return finality_depth_; }
    std::uint64_t height() const { return height_; }

    void mint(const Address& addr, std::int64_t amount);
    std::int64_t balance(const Address& addr) const;
    std::int64_t total_minted() const { return total_minted_; }
    std::int64_t total_balances() const;

    Hash32 submit_tx(const Transaction& tx, std::uint64_t at_ms);
    // Produces every block with boundary time <= now_ms. A tx submitted at t
    // enters the first block with time > t.
    void produce_until(std::uint64_t now_ms);

    const TxRecord* find_tx(const Hash32& txid) const;
    // Number of blocks at or above the inclusion block (>=1 once included).
    std::uint64_t confirmations(const Hash32& txid) const;
    bool finalized(const Hash32& txid) const;
    const std::vector<Block>& blocks() const { return blocks_; }

private:
    std::string chain_id_;
    std::uint64_t block_interval_ms_;
    std::uint64_t finality_depth_;
    std::uint64_t height_ = 0;
    std::vector<Block> blocks_;
    std::deque<Hash32> mempool_;
    std::map<Hash32, TxRecord> txs_;
    std::map<Address, std::int64_t> balances_;
    std::int64_t total_minted_ = 0;

    friend class EscrowContract;
};

class EscrowContract {
public:
    explicit EscrowContract(SimChain& chain) : chain_(chain) {}

    void deposit(std::uint64_t deposit_id, const Address& from, std::int64_t amount);
    // Releases to dest only after verify_ctrl(dest, nonce_sess, proof) accepts.
    void release(std::uint64_t deposit_id, const ControlProof& proof,
                 std::span<const std::uint8_t> nonce_sess, const Address& dest);
    std::int64_t held_total() const;

private:
    struct Deposit {
        std::int64_t amount = 0;
        Address depositor;
        bool released = false;
    };
    SimChain& chain_;
    std::map<std::uint64_t, Deposit> deposits_;
};

struct RelayerSet {
    std::uint32_t t_relay = 3;
    std::vector<Scalar> secrets;        // simulator-side
    std::vector<GroupElement> publics;  // registry the verifier uses
    static RelayerSet generate(std::uint32_t t_relay, std::uint32_t n_relay, SeededRng& rng);
};

struct BridgeMessage {
    Hash32 msg_id{};
    std::string cid_src;
    Hash32 txid_src{};
    std::string cid_dst;
    Bytes payload;
    std::uint32_t required_depth = 1;
    std::uint64_t bridge_nonce = 0;
    std::vector<std::pair<std::uint32_t, SchnorrSignature>> attestations;
    bool delivered = false;
    std::uint64_t delivered_ms = 0;
    Hash32 txid_dst{};
};

// Verifies >= t_relay distinct valid relayer signatures over the exec message.
bool verify_attestations(const TagCore& core, const ExecAttestation& exec,
                         const std::vector<GroupElement>& relayer_publics,
                         std::uint32_t t_relay);

class Bridge {
public:
    Bridge(RelayerSet relayers, std::uint64_t relay_delay_ms)
        : relayers_(std::move(relayers)), relay_delay_ms_(relay_delay_ms) {}

    const RelayerSet& relayers() const { return relayers_; }

    // Registers a cross-chain message; it is attested and delivered once the
    // source tx reaches the required confirmation depth plus the relay delay.
    std::size_t relay(const std::string& cid_src, const Hash32& txid_src,
                      const std::string& cid_dst, Bytes payload, std::uint32_t depth);
    // Attempts attestation/delivery of pending messages against current chain state.
    void step(std::map<std::string, SimChain>& chains, std::uint64_t now_ms);
    const BridgeMessage& message(std::size_t handle) const { return messages_.at(handle); }
    std::size_t message_count() const { return messages_.size(); }

    // Adversarial surface: re-deliver an already delivered message verbatim.
    bool redeliver(std::size_t handle, std::map<std::string, SimChain>& chains,
                   std::uint64_t now_ms);

private:
    RelayerSet relayers_;
    std::uint64_t relay_delay_ms_;
    std::uint64_t next_nonce_ = 0;
    std::vector<BridgeMessage> messages_;
    std::map<std::string, std::set<Hash32>> delivered_per_dst_;  // msg_id dedup at destination
    std::map<Hash32, std::uint64_t> ready_since_;

    bool deliver(BridgeMessage& msg, std::map<std::string, SimChain>& chains,
                 std::uint64_t now_ms);
};

enum class AppendStatus {
    Ok,
    DuplicateKey,
    DuplicateNullifier,
    BadExecAttestation,
    BadLinkProof,
};

struct AppendResult {
    AppendStatus status = AppendStatus::Ok;
    Hash32 key{};
    bool ok() const { return status == AppendStatus::Ok; }
};

const char* to_string(AppendStatus s);

// Verification context for incoming tags.
struct LedgerContext {
    std::vector<GroupElement> relayer_publics;
    std::uint32_t t_relay = 0;
    GroupElement tpk;
    GroupElement apk;
    // Optional finality oracle over (cid, txid, depth); absent means the
    // provenance legs are not re-checked (used by replay-focused tests).
    std::function<bool(const std::string&, const Hash32&, std::uint32_t)> finality;
};

struct RevealRecord {
    Bytes case_id;
    std::vector<Hash32> tag_keys;
    std::vector<std::uint32_t> approving;
    std::uint64_t ts = 0;
    std::vector<GroupElement> revealed;
};

class AuditLedger {
public:
    explicit AuditLedger(LedgerContext ctx) : ctx_(std::move(ctx)) {}

    AppendResult append(const AuditTag& tag);
    bool contains(const Hash32& key) const { return records_.count(key) != 0; }
    const AuditTag* find(const Hash32& key) const;
    std::size_t size() const { return order_.size(); }
    const std::vector<Hash32>& keys() const { return order_; }
    const LedgerContext& context() const { return ctx_; }

    void append_reveal(RevealRecord rec) { reveals_.push_back(std::move(rec)); }
    const std::vector<RevealRecord>& reveals() const { return reveals_; }

    // Line-delimited export: one hex-encoded canonical tag per line, reveal
    // records appended to the same stream.
    std::string export_lines() const;

private:
    LedgerContext ctx_;
    std::map<Hash32, AuditTag> records_;
    std::vector<Hash32> order_;
    std::set<Hash32> nullifiers_;
    std::vector<RevealRecord> reveals_;
};

bool verify_tag(const AuditTag& tag, const LedgerContext& ctx);

}  // namespace veilaudit
