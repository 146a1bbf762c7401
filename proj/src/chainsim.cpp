#include "veilaudit/chainsim.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace veilaudit {

// --- canonical serialization helpers ---------------------------------------

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_str(Bytes& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void put_raw(Bytes& out, std::span<const std::uint8_t> b) {
    out.insert(out.end(), b.begin(), b.end());
}

void put_var(Bytes& out, std::span<const std::uint8_t> b) {
    put_u32(out, static_cast<std::uint32_t>(b.size()));
    put_raw(out, b);
}

struct Reader {
    std::span<const std::uint8_t> data;
    std::size_t off = 0;
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(data[off + i]) << (8 * i);
        off += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(data[off + i]) << (8 * i);
        off += 8;
        return v;
    }
    std::string str() {
        auto n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data.data() + off), n);
        off += n;
        return s;
    }
    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto s = data.subspan(off, n);
        off += n;
        return s;
    }
    Bytes var() {
        auto n = u32();
        auto s = raw(n);
        return Bytes(s.begin(), s.end());
    }
    void need(std::size_t n) const {
        if (off + n > data.size()) throw MalformedEncoding("truncated record");
    }
};

Hash32 read_h32(Reader& r) {
    Hash32 h;
    auto s = r.raw(32);
    std::memcpy(h.data(), s.data(), 32);
    return h;
}

}  // namespace

Bytes to_bytes(const Hash32& h) { return Bytes(h.begin(), h.end()); }

Bytes exec_message(const TagCore& core, std::uint64_t bridge_nonce, std::uint32_t depth) {
    Bytes m;
    m.push_back('E');
    m.push_back('X');
    put_str(m, core.cid_src);
    put_raw(m, core.txid_src);
    put_str(m, core.cid_dst);
    put_raw(m, core.txid_dst);
    put_raw(m, core.msg_id);
    put_u64(m, bridge_nonce);
    put_u32(m, depth);
    return m;
}

Hash32 compute_nullifier(const Hash32& txid_src, std::uint64_t nonce, const std::string& cid_src,
                         const std::string& cid_dst) {
    Bytes b;
    b.push_back('N');
    put_raw(b, txid_src);
    put_u64(b, nonce);
    put_str(b, cid_src);
    put_str(b, cid_dst);
    return digest32(domains::kGlobal, b);
}

Hash32 compute_dedup_key(const std::string& cid_dst, const Hash32& txid_dst,
                         const Hash32& msg_id) {
    Bytes b;
    b.push_back('K');
    put_str(b, cid_dst);
    put_raw(b, txid_dst);
    put_raw(b, msg_id);
    return digest32(domains::kGlobal, b);
}

namespace {

void put_bundle(Bytes& out, const PartyBundle& p) {
    put_raw(out, p.uid.c1.encode());
    put_raw(out, p.uid.c2.encode());
    put_raw(out, p.com.C.encode());
    put_raw(out, p.ct_link.c1.encode());
    put_raw(out, p.ct_link.c2.encode());
    put_var(out, p.pi_link.serialize());
}

PartyBundle read_bundle(Reader& r) {
    PartyBundle p;
    p.uid.c1 = GroupElement::decode(r.raw(32));
    p.uid.c2 = GroupElement::decode(r.raw(32));
    p.com.C = GroupElement::decode(r.raw(32));
    p.ct_link.c1 = GroupElement::decode(r.raw(32));
    p.ct_link.c2 = GroupElement::decode(r.raw(32));
    p.pi_link = LinkProof::deserialize(r.var());
    return p;
}

}  // namespace

Bytes AuditTag::serialize() const {
    Bytes out;
    out.push_back(0x01);
    put_str(out, core.cid_src);
    put_raw(out, core.txid_src);
    put_str(out, core.cid_dst);
    put_raw(out, core.txid_dst);
    put_raw(out, core.msg_id);
    put_u64(out, core.ts);
    put_u64(out, exec.bridge_nonce);
    put_u32(out, exec.required_depth);
    put_u32(out, static_cast<std::uint32_t>(exec.attestations.size()));
    for (const auto& [idx, sig] : exec.attestations) {
        put_u32(out, idx);
        put_raw(out, sig.commitment_hash.encode());
        put_raw(out, sig.response.encode());
    }
    put_raw(out, exec.nullifier);
    put_bundle(out, party_a);
    put_bundle(out, party_b);
    return out;
}

AuditTag AuditTag::deserialize(std::span<const std::uint8_t> bytes) {
    Reader r{bytes};
    if (r.raw(1)[0] != 0x01) throw MalformedEncoding("bad tag version");
    AuditTag t;
    t.core.cid_src = r.str();
    t.core.txid_src = read_h32(r);
    t.core.cid_dst = r.str();
    t.core.txid_dst = read_h32(r);
    t.core.msg_id = read_h32(r);
    t.core.ts = r.u64();
    t.exec.bridge_nonce = r.u64();
    t.exec.required_depth = r.u32();
    auto n_att = r.u32();
    for (std::uint32_t i = 0; i < n_att; ++i) {
        std::uint32_t idx = r.u32();
        SchnorrSignature sig;
        sig.commitment_hash = Scalar::decode(r.raw(32));
        sig.response = Scalar::decode(r.raw(32));
        t.exec.attestations.emplace_back(idx, sig);
    }
    t.exec.nullifier = read_h32(r);
    t.party_a = read_bundle(r);
    t.party_b = read_bundle(r);
    if (r.off != bytes.size()) throw MalformedEncoding("trailing bytes in tag");
    return t;
}

Hash32 tag_hash(const AuditTag& tag) {
    return digest32(domains::kGlobal, tag.serialize());
}

// --- SimChain ----------------------------------------------------------------

Bytes Transaction::canonical_bytes() const {
    Bytes out;
    out.push_back('T');
    out.push_back('X');
    put_raw(out, sender.bytes);
    put_raw(out, dest.bytes);
    put_u64(out, static_cast<std::uint64_t>(amount));
    put_u64(out, nonce);
    put_var(out, payload);
    return out;
}

Hash32 compute_txid(const Transaction& tx) {
    return digest32(domains::kGlobal, tx.canonical_bytes());
}

SimChain::SimChain(std::string chain_id, std::uint64_t block_interval_ms,
                   std::uint64_t finality_depth)
    : chain_id_(std::move(chain_id)),
      block_interval_ms_(block_interval_ms),
      finality_depth_(finality_depth) {
    if (block_interval_ms_ == 0) throw Error("block interval must be positive");
}

void SimChain::mint(const Address& addr, std::int64_t amount) {
    balances_[addr] += amount;
    total_minted_ += amount;
}

std::int64_t SimChain::balance(const Address& addr) const {
    auto it = balances_.find(addr);
    return it == balances_.end() ? 0 : it->second;
}

std::int64_t SimChain::total_balances() const {
    std::int64_t sum = 0;
    for (const auto& [addr, bal] : balances_) sum += bal;
    return sum;
}

Hash32 SimChain::submit_tx(const Transaction& tx, std::uint64_t at_ms) {
    Hash32 txid = compute_txid(tx);
    if (txs_.count(txid)) return txid;  // identical resubmission is a no-op
    TxRecord rec;
    rec.tx = tx;
    rec.submit_ms = at_ms;
    txs_.emplace(txid, std::move(rec));
    mempool_.push_back(txid);
    return txid;
}

void SimChain::produce_until(std::uint64_t now_ms) {
    while ((height_ + 1) * block_interval_ms_ <= now_ms) {
        std::uint64_t block_time = (height_ + 1) * block_interval_ms_;
        ++height_;
        Block blk;
        blk.height = height_;
        blk.time_ms = block_time;
        std::deque<Hash32> keep;
        for (const auto& txid : mempool_) {
            auto& rec = txs_.at(txid);
            if (rec.submit_ms >= block_time) {
                keep.push_back(txid);
                continue;
            }
            // Value transfer applies on inclusion; unfunded txs stay data-only.
            if (rec.tx.amount > 0 && balances_[rec.tx.sender] >= rec.tx.amount) {
                balances_[rec.tx.sender] -= rec.tx.amount;
                balances_[rec.tx.dest] += rec.tx.amount;
            }
            rec.included = true;
            rec.inclusion_height = height_;
            rec.inclusion_ms = block_time;
            blk.txids.push_back(txid);
        }
        mempool_ = std::move(keep);
        blocks_.push_back(std::move(blk));
    }
}

const TxRecord* SimChain::find_tx(const Hash32& txid) const {
    auto it = txs_.find(txid);
    return it == txs_.end() ? nullptr : &it->second;
}

std::uint64_t SimChain::confirmations(const Hash32& txid) const {
    const TxRecord* rec = find_tx(txid);
    if (!rec || !rec->included) return 0;
    return height_ - rec->inclusion_height + 1;
}

bool SimChain::finalized(const Hash32& txid) const {
    const TxRecord* rec = find_tx(txid);
    if (!rec || !rec->included) return false;
    return height_ - rec->inclusion_height >= finality_depth_;
}

// --- EscrowContract ----------------------------------------------------------

void EscrowContract::deposit(std::uint64_t deposit_id, const Address& from, std::int64_t amount) {
    if (deposits_.count(deposit_id)) throw Error("deposit id already used");
    if (chain_.balance(from) < amount) throw InsufficientFunds{};
    chain_.balances_[from] -= amount;
    deposits_[deposit_id] = Deposit{amount, from, false};
}

void EscrowContract::release(std::uint64_t deposit_id, const ControlProof& proof,
                             std::span<const std::uint8_t> nonce_sess, const Address& dest) {
    auto it = deposits_.find(deposit_id);
    if (it == deposits_.end()) throw UnknownDeposit{};
    if (it->second.released) throw AlreadyReleased{};
    if (!verify_ctrl(dest, nonce_sess, proof)) throw ProofRejected{};
    it->second.released = true;
    chain_.balances_[dest] += it->second.amount;
}

std::int64_t EscrowContract::held_total() const {
    std::int64_t sum = 0;
    for (const auto& [id, d] : deposits_)
        if (!d.released) sum += d.amount;
    return sum;
}

// --- Bridge -------------------------------------------------------------------

RelayerSet RelayerSet::generate(std::uint32_t t_relay, std::uint32_t n_relay, SeededRng& rng) {
    RelayerSet set;
    set.t_relay = t_relay;
    for (std::uint32_t i = 0; i < n_relay; ++i) {
        Scalar sk = rng.nonzero_scalar();
        set.secrets.push_back(sk);
        set.publics.push_back(mul_base(sk));
    }
    return set;
}

bool verify_attestations(const TagCore& core, const ExecAttestation& exec,
                         const std::vector<GroupElement>& relayer_publics,
                         std::uint32_t t_relay) {
    Bytes msg = exec_message(core, exec.bridge_nonce, exec.required_depth);
    std::set<std::uint32_t> valid;
    for (const auto& [idx, sig] : exec.attestations) {
        if (idx >= relayer_publics.size()) continue;
        if (schnorr_verify(relayer_publics[idx], domains::kExec, msg, sig)) valid.insert(idx);
    }
    if (valid.size() < t_relay) return false;
    if (exec.nullifier != compute_nullifier(core.txid_src, exec.bridge_nonce, core.cid_src,
                                            core.cid_dst))
        return false;
    return true;
}

std::size_t Bridge::relay(const std::string& cid_src, const Hash32& txid_src,
                          const std::string& cid_dst, Bytes payload, std::uint32_t depth) {
    BridgeMessage msg;
    msg.cid_src = cid_src;
    msg.txid_src = txid_src;
    msg.cid_dst = cid_dst;
    msg.payload = std::move(payload);
    msg.required_depth = depth;
    msg.bridge_nonce = next_nonce_++;
    Bytes id_input;
    id_input.push_back('M');
    put_str(id_input, cid_src);
    put_raw(id_input, txid_src);
    put_str(id_input, cid_dst);
    put_u64(id_input, msg.bridge_nonce);
    msg.msg_id = digest32(domains::kGlobal, id_input);
    messages_.push_back(std::move(msg));
    return messages_.size() - 1;
}

bool Bridge::deliver(BridgeMessage& msg, std::map<std::string, SimChain>& chains,
                     std::uint64_t now_ms) {
    auto dst_it = chains.find(msg.cid_dst);
    if (dst_it == chains.end()) throw UnknownChain{};
    auto& dedup = delivered_per_dst_[msg.cid_dst];
    if (!dedup.insert(msg.msg_id).second) return false;  // msg_id accepted at most once

    // Attest: each relayer signs the canonical exec message. The destination
    // txid is not known yet, so relayers sign over the delivery payload core
    // once the destination tx is formed; here delivery is the dst tx itself.
    Transaction delivery;
    delivery.nonce = msg.bridge_nonce;
    delivery.payload = msg.payload;
    Bytes marker;
    marker.push_back('D');
    put_raw(marker, msg.msg_id);
    delivery.payload.insert(delivery.payload.end(), marker.begin(), marker.end());
    msg.txid_dst = dst_it->second.submit_tx(delivery, now_ms);

    TagCore core;
    core.cid_src = msg.cid_src;
    core.txid_src = msg.txid_src;
    core.cid_dst = msg.cid_dst;
    core.txid_dst = msg.txid_dst;
    core.msg_id = msg.msg_id;
    Bytes exec_msg = exec_message(core, msg.bridge_nonce, msg.required_depth);
    msg.attestations.clear();
    for (std::uint32_t i = 0; i < relayers_.secrets.size(); ++i) {
        msg.attestations.emplace_back(i,
                                      schnorr_sign(relayers_.secrets[i], domains::kExec, exec_msg));
    }
    msg.delivered = true;
    msg.delivered_ms = now_ms;
    return true;
}

void Bridge::step(std::map<std::string, SimChain>& chains, std::uint64_t now_ms) {
    for (auto& msg : messages_) {
        if (msg.delivered) continue;
        auto src_it = chains.find(msg.cid_src);
        if (src_it == chains.end()) throw UnknownChain{};
        if (src_it->second.confirmations(msg.txid_src) < msg.required_depth) continue;
        auto [it, fresh] = ready_since_.try_emplace(msg.msg_id, now_ms);
        if (now_ms < it->second + relay_delay_ms_) continue;
        deliver(msg, chains, now_ms);
    }
}

bool Bridge::redeliver(std::size_t handle, std::map<std::string, SimChain>& chains,
                       std::uint64_t now_ms) {
    BridgeMessage copy = messages_.at(handle);
    if (!copy.delivered) return false;
    copy.delivered = false;
    return deliver(copy, chains, now_ms);
}

// --- AuditLedger ---------------------------------------------------------------

const char* to_string(AppendStatus s) {
    switch (s) {
        case AppendStatus::Ok: return "ok";
        case AppendStatus::DuplicateKey: return "duplicate-key";
        case AppendStatus::DuplicateNullifier: return "duplicate-nullifier";
        case AppendStatus::BadExecAttestation: return "bad-exec-attestation";
        case AppendStatus::BadLinkProof: return "bad-link-proof";
    }
    return "?";
}

bool verify_tag(const AuditTag& tag, const LedgerContext& ctx) {
    if (!verify_attestations(tag.core, tag.exec, ctx.relayer_publics, ctx.t_relay)) return false;
    if (ctx.finality) {
        if (!ctx.finality(tag.core.cid_src, tag.core.txid_src, tag.exec.required_depth))
            return false;
    }
    for (const PartyBundle* p : {&tag.party_a, &tag.party_b}) {
        LinkStatement st{p->com, p->uid.c1, p->uid.c2, p->ct_link.c1, p->ct_link.c2,
                         ctx.tpk, ctx.apk};
        if (!verify_link(st, p->pi_link)) return false;
    }
    return true;
}

AppendResult AuditLedger::append(const AuditTag& tag) {
    Hash32 k = compute_dedup_key(tag.core.cid_dst, tag.core.txid_dst, tag.core.msg_id);
    if (records_.count(k)) return {AppendStatus::DuplicateKey, k};
    if (!verify_attestations(tag.core, tag.exec, ctx_.relayer_publics, ctx_.t_relay))
        return {AppendStatus::BadExecAttestation, k};
    if (ctx_.finality &&
        !ctx_.finality(tag.core.cid_src, tag.core.txid_src, tag.exec.required_depth))
        return {AppendStatus::BadExecAttestation, k};
    if (nullifiers_.count(tag.exec.nullifier)) return {AppendStatus::DuplicateNullifier, k};
    for (const PartyBundle* p : {&tag.party_a, &tag.party_b}) {
        LinkStatement st{p->com, p->uid.c1, p->uid.c2, p->ct_link.c1, p->ct_link.c2,
                         ctx_.tpk, ctx_.apk};
        if (!verify_link(st, p->pi_link)) return {AppendStatus::BadLinkProof, k};
    }
    records_.emplace(k, tag);
    order_.push_back(k);
    nullifiers_.insert(tag.exec.nullifier);
    return {AppendStatus::Ok, k};
}

const AuditTag* AuditLedger::find(const Hash32& key) const {
    auto it = records_.find(key);
    return it == records_.end() ? nullptr : &it->second;
}

namespace {

std::string hex(std::span<const std::uint8_t> b) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (auto c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 0xf]);
    }
    return s;
}

}  // namespace

std::string AuditLedger::export_lines() const {
    std::ostringstream out;
    for (const auto& k : order_) {
        out << "ATAG " << hex(records_.at(k).serialize()) << "\n";
    }
    for (const auto& rec : reveals_) {
        out << "REVEAL " << hex(rec.case_id) << " ts=" << rec.ts << " approving=";
        for (std::size_t i = 0; i < rec.approving.size(); ++i)
            out << (i ? "," : "") << rec.approving[i];
        out << " tags=";
        for (std::size_t i = 0; i < rec.tag_keys.size(); ++i)
            out << (i ? "," : "") << hex(rec.tag_keys[i]);
        out << " pk=";
        for (std::size_t i = 0; i < rec.revealed.size(); ++i)
            out << (i ? "," : "") << hex(rec.revealed[i].encode());
        out << "\n";
    }
    return out.str();
}

}  // namespace veilaudit
