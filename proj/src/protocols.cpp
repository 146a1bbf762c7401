#include "veilaudit/protocols.hpp"

#include <algorithm>

namespace veilaudit {

MasterIdentity MasterIdentity::generate(SeededRng& rng) {
    MasterIdentity u;
    u.sk_master = rng.nonzero_scalar();
    auto salt = to_bytes("id");
    u.x = kdf_derive(u.sk_master, salt);
    u.pk_id = mul_base(u.x);
    u.wallet_pk = mul_base(u.sk_master);
    u.funding_addr = derive_address(u.wallet_pk);
    return u;
}

AnonSession derive_session(const MasterIdentity& user, SeededRng& rng) {
    AnonSession s;
    s.salt_addr = rng.bytes(16);
    s.sk_anon = kdf_derive(user.sk_master, s.salt_addr);
    s.pk_anon = mul_base(s.sk_anon);
    s.addr_anon = derive_address(s.pk_anon);
    s.nonce_sess = rng.bytes(16);
    return s;
}

BundleWithWitness make_bundle(const MasterIdentity& user, const GroupElement& tpk,
                              const GroupElement& apk, SeededRng& rng) {
    BundleWithWitness out;
    out.witness.x = user.x;
    out.witness.r = rng.nonzero_scalar();  // fresh per tag, never reused
    out.witness.k = rng.nonzero_scalar();
    out.witness.s = rng.nonzero_scalar();
    out.bundle.com = commit(user.x, out.witness.r);
    out.bundle.uid = encrypt_uid(tpk, user.pk_id, out.witness.k);
    out.bundle.ct_link = encrypt_link(apk, user.x, out.witness.s);
    LinkStatement st = statement_for(out.bundle, tpk, apk);
    out.bundle.pi_link = prove_link(out.witness, st, rng);
    return out;
}

LinkStatement statement_for(const PartyBundle& bundle, const GroupElement& tpk,
                            const GroupElement& apk) {
    return LinkStatement{bundle.com,        bundle.uid.c1,     bundle.uid.c2,
                         bundle.ct_link.c1, bundle.ct_link.c2, tpk,
                         apk};
}

void SimEnv::advance(std::uint64_t to_ms) {
    // Event times: every block boundary of every chain in (now, to].
    std::vector<std::uint64_t> events;
    for (const auto& [cid, chain] : chains) {
        std::uint64_t step = chain.block_interval_ms();
        std::uint64_t first = (now_ms / step + 1) * step;
        for (std::uint64_t t = first; t <= to_ms; t += step) events.push_back(t);
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    for (std::uint64_t t : events) {
        for (auto& [cid, chain] : chains) chain.produce_until(t);
        bridge.step(chains, t);
    }
    now_ms = std::max(now_ms, to_ms);
}

SimChain& SimEnv::chain(const std::string& cid) {
    auto it = chains.find(cid);
    if (it == chains.end()) throw UnknownChain{};
    return it->second;
}

SimEnv make_env(const EnvConfig& cfg, SeededRng& rng) {
    auto relayer_rng = rng.fork("relayers");
    auto committee_rng = rng.fork("committee");
    auto auditor_rng = rng.fork("auditor");

    RelayerSet relayers = RelayerSet::generate(cfg.t_relay, cfg.n_relay, relayer_rng);
    DealerOutput dealer = keygen(cfg.committee_t, cfg.committee_n, committee_rng);
    EtKeypair et = et_keygen(auditor_rng);

    LedgerContext ctx;
    ctx.relayer_publics = relayers.publics;
    ctx.t_relay = cfg.t_relay;
    ctx.tpk = dealer.keyset.tpk;
    ctx.apk = et.apk;

    SimEnv env{std::map<std::string, SimChain>{},
               std::map<std::string, EscrowContract>{},
               Bridge(std::move(relayers), cfg.relay_delay_ms),
               AuditLedger(std::move(ctx)),
               dealer.keyset,
               dealer.shares,
               et,
               cfg.bridge_depth};
    for (const auto& c : cfg.chains) {
        env.chains.emplace(c.chain_id, SimChain(c.chain_id, c.block_interval_ms,
                                                c.finality_depth));
    }
    for (auto& [cid, chain] : env.chains) env.escrows.emplace(cid, EscrowContract(chain));
    return env;
}

AipResult aip_run(const MasterIdentity& user, SimEnv& env, const std::string& cid,
                  std::int64_t amount, SeededRng& rng) {
    SimChain& chain = env.chain(cid);
    if (chain.balance(user.funding_addr) < amount) throw InsufficientFunds{};

    AipResult out;
    out.session = derive_session(user, rng);
    out.deposit_id = env.next_deposit_id++;

    EscrowContract& esc = env.escrows.at(cid);
    esc.deposit(out.deposit_id, user.funding_addr, amount);
    ControlProof proof = prove_ctrl(out.session.sk_anon, out.session.addr_anon,
                                    out.session.nonce_sess);
    esc.release(out.deposit_id, proof, out.session.nonce_sess, out.session.addr_anon);

    out.bundle = make_bundle(user, env.keyset.tpk, env.et.apk, rng);
    return out;
}

AuditTag build_tag(const SimEnv& env, std::size_t msg_handle, const PartyBundle& bundle_a,
                   const PartyBundle& bundle_b) {
    const BridgeMessage& msg = env.bridge.message(msg_handle);
    AuditTag tag;
    tag.core.cid_src = msg.cid_src;
    tag.core.txid_src = msg.txid_src;
    tag.core.cid_dst = msg.cid_dst;
    tag.core.txid_dst = msg.txid_dst;
    tag.core.msg_id = msg.msg_id;
    tag.core.ts = msg.delivered_ms;
    tag.exec.bridge_nonce = msg.bridge_nonce;
    tag.exec.required_depth = msg.required_depth;
    tag.exec.attestations = msg.attestations;
    tag.exec.nullifier = compute_nullifier(msg.txid_src, msg.bridge_nonce, msg.cid_src,
                                           msg.cid_dst);
    tag.party_a = bundle_a;
    tag.party_b = bundle_b;
    return tag;
}

AppendResult aud_build_and_submit(SimEnv& env, std::size_t msg_handle,
                                  const PartyBundle& bundle_a, const PartyBundle& bundle_b) {
    const BridgeMessage& msg = env.bridge.message(msg_handle);
    if (!msg.delivered) return {AppendStatus::BadExecAttestation, {}};
    return env.ledger.append(build_tag(env, msg_handle, bundle_a, bundle_b));
}

std::optional<std::vector<GroupElement>> irp_run(const RevealCase& reveal_case, SimEnv& env,
                                                 SeededRng& rng) {
    std::vector<const AuditTag*> tags;
    for (const auto& key : reveal_case.tags) {
        const AuditTag* t = env.ledger.find(key);
        if (!t) throw UnknownTag{};
        tags.push_back(t);
    }
    if (reveal_case.approvals.size() < env.keyset.t) return std::nullopt;

    std::vector<const AuthorityShare*> approving_shares;
    for (const auto& share : env.shares) {
        if (reveal_case.approvals.count(share.index)) approving_shares.push_back(&share);
    }

    std::vector<GroupElement> revealed;
    std::set<Bytes> seen_uids;
    for (const AuditTag* tag : tags) {
        // The case's cluster evidence names the initiating party; party A's
        // capsule carries that identity.
        const UidCiphertext& uid = tag->party_a.uid;
        Bytes uid_bytes = uid.c1.encode();
        auto c2 = uid.c2.encode();
        uid_bytes.insert(uid_bytes.end(), c2.begin(), c2.end());
        if (!seen_uids.insert(uid_bytes).second) continue;

        std::vector<DecryptionShare> dshares;
        for (const AuthorityShare* share : approving_shares) {
            if (dshares.size() == env.keyset.t) break;
            dshares.push_back(partial_decrypt(env.keyset, *share, uid, rng));
        }
        GroupElement pk = combine(env.keyset, uid, dshares);
        if (std::find(revealed.begin(), revealed.end(), pk) == revealed.end())
            revealed.push_back(pk);
    }

    RevealRecord rec;
    rec.case_id = reveal_case.case_id;
    rec.tag_keys = reveal_case.tags;
    rec.approving.assign(reveal_case.approvals.begin(), reveal_case.approvals.end());
    rec.ts = env.now_ms;
    rec.revealed = revealed;
    env.ledger.append_reveal(std::move(rec));
    return revealed;
}

TransferOutcome run_transfer(SimEnv& env, const MasterIdentity& sender,
                             const MasterIdentity& receiver, const std::string& cid_src,
                             const std::string& cid_dst, std::int64_t amount, SeededRng& rng) {
    AipResult aip_a = aip_run(sender, env, cid_src, amount, rng);
    AipResult aip_b = aip_run(receiver, env, cid_dst, 0, rng);

    // Source leg: anonymous address pays into the bridge lane.
    Transaction src_tx;
    src_tx.sender = aip_a.session.addr_anon;
    src_tx.dest = aip_b.session.addr_anon;
    src_tx.amount = amount;
    src_tx.nonce = rng.next_u64();
    SimChain& src = env.chain(cid_src);
    std::uint64_t submit_ms = env.now_ms;
    Hash32 txid_src = src.submit_tx(src_tx, submit_ms);

    std::uint32_t depth = env.bridge_depth;
    std::size_t handle = env.bridge.relay(cid_src, txid_src, cid_dst, {}, depth);

    // Closed loop: advance until the message is delivered and the dst leg is mined.
    std::uint64_t step = env.chain(cid_src).block_interval_ms();
    std::uint64_t guard = env.now_ms + (depth + 4) * step * 4 + 10000;
    while (!env.bridge.message(handle).delivered && env.now_ms < guard)
        env.advance(env.now_ms + step);
    if (env.bridge.message(handle).delivered) {
        std::uint64_t dst_step = env.chain(cid_dst).block_interval_ms();
        env.advance(env.now_ms + dst_step);
    }

    TransferOutcome out;
    out.msg_handle = handle;
    const TxRecord* rec = src.find_tx(txid_src);
    out.src_commit_ms = rec && rec->included ? rec->inclusion_ms : submit_ms;
    out.append = aud_build_and_submit(env, handle, aip_a.bundle.bundle, aip_b.bundle.bundle);
    out.tag_commit_ms = env.now_ms;
    return out;
}

}  // namespace veilaudit
