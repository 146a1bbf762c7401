#include "doctest.h"
#include "veilaudit/chainsim.hpp"

using namespace veilaudit;

namespace {

Transaction make_tx(SeededRng& rng, const Address& from, const Address& to,
                    std::int64_t amount) {
    Transaction tx;
    tx.sender = from;
    tx.dest = to;
    tx.amount = amount;
    tx.nonce = rng.next_u64();
    return tx;
}

Address addr_from(SeededRng& rng) { return derive_address(mul_base(rng.nonzero_scalar())); }

}  // namespace

TEST_SUITE("chainsim") {

TEST_CASE("inclusion latency lies in (0, T] and respects block boundaries") {
    SeededRng rng(501, "latency");
    SimChain chain("c", 500, 1);
    Address a = addr_from(rng), b = addr_from(rng);
    chain.mint(a, 1'000'000);
    std::vector<std::pair<Hash32, std::uint64_t>> submitted;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t at = rng.uniform(30'000);
        submitted.emplace_back(chain.submit_tx(make_tx(rng, a, b, 1), at), at);
    }
    chain.produce_until(31'000);
    for (const auto& [txid, at] : submitted) {
        const TxRecord* rec = chain.find_tx(txid);
        REQUIRE(rec != nullptr);
        REQUIRE(rec->included);
        std::uint64_t latency = rec->inclusion_ms - at;
        CHECK(latency > 0);
        CHECK(latency <= 500);
        CHECK(rec->inclusion_ms % 500 == 0);  // inclusion only at block boundaries
    }
}

TEST_CASE("confirmations and finality count from the inclusion block") {
    SeededRng rng(502, "conf");
    SimChain chain("c", 100, 3);
    Address a = addr_from(rng);
    chain.mint(a, 10);
    Hash32 txid = chain.submit_tx(make_tx(rng, a, a, 1), 50);
    CHECK(chain.confirmations(txid) == 0);
    chain.produce_until(100);
    CHECK(chain.confirmations(txid) == 1);
    CHECK_FALSE(chain.finalized(txid));
    chain.produce_until(300);
    CHECK(chain.confirmations(txid) == 3);
    CHECK_FALSE(chain.finalized(txid));  // depth counts blocks built on top
    chain.produce_until(400);
    CHECK(chain.finalized(txid));
}

TEST_CASE("value is conserved across arbitrary transfer schedules") {
    SeededRng rng(503, "conserve");
    SimChain chain("c", 250, 1);
    std::vector<Address> addrs;
    for (int i = 0; i < 5; ++i) {
        addrs.push_back(addr_from(rng));
        chain.mint(addrs.back(), 1000);
    }
    for (int i = 0; i < 300; ++i) {
        const Address& from = addrs[rng.uniform(addrs.size())];
        const Address& to = addrs[rng.uniform(addrs.size())];
        chain.submit_tx(make_tx(rng, from, to, static_cast<std::int64_t>(rng.uniform(2000))),
                        rng.uniform(10'000));
    }
    chain.produce_until(11'000);
    CHECK(chain.total_balances() == chain.total_minted());
}

TEST_CASE("identical submissions are idempotent") {
    SeededRng rng(504, "idem");
    SimChain chain("c", 100, 1);
    Address a = addr_from(rng);
    chain.mint(a, 100);
    Transaction tx = make_tx(rng, a, a, 1);
    Hash32 id1 = chain.submit_tx(tx, 10);
    Hash32 id2 = chain.submit_tx(tx, 20);  // same canonical tx, same txid
    CHECK(id1 == id2);
    chain.produce_until(1000);
    CHECK(chain.total_balances() == 100);
}

TEST_CASE("deterministic txids from canonical bytes") {
    SeededRng rng(505, "txid");
    Transaction tx = make_tx(rng, addr_from(rng), addr_from(rng), 42);
    CHECK(compute_txid(tx) == compute_txid(tx));
    Transaction tx2 = tx;
    tx2.amount += 1;
    CHECK_FALSE(compute_txid(tx) == compute_txid(tx2));
}

TEST_CASE("escrow release is gated by the control proof") {
    SeededRng rng(506, "escrow");
    SimChain chain("c", 100, 1);
    EscrowContract escrow(chain);
    Scalar sk = rng.nonzero_scalar();
    GroupElement pk = mul_base(sk);
    Address owner = derive_address(pk);
    Address funder = addr_from(rng);
    chain.mint(funder, 1000);
    Bytes nonce = rng.bytes(16);

    CHECK_THROWS_AS(escrow.deposit(1, funder, 2000), InsufficientFunds);
    escrow.deposit(1, funder, 600);
    CHECK(escrow.held_total() == 600);
    CHECK(chain.balance(funder) == 400);

    ControlProof proof = prove_ctrl(sk, owner, nonce);
    ControlProof bad = proof;
    bad.sig.response = bad.sig.response + Scalar::one();
    CHECK_THROWS_AS(escrow.release(1, bad, nonce, owner), ProofRejected);
    CHECK_THROWS_AS(escrow.release(2, proof, nonce, owner), UnknownDeposit);
    escrow.release(1, proof, nonce, owner);
    CHECK(chain.balance(owner) == 600);
    CHECK(escrow.held_total() == 0);
    CHECK_THROWS_AS(escrow.release(1, proof, nonce, owner), AlreadyReleased);
    CHECK(chain.total_balances() == chain.total_minted());
}

TEST_CASE("bridge delivers only at depth, attests validly, and dedups") {
    SeededRng rng(507, "bridge");
    std::map<std::string, SimChain> chains;
    chains.emplace("src", SimChain("src", 500, 1));
    chains.emplace("dst", SimChain("dst", 500, 1));
    RelayerSet relayers = RelayerSet::generate(3, 4, rng);
    Bridge bridge(relayers, 0);

    Address a = addr_from(rng);
    chains.at("src").mint(a, 100);
    Hash32 txid = chains.at("src").submit_tx(make_tx(rng, a, a, 1), 10);

    std::size_t h = bridge.relay("src", txid, "dst", rng.bytes(32), 4);
    bridge.step(chains, 0);
    CHECK_FALSE(bridge.message(h).delivered);

    for (std::uint64_t t = 500; t <= 1500; t += 500) {
        chains.at("src").produce_until(t);
        chains.at("dst").produce_until(t);
        bridge.step(chains, t);
        CHECK_FALSE(bridge.message(h).delivered);  // < 4 confirmations so far
    }
    chains.at("src").produce_until(2000);
    chains.at("dst").produce_until(2000);
    bridge.step(chains, 2000);
    REQUIRE(bridge.message(h).delivered);

    // the attested message verifies against the registered relayer keys
    const BridgeMessage& msg = bridge.message(h);
    TagCore core{"src", msg.txid_src, "dst", msg.txid_dst, msg.msg_id, msg.delivered_ms};
    ExecAttestation exec{msg.bridge_nonce, msg.required_depth, msg.attestations,
                         compute_nullifier(msg.txid_src, msg.bridge_nonce, "src", "dst")};
    CHECK(verify_attestations(core, exec, relayers.publics, 3));
    CHECK_FALSE(verify_attestations(core, exec, relayers.publics, 5));

    CHECK_FALSE(bridge.redeliver(h, chains, 2500));  // delivered exactly once
}

TEST_CASE("exec message binds every core field") {
    SeededRng rng(508, "exec-msg");
    TagCore core{"src", {}, "dst", {}, {}, 777};
    rng.fill(core.txid_src);
    rng.fill(core.txid_dst);
    rng.fill(core.msg_id);
    Bytes base = exec_message(core, 5, 2);
    TagCore c2 = core;
    c2.txid_src[0] ^= 1;
    CHECK_FALSE(exec_message(c2, 5, 2) == base);
    c2 = core;
    c2.cid_dst = "dsx";
    CHECK_FALSE(exec_message(c2, 5, 2) == base);
    CHECK_FALSE(exec_message(core, 6, 2) == base);
    CHECK_FALSE(exec_message(core, 5, 3) == base);
}

}  // TEST_SUITE
