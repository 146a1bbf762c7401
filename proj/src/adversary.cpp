#include "veilaudit/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace veilaudit {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Wilson 95% score interval for a binomial proportion.
std::pair<double, double> wilson(std::uint64_t wins, std::uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963985;
    double phat = static_cast<double>(wins) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {center - half, center + half};
}

struct Fixture {
    SimEnv env;
    std::vector<MasterIdentity> users;
    std::vector<std::size_t> handles;   // bridge message handles, one per tag
    std::vector<std::uint32_t> owners;  // sender index per committed tag, ledger order
};

Fixture make_fixture(SeededRng& rng, const EnvConfig& cfg, std::size_t n_users,
                     std::size_t n_transfers) {
    auto env_rng = rng.fork("env");
    Fixture fx{make_env(cfg, env_rng), {}, {}, {}};
    auto user_rng = rng.fork("users");
    for (std::size_t i = 0; i < n_users; ++i) {
        fx.users.push_back(MasterIdentity::generate(user_rng));
        for (auto& [cid, chain] : fx.env.chains) chain.mint(fx.users.back().funding_addr, 1'000'000);
    }
    auto wl_rng = rng.fork("workload");
    for (std::size_t i = 0; i < n_transfers; ++i) {
        std::uint32_t a = static_cast<std::uint32_t>(i % n_users);
        std::uint32_t b = static_cast<std::uint32_t>((i + 1) % n_users);
        TransferOutcome res = run_transfer(fx.env, fx.users[a], fx.users[b], "src", "dst", 5, wl_rng);
        if (!res.append.ok()) throw Error("fixture transfer rejected");
        fx.handles.push_back(res.msg_handle);
        fx.owners.push_back(a);
    }
    return fx;
}

Bytes bundle_bytes(const PartyBundle& b) {
    Bytes out;
    auto put = [&out](const Bytes& v) { out.insert(out.end(), v.begin(), v.end()); };
    put(b.uid.c1.encode());
    put(b.uid.c2.encode());
    put(b.com.C.encode());
    put(b.ct_link.c1.encode());
    put(b.ct_link.c2.encode());
    put(b.pi_link.serialize());
    return out;
}

double l1_histogram_distance(const Bytes& a, const Bytes& b) {
    std::array<double, 256> ha{}, hb{};
    for (auto v : a) ha[v] += 1.0 / a.size();
    for (auto v : b) hb[v] += 1.0 / b.size();
    double d = 0;
    for (int i = 0; i < 256; ++i) d += std::abs(ha[i] - hb[i]);
    return d;
}

}  // namespace

std::vector<AttackOutcome> attack_forgery(std::uint64_t trials, std::uint64_t seed) {
    SeededRng rng(seed, "attack-forgery");
    Fixture fx = make_fixture(rng, EnvConfig{}, 3, 4);
    const LedgerContext& ctx = fx.env.ledger.context();

    // keys the adversary actually controls
    auto adv_rng = rng.fork("adversary");
    RelayerSet rogue = RelayerSet::generate(ctx.t_relay, static_cast<std::uint32_t>(
                                                             ctx.relayer_publics.size()),
                                            adv_rng);
    MasterIdentity adv_id = MasterIdentity::generate(adv_rng);

    const AuditTag honest = *fx.env.ledger.find(fx.env.ledger.keys().front());

    AttackOutcome forgery{"tag-forgery", 0, 0, {}};
    for (std::uint64_t i = 0; i < trials; ++i) {
        ++forgery.attempts;
        AuditTag tag = honest;
        switch (i % 3) {
            case 0: {
                // fabrication: fresh core, attested only by rogue keys
                adv_rng.fill(tag.core.txid_src);
                adv_rng.fill(tag.core.txid_dst);
                adv_rng.fill(tag.core.msg_id);
                tag.core.ts = adv_rng.next_u64() % 1'000'000;
                tag.exec.bridge_nonce = adv_rng.next_u64();
                tag.exec.nullifier = compute_nullifier(tag.core.txid_src, tag.exec.bridge_nonce,
                                                       tag.core.cid_src, tag.core.cid_dst);
                Bytes msg = exec_message(tag.core, tag.exec.bridge_nonce,
                                         tag.exec.required_depth);
                tag.exec.attestations.clear();
                for (std::uint32_t r = 0; r < ctx.t_relay; ++r)
                    tag.exec.attestations.emplace_back(
                        r, schnorr_sign(rogue.secrets[r], domains::kExec, msg));
                auto ba = make_bundle(adv_id, ctx.tpk, ctx.apk, adv_rng);
                auto bb = make_bundle(adv_id, ctx.tpk, ctx.apk, adv_rng);
                tag.party_a = ba.bundle;
                tag.party_b = bb.bundle;
                break;
            }
            case 1: {
                // transplant: honest attestations grafted onto an altered core
                adv_rng.fill(tag.core.txid_dst);
                adv_rng.fill(tag.core.msg_id);
                tag.exec.nullifier = compute_nullifier(tag.core.txid_src, tag.exec.bridge_nonce,
                                                       tag.core.cid_src, tag.core.cid_dst);
                break;
            }
            case 2: {
                // random single-byte mutation of the canonical encoding
                Bytes enc = honest.serialize();
                std::size_t pos = adv_rng.uniform(enc.size());
                std::uint8_t delta = static_cast<std::uint8_t>(1 + adv_rng.uniform(255));
                enc[pos] ^= delta;
                try {
                    tag = AuditTag::deserialize(enc);
                } catch (const Error&) {
                    continue;  // rejected at parse; attempt already counted
                }
                break;
            }
        }
        if (fx.env.ledger.append(tag).ok()) ++forgery.accepted;
    }

    AttackOutcome imp{"impersonation", 0, 0, {}};
    auto victim_rng = rng.fork("victim");
    AnonSession victim = derive_session(fx.users[0], victim_rng);
    // a live deposit the adversary tries to steal
    std::uint64_t deposit_id = fx.env.next_deposit_id++;
    fx.env.escrows.at("src").deposit(deposit_id, fx.users[0].funding_addr, 100);
    Scalar sk_adv = adv_rng.nonzero_scalar();
    GroupElement pk_adv = mul_base(sk_adv);
    Address addr_adv = derive_address(pk_adv);
    for (std::uint64_t i = 0; i < trials; ++i) {
        ++imp.attempts;
        Bytes msg = victim.addr_anon.encode();
        msg.insert(msg.end(), victim.nonce_sess.begin(), victim.nonce_sess.end());
        ControlProof proof;
        switch (i % 3) {
            case 0:  // own key, victim's address
                proof = {pk_adv, schnorr_sign(sk_adv, domains::kCtrl, msg)};
                break;
            case 1:  // victim's key, own signature
                proof = {victim.pk_anon, schnorr_sign(sk_adv, domains::kCtrl, msg)};
                break;
            case 2: {  // valid self-proof presented for the victim's address
                Bytes own = addr_adv.encode();
                own.insert(own.end(), victim.nonce_sess.begin(), victim.nonce_sess.end());
                proof = {pk_adv, schnorr_sign(sk_adv, domains::kCtrl, own)};
                break;
            }
        }
        if (verify_ctrl(victim.addr_anon, victim.nonce_sess, proof)) ++imp.accepted;
        try {
            fx.env.escrows.at("src").release(deposit_id, proof, victim.nonce_sess,
                                             victim.addr_anon);
            ++imp.accepted;
        } catch (const Error&) {
        }
    }
    return {std::move(forgery), std::move(imp)};
}

AttackOutcome attack_replay(std::uint64_t trials, std::uint64_t seed) {
    SeededRng rng(seed, "attack-replay");
    Fixture fx = make_fixture(rng, EnvConfig{}, 3, 4);
    auto adv_rng = rng.fork("adversary");

    AttackOutcome out{"replay", 0, 0, {}};
    const auto& keys = fx.env.ledger.keys();
    for (std::uint64_t i = 0; i < trials; ++i) {
        ++out.attempts;
        const AuditTag& honest = *fx.env.ledger.find(keys[i % keys.size()]);
        switch (i % 4) {
            case 0: {  // verbatim resubmission
                if (fx.env.ledger.append(honest).ok()) ++out.accepted;
                break;
            }
            case 1: {  // timestamp-mutated copy
                AuditTag tag = honest;
                tag.core.ts += 1 + adv_rng.uniform(1000);
                if (fx.env.ledger.append(tag).ok()) ++out.accepted;
                break;
            }
            case 2: {  // rerouted to the other chain
                AuditTag tag = honest;
                std::swap(tag.core.cid_src, tag.core.cid_dst);
                std::swap(tag.core.txid_src, tag.core.txid_dst);
                if (fx.env.ledger.append(tag).ok()) ++out.accepted;
                break;
            }
            case 3: {  // bridge-level redelivery of a settled message
                std::size_t h = fx.handles[i % fx.handles.size()];
                if (fx.env.bridge.redeliver(h, fx.env.chains, fx.env.now_ms)) ++out.accepted;
                break;
            }
        }
    }
    return out;
}

std::vector<AttackOutcome> game_aol(std::uint64_t trials, std::uint64_t seed) {
    SeededRng rng(seed, "aol-game");
    auto key_rng = rng.fork("keys");
    DealerOutput committee = keygen(2, 3, key_rng);
    EtKeypair et = et_keygen(key_rng);
    auto id_rng = rng.fork("identities");
    MasterIdentity u0 = MasterIdentity::generate(id_rng);
    MasterIdentity u1 = MasterIdentity::generate(id_rng);

    enum Arm { FieldEq, ByteHist, TsDelta, Metadata, Trapdoor, kArms };
    const char* names[kArms] = {"aol-field-equality", "aol-byte-histogram",
                                "aol-timestamp-delta", "aol-metadata", "aol-trapdoor"};
    std::array<std::uint64_t, kArms> wins{};

    auto game_rng = rng.fork("game");
    double prev_dist = 0.5;  // adaptive threshold for the histogram arm
    for (std::uint64_t i = 0; i < trials; ++i) {
        bool b = game_rng.bernoulli(0.5);  // 1: both tags from the same owner
        auto w1 = make_bundle(u0, committee.keyset.tpk, et.apk, game_rng);
        auto w2 = make_bundle(b ? u0 : u1, committee.keyset.tpk, et.apk, game_rng);
        Bytes e1 = bundle_bytes(w1.bundle);
        Bytes e2 = bundle_bytes(w2.bundle);

        // synthetic per-tag metadata the ledger would expose
        std::uint64_t ts1 = game_rng.uniform(86'400'000);
        std::uint64_t ts2 = ts1 + game_rng.uniform(600'000);
        std::uint64_t amt1 = 1 + game_rng.uniform(1000);
        std::uint64_t amt2 = 1 + game_rng.uniform(1000);

        bool guess[kArms];
        guess[FieldEq] = e1 == e2 || w1.bundle.com == w2.bundle.com ||
                         w1.bundle.ct_link == w2.bundle.ct_link;
        double dist = l1_histogram_distance(e1, e2);
        guess[ByteHist] = dist < prev_dist;
        prev_dist = dist;
        guess[TsDelta] = (ts2 - ts1) < 300'000;
        guess[Metadata] = amt1 / 100 == amt2 / 100;
        guess[Trapdoor] = extract_pseudonym(et.ask, w1.bundle.ct_link) ==
                          extract_pseudonym(et.ask, w2.bundle.ct_link);
        for (int a = 0; a < kArms; ++a)
            if (guess[a] == b) ++wins[a];
    }

    std::vector<AttackOutcome> out;
    for (int a = 0; a < kArms; ++a) {
        AttackOutcome o{names[a], 0, 0, {}};
        o.attempts = trials;
        o.accepted = wins[a];
        double win_rate = trials ? static_cast<double>(wins[a]) / trials : 0.0;
        auto [lo, hi] = wilson(wins[a], trials);
        o.stats = {{"win_rate", win_rate},
                   {"advantage", win_rate - 0.5},
                   {"wilson_lo", lo},
                   {"wilson_hi", hi}};
        out.push_back(std::move(o));
    }
    return out;
}

AttackOutcome attack_cluster(std::uint32_t trials, std::uint64_t seed) {
    SeededRng rng(seed, "attack-cluster");
    auto key_rng = rng.fork("keys");
    DealerOutput committee = keygen(2, 3, key_rng);
    EtKeypair et = et_keygen(key_rng);

    constexpr std::size_t kUsers = 10;
    constexpr std::size_t kTags = 40;
    enum Strategy { Singletons, OneCluster, RandomK, ByteFeature, kStrategies };
    const char* names[kStrategies] = {"singletons", "one_cluster", "random_k", "byte_feature"};
    std::array<double, kStrategies> ari_sum{};

    AttackOutcome out{"cluster-guessing", 0, 0, {}};
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
        auto trial_rng = rng.fork("trial-" + std::to_string(trial));
        std::vector<MasterIdentity> users;
        for (std::size_t i = 0; i < kUsers; ++i)
            users.push_back(MasterIdentity::generate(trial_rng));

        std::vector<std::uint32_t> truth(kTags);
        std::vector<Bytes> views(kTags);
        for (std::size_t i = 0; i < kTags; ++i) {
            truth[i] = static_cast<std::uint32_t>(trial_rng.uniform(kUsers));
            views[i] =
                bundle_bytes(make_bundle(users[truth[i]], committee.keyset.tpk, et.apk, trial_rng)
                                 .bundle);
        }

        std::vector<std::uint32_t> guess(kTags);
        for (int s = 0; s < kStrategies; ++s) {
            for (std::size_t i = 0; i < kTags; ++i) {
                switch (s) {
                    case Singletons: guess[i] = static_cast<std::uint32_t>(i); break;
                    case OneCluster: guess[i] = 0; break;
                    case RandomK:
                        guess[i] = static_cast<std::uint32_t>(trial_rng.uniform(kUsers));
                        break;
                    case ByteFeature: guess[i] = views[i][0] % kUsers; break;
                }
            }
            ari_sum[s] += adjusted_rand_index(truth, guess);
        }
        ++out.attempts;
    }

    double worst = -1.0;
    for (int s = 0; s < kStrategies; ++s) {
        double mean = ari_sum[s] / trials;
        out.stats[std::string("mean_ari_") + names[s]] = mean;
        worst = std::max(worst, mean);
    }
    out.stats["mean_ari_best"] = worst;
    out.accepted = worst > 0.02 ? 1 : 0;
    return out;
}

std::vector<AttackOutcome> attack_unauthorized_reveal(std::uint64_t guesses,
                                                      std::uint64_t seed) {
    SeededRng rng(seed, "attack-reveal");
    auto key_rng = rng.fork("keys");
    DealerOutput committee = keygen(3, 5, key_rng);
    MasterIdentity victim = MasterIdentity::generate(key_rng);
    Scalar k = key_rng.nonzero_scalar();
    UidCiphertext ct = encrypt_uid(committee.keyset.tpk, victim.pk_id, k);

    auto enumerate_subsets = [](std::uint32_t n, std::uint32_t size) {
        std::vector<std::vector<std::uint32_t>> subsets;
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + size, true);
        do {
            std::vector<std::uint32_t> s;
            for (std::uint32_t i = 0; i < n; ++i)
                if (pick[i]) s.push_back(i + 1);
            subsets.push_back(std::move(s));
        } while (std::prev_permutation(pick.begin(), pick.end()));
        return subsets;
    };

    auto share_by_index = [&](std::uint32_t idx) -> const AuthorityShare& {
        return committee.shares[idx - 1];
    };

    AttackOutcome coalition{"sub-threshold-coalition", 0, 0, {}};
    auto dec_rng = rng.fork("decrypt");
    for (std::uint32_t size = 1; size < committee.keyset.t; ++size) {
        for (const auto& subset : enumerate_subsets(committee.keyset.n, size)) {
            ++coalition.attempts;
            std::vector<DecryptionShare> dshares;
            for (auto idx : subset)
                dshares.push_back(
                    partial_decrypt(committee.keyset, share_by_index(idx), ct, dec_rng));
            try {
                if (combine(committee.keyset, ct, dshares) == victim.pk_id)
                    ++coalition.accepted;
            } catch (const BelowThreshold&) {
            }
        }
    }

    AttackOutcome corrupt{"corrupted-share", 0, 0, {}};
    {
        auto base = enumerate_subsets(committee.keyset.n, committee.keyset.t);
        for (const auto& subset : base) {
            for (std::size_t victim_pos = 0; victim_pos < subset.size(); ++victim_pos) {
                ++corrupt.attempts;
                std::vector<DecryptionShare> dshares;
                for (auto idx : subset)
                    dshares.push_back(
                        partial_decrypt(committee.keyset, share_by_index(idx), ct, dec_rng));
                dshares[victim_pos].value =
                    dshares[victim_pos].value + GeneratorSet::instance().G;
                try {
                    if (combine(committee.keyset, ct, dshares) == victim.pk_id)
                        ++corrupt.accepted;
                } catch (const BadShareProof&) {
                }
            }
        }
    }

    AttackOutcome brute{"identity-brute-force", 0, 0, {}};
    auto guess_rng = rng.fork("guess");
    for (std::uint64_t i = 0; i < guesses; ++i) {
        ++brute.attempts;
        GroupElement g = mul_base(guess_rng.nonzero_scalar());
        if (g == victim.pk_id) ++brute.accepted;
        // forged top-up share next to a sub-threshold coalition
        if (i % 10 == 0) {
            ++brute.attempts;
            std::vector<DecryptionShare> dshares;
            for (std::uint32_t idx = 1; idx < committee.keyset.t; ++idx)
                dshares.push_back(
                    partial_decrypt(committee.keyset, share_by_index(idx), ct, dec_rng));
            DecryptionShare forged;
            forged.index = committee.keyset.t;
            Scalar fake = guess_rng.nonzero_scalar();
            forged.value = fake * ct.c1;
            forged.proof = prove_dleq(fake, GeneratorSet::instance().G, ct.c1, guess_rng);
            dshares.push_back(forged);
            try {
                if (combine(committee.keyset, ct, dshares) == victim.pk_id) ++brute.accepted;
            } catch (const Error&) {
            }
        }
    }

    AttackOutcome control{"at-threshold-control", 0, 0, {}};
    for (const auto& subset : enumerate_subsets(committee.keyset.n, committee.keyset.t)) {
        ++control.attempts;
        std::vector<DecryptionShare> dshares;
        for (auto idx : subset)
            dshares.push_back(partial_decrypt(committee.keyset, share_by_index(idx), ct, dec_rng));
        if (combine(committee.keyset, ct, dshares) == victim.pk_id) ++control.accepted;
    }

    return {std::move(coalition), std::move(corrupt), std::move(brute), std::move(control)};
}

AttackOutcome attack_post_disclosure(std::uint64_t seed) {
    SeededRng rng(seed, "attack-post-disclosure");
    EnvConfig cfg;
    cfg.committee_t = 2;
    cfg.committee_n = 3;
    Fixture fx = make_fixture(rng, cfg, 3, 6);

    // authorized reveal of user 0's tags
    std::vector<Hash32> target_keys;
    const auto& keys = fx.env.ledger.keys();
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (fx.owners[i] == 0) target_keys.push_back(keys[i]);
    RevealCase rc;
    rc.case_id = Bytes{'c', 'a', 's', 'e', '0'};
    rc.tags = target_keys;
    rc.cluster_evidence = LinkPseudonym{mul_base(fx.users[0].x)};  // stand-in evidence blob
    rc.approvals = {1, 2};
    auto irp_rng = rng.fork("irp");
    auto revealed = irp_run(rc, fx.env, irp_rng);
    if (!revealed || revealed->empty()) throw Error("control reveal failed");

    AttackOutcome out{"post-disclosure-linkage", 0, 0, {}};
    // with pk_id(u0) in hand, try to tie remaining tags to anything
    const GroupElement& pk0 = revealed->front();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (fx.owners[i] == 0) continue;
        ++out.attempts;
        const AuditTag* tag = fx.env.ledger.find(keys[i]);
        // direct-equality probes against every public element of the bundle
        bool hit = tag->party_a.uid.c2 == pk0 || tag->party_a.ct_link.c2 == pk0 ||
                   tag->party_a.com.C == pk0;
        if (hit) ++out.accepted;
    }

    // witness-material scan: no identity scalar of any user may appear in the
    // exported stream
    std::string stream = fx.env.ledger.export_lines();
    auto hex = [](const Bytes& b) {
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (auto v : b) {
            s += digits[v >> 4];
            s += digits[v & 15];
        }
        return s;
    };
    for (const auto& u : fx.users) {
        ++out.attempts;
        if (stream.find(hex(u.x.encode())) != std::string::npos ||
            stream.find(hex(u.sk_master.encode())) != std::string::npos)
            ++out.accepted;
    }
    out.stats["revealed_keys"] = static_cast<double>(revealed->size());
    return out;
}

std::vector<AttackOutcome> run_attack_suite(const AttackSuiteConfig& cfg, std::uint64_t seed) {
    std::vector<AttackOutcome> out;
    auto add = [&out](std::vector<AttackOutcome> v) {
        for (auto& o : v) out.push_back(std::move(o));
    };
    add(attack_forgery(cfg.forgery_trials, seed));
    out.push_back(attack_replay(cfg.replay_trials, seed));
    add(game_aol(cfg.aol_trials, seed));
    out.push_back(attack_cluster(cfg.cluster_trials, seed));
    add(attack_unauthorized_reveal(cfg.reveal_guesses, seed));
    out.push_back(attack_post_disclosure(seed));
    return out;
}

std::string attacks_to_csv(const std::vector<AttackOutcome>& outcomes) {
    std::ostringstream os;
    os << "name,attempts,accepted,stats\n";
    for (const auto& o : outcomes) {
        os << o.name << ',' << o.attempts << ',' << o.accepted << ',';
        bool first = true;
        for (const auto& [k, v] : o.stats) {
            if (!first) os << ';';
            os << k << '=' << fmt(v);
            first = false;
        }
        os << "\n";
    }
    return os.str();
}

std::string attacks_json(const std::vector<AttackOutcome>& outcomes, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["verb"] = "attack-suite";
    j["seed"] = seed;
    j["outcomes"] = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
        nlohmann::ordered_json oj;
        oj["name"] = o.name;
        oj["attempts"] = o.attempts;
        oj["accepted"] = o.accepted;
        oj["stats"] = o.stats;
        j["outcomes"].push_back(std::move(oj));
    }
    return j.dump(2) + "\n";
}

}  // namespace veilaudit
