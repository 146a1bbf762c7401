#include "veilaudit/pedersen_nizk.hpp"

#include <cstring>

namespace veilaudit {

PedersenCommitment commit(const Scalar& x, const Scalar& r) {
    const auto& gens = GeneratorSet::instance();
    return PedersenCommitment{mul_base(x) + r * gens.H};
}

FiatShamirTranscript::FiatShamirTranscript(std::string_view domain) : domain_(domain) {}

void FiatShamirTranscript::absorb(std::string_view label, std::span<const std::uint8_t> bytes) {
    buffer_.push_back(static_cast<std::uint8_t>(label.size()));
    buffer_.insert(buffer_.end(), label.begin(), label.end());
    std::uint32_t n = static_cast<std::uint32_t>(bytes.size());
    for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

Scalar FiatShamirTranscript::challenge() const {
    return hash_to_scalar(domain_, buffer_);
}

namespace {

Bytes ctrl_message(const Address& addr, std::span<const std::uint8_t> nonce_sess) {
    Bytes msg(addr.bytes.begin(), addr.bytes.end());
    msg.insert(msg.end(), nonce_sess.begin(), nonce_sess.end());
    return msg;
}

}  // namespace

ControlProof prove_ctrl(const Scalar& sk_anon, const Address& addr,
                        std::span<const std::uint8_t> nonce_sess) {
    GroupElement pk = mul_base(sk_anon);
    if (!(derive_address(pk) == addr)) throw AddressMismatch{};
    auto msg = ctrl_message(addr, nonce_sess);
    return ControlProof{pk, schnorr_sign(sk_anon, domains::kCtrl, msg)};
}

bool verify_ctrl(const Address& addr, std::span<const std::uint8_t> nonce_sess,
                 const ControlProof& proof) {
    if (!(derive_address(proof.pk_anon) == addr)) return false;
    auto msg = ctrl_message(addr, nonce_sess);
    return schnorr_verify(proof.pk_anon, domains::kCtrl, msg, proof.sig);
}

namespace {

Scalar link_challenge(const LinkStatement& st, const LinkProof& p) {
    FiatShamirTranscript t(domains::kFs);
    t.absorb("ctx", to_bytes(domains::kGlobal));
    t.absorb("com", st.com.C);
    t.absorb("uid1", st.uid_c1);
    t.absorb("uid2", st.uid_c2);
    t.absorb("link1", st.link_c1);
    t.absorb("link2", st.link_c2);
    t.absorb("tpk", st.tpk);
    t.absorb("apk", st.apk);
    t.absorb("A_com", p.a_com);
    t.absorb("A_uid1", p.a_uid1);
    t.absorb("A_uid2", p.a_uid2);
    t.absorb("A_link1", p.a_link1);
    t.absorb("A_link2", p.a_link2);
    return t.challenge();
}

}  // namespace

LinkProof prove_link(const LinkWitness& w, const LinkStatement& st, SeededRng& rng) {
    const auto& gens = GeneratorSet::instance();
    // Witness-side relation checks: R1 commitment, R2 identity capsule, R3 link ciphertext.
    if (!(commit(w.x, w.r).C == st.com.C))
        throw WitnessInconsistent("R1: commitment does not open to (x, r)");
    if (!(mul_base(w.k) == st.uid_c1) || !(mul_base(w.x) + w.k * st.tpk == st.uid_c2))
        throw WitnessInconsistent("R2: identity capsule inconsistent with (x, k)");
    if (!(mul_base(w.s) == st.link_c1) || !(w.x * gens.J + w.s * st.apk == st.link_c2))
        throw WitnessInconsistent("R3: link ciphertext inconsistent with (x, s)");

    Scalar ax = rng.nonzero_scalar(), ar = rng.nonzero_scalar();
    Scalar ak = rng.nonzero_scalar(), as = rng.nonzero_scalar();
    LinkProof p;
    p.a_com = mul_base(ax) + ar * gens.H;
    p.a_uid1 = mul_base(ak);
    p.a_uid2 = mul_base(ax) + ak * st.tpk;
    p.a_link1 = mul_base(as);
    p.a_link2 = ax * gens.J + as * st.apk;
    Scalar c = link_challenge(st, p);
    p.z_x = ax + c * w.x;
    p.z_r = ar + c * w.r;
    p.z_k = ak + c * w.k;
    p.z_s = as + c * w.s;
    return p;
}

bool check_link_equations(const LinkStatement& st, const LinkProof& p, const Scalar& c) {
    const auto& gens = GeneratorSet::instance();
    if (!(mul_base(p.z_x) + p.z_r * gens.H == p.a_com + c * st.com.C)) return false;
    if (!(mul_base(p.z_k) == p.a_uid1 + c * st.uid_c1)) return false;
    if (!(mul_base(p.z_x) + p.z_k * st.tpk == p.a_uid2 + c * st.uid_c2)) return false;
    if (!(mul_base(p.z_s) == p.a_link1 + c * st.link_c1)) return false;
    if (!(p.z_x * gens.J + p.z_s * st.apk == p.a_link2 + c * st.link_c2)) return false;
    return true;
}

bool verify_link(const LinkStatement& st, const LinkProof& p) {
    return check_link_equations(st, p, link_challenge(st, p));
}

LinkProof simulate_link(const LinkStatement& st, const Scalar& challenge, SeededRng& rng) {
    const auto& gens = GeneratorSet::instance();
    // Honest-verifier ZK simulator: responses first, announcements back-solved.
    LinkProof p;
    p.z_x = rng.nonzero_scalar();
    p.z_r = rng.nonzero_scalar();
    p.z_k = rng.nonzero_scalar();
    p.z_s = rng.nonzero_scalar();
    p.a_com = mul_base(p.z_x) + p.z_r * gens.H - challenge * st.com.C;
    p.a_uid1 = mul_base(p.z_k) - challenge * st.uid_c1;
    p.a_uid2 = mul_base(p.z_x) + p.z_k * st.tpk - challenge * st.uid_c2;
    p.a_link1 = mul_base(p.z_s) - challenge * st.link_c1;
    p.a_link2 = p.z_x * gens.J + p.z_s * st.apk - challenge * st.link_c2;
    return p;
}

Bytes LinkProof::serialize() const {
    Bytes out;
    out.push_back(0x01);
    for (const GroupElement* e : {&a_com, &a_uid1, &a_uid2, &a_link1, &a_link2}) {
        auto b = e->encode();
        out.insert(out.end(), b.begin(), b.end());
    }
    for (const Scalar* s : {&z_x, &z_r, &z_k, &z_s}) {
        auto b = s->encode();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

LinkProof LinkProof::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 1 + 5 * 32 + 4 * 32 || bytes[0] != 0x01)
        throw MalformedEncoding("bad link proof encoding");
    LinkProof p;
    std::size_t off = 1;
    auto next32 = [&] { auto s = bytes.subspan(off, 32); off += 32; return s; };
    p.a_com = GroupElement::decode(next32());
    p.a_uid1 = GroupElement::decode(next32());
    p.a_uid2 = GroupElement::decode(next32());
    p.a_link1 = GroupElement::decode(next32());
    p.a_link2 = GroupElement::decode(next32());
    p.z_x = Scalar::decode(next32());
    p.z_r = Scalar::decode(next32());
    p.z_k = Scalar::decode(next32());
    p.z_s = Scalar::decode(next32());
    return p;
}

namespace {

Scalar dleq_challenge(const GroupElement& b1, const GroupElement& b2, const GroupElement& p1,
                      const GroupElement& p2, const GroupElement& a1, const GroupElement& a2) {
    FiatShamirTranscript t(domains::kFs);
    t.absorb("dleq/b1", b1);
    t.absorb("dleq/b2", b2);
    t.absorb("dleq/p1", p1);
    t.absorb("dleq/p2", p2);
    t.absorb("dleq/a1", a1);
    t.absorb("dleq/a2", a2);
    return t.challenge();
}

}  // namespace

DleqProof prove_dleq(const Scalar& w, const GroupElement& b1, const GroupElement& b2,
                     SeededRng& rng) {
    Scalar a = rng.nonzero_scalar();
    DleqProof p;
    p.a1 = a * b1;
    p.a2 = a * b2;
    Scalar c = dleq_challenge(b1, b2, w * b1, w * b2, p.a1, p.a2);
    p.response = a + c * w;
    return p;
}

bool check_dleq_equations(const GroupElement& p1, const GroupElement& p2, const GroupElement& b1,
                          const GroupElement& b2, const DleqProof& proof, const Scalar& c) {
    if (!(proof.response * b1 == proof.a1 + c * p1)) return false;
    if (!(proof.response * b2 == proof.a2 + c * p2)) return false;
    return true;
}

bool verify_dleq(const GroupElement& p1, const GroupElement& p2, const GroupElement& b1,
                 const GroupElement& b2, const DleqProof& proof) {
    Scalar c = dleq_challenge(b1, b2, p1, p2, proof.a1, proof.a2);
    return check_dleq_equations(p1, p2, b1, b2, proof, c);
}

DleqProof simulate_dleq(const GroupElement& p1, const GroupElement& p2, const GroupElement& b1,
                        const GroupElement& b2, const Scalar& challenge, SeededRng& rng) {
    DleqProof p;
    p.response = rng.nonzero_scalar();
    p.a1 = p.response * b1 - challenge * p1;
    p.a2 = p.response * b2 - challenge * p2;
    return p;
}

}  // namespace veilaudit
