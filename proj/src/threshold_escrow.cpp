#include "veilaudit/threshold_escrow.hpp"

#include <set>

namespace veilaudit {

Bytes AuthorityShare::export_bytes() const {
    if (index == 0 || index > 255) throw Error("share index out of export range");
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(index));
    auto s = secret.encode();
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

AuthorityShare AuthorityShare::import_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 1 + Scalar::kBytes) throw MalformedEncoding("bad share encoding");
    if (bytes[0] == 0) throw MalformedEncoding("share index must be >= 1");
    return AuthorityShare{bytes[0], Scalar::decode(bytes.subspan(1))};
}

DealerOutput keygen(std::uint32_t t, std::uint32_t n, SeededRng& rng) {
    if (t < 1 || t > n || n > 64)
        throw BadThreshold("require 1 <= t <= n <= 64");
    std::vector<Scalar> coeffs;
    coeffs.reserve(t);
    for (std::uint32_t j = 0; j < t; ++j) coeffs.push_back(rng.nonzero_scalar());

    DealerOutput out;
    out.dealer_secret = coeffs[0];
    out.keyset.t = t;
    out.keyset.n = n;
    out.keyset.feldman.reserve(t);
    for (const auto& a : coeffs) out.keyset.feldman.push_back(mul_base(a));
    out.keyset.tpk = out.keyset.feldman[0];

    out.shares.reserve(n);
    for (std::uint32_t i = 1; i <= n; ++i) {
        // Horner evaluation of f(i).
        Scalar xi = Scalar::from_u64(i);
        Scalar acc = coeffs[t - 1];
        for (std::uint32_t j = t - 1; j-- > 0;) acc = acc * xi + coeffs[j];
        out.shares.push_back(AuthorityShare{i, acc});
    }
    return out;
}

GroupElement feldman_public_share(const ThresholdKeyset& keyset, std::uint32_t index) {
    // sum_j index^j * feldman[j]
    Scalar xi = Scalar::from_u64(index);
    Scalar power = Scalar::one();
    GroupElement acc = GroupElement::identity();
    for (const auto& fj : keyset.feldman) {
        acc = acc + power * fj;
        power = power * xi;
    }
    return acc;
}

bool share_verify(const ThresholdKeyset& keyset, const AuthorityShare& share) {
    if (share.index < 1 || share.index > keyset.n) return false;
    return mul_base(share.secret) == feldman_public_share(keyset, share.index);
}

UidCiphertext encrypt_uid(const GroupElement& tpk, const GroupElement& pk_id, const Scalar& k) {
    return UidCiphertext{mul_base(k), pk_id + k * tpk};
}

DecryptionShare partial_decrypt(const ThresholdKeyset& keyset, const AuthorityShare& share,
                                const UidCiphertext& ct, SeededRng& rng) {
    if (!share_verify(keyset, share)) throw InvalidShare{};
    DecryptionShare ds;
    ds.index = share.index;
    ds.value = share.secret * ct.c1;
    ds.proof = prove_dleq(share.secret, GroupElement::base(), ct.c1, rng);
    return ds;
}

bool share_verify_decryption(const ThresholdKeyset& keyset, const UidCiphertext& ct,
                             const DecryptionShare& share) {
    if (share.index < 1 || share.index > keyset.n) return false;
    GroupElement pub = feldman_public_share(keyset, share.index);
    return verify_dleq(pub, share.value, GroupElement::base(), ct.c1, share.proof);
}

Scalar lagrange_at_zero(const std::vector<std::uint32_t>& indices, std::uint32_t i) {
    // prod_{j != i} j / (j - i), exact in the scalar field.
    Scalar num = Scalar::one();
    Scalar den = Scalar::one();
    Scalar xi = Scalar::from_u64(i);
    for (auto j : indices) {
        if (j == i) continue;
        Scalar xj = Scalar::from_u64(j);
        num = num * xj;
        den = den * (xj - xi);
    }
    return num * den.invert();
}

GroupElement combine(const ThresholdKeyset& keyset, const UidCiphertext& ct,
                     const std::vector<DecryptionShare>& shares) {
    if (shares.size() < keyset.t) throw BelowThreshold{};
    std::set<std::uint32_t> seen;
    std::vector<std::uint32_t> indices;
    indices.reserve(shares.size());
    for (const auto& s : shares) {
        if (!seen.insert(s.index).second) throw DuplicateIndex{};
        indices.push_back(s.index);
    }
    for (const auto& s : shares) {
        if (!share_verify_decryption(keyset, ct, s)) throw BadShareProof{};
    }
    GroupElement masked = GroupElement::identity();
    for (const auto& s : shares) {
        masked = masked + lagrange_at_zero(indices, s.index) * s.value;
    }
    return ct.c2 - masked;
}

}  // namespace veilaudit
