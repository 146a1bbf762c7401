#pragma once

#include "veilaudit/algebra.hpp"
#include "veilaudit/rng.hpp"

// Auditor-only linkability: equality-test keypair, link ciphertexts over the
// stable per-user pseudonym L = x*J, trapdoor extraction, and equality tests.

namespace veilaudit {

struct ZeroRandomness : Error { ZeroRandomness() : Error("encryption randomness is zero") {} };

struct EtKeypair {
    GroupElement apk;  // ask * G
    Scalar ask;        // the equality-test trapdoor; auditor-only
};

struct LinkCiphertext {
    GroupElement c1;  // s * G
    GroupElement c2;  // x*J + s*apk
    bool operator==(const LinkCiphertext&) const = default;
};

struct LinkPseudonym {
    GroupElement L;  // x * J
    bool operator==(const LinkPseudonym&) const = default;
};

EtKeypair et_keygen(SeededRng& rng);
LinkCiphertext encrypt_link(const GroupElement& apk, const Scalar& x, const Scalar& s);
LinkPseudonym extract_pseudonym(const Scalar& ask, const LinkCiphertext& ct);
bool equality_test(const Scalar& ask, const LinkCiphertext& a, const LinkCiphertext& b);

}  // namespace veilaudit
