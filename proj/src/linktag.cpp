#include "veilaudit/linktag.hpp"

namespace veilaudit {

EtKeypair et_keygen(SeededRng& rng) {
    Scalar ask = rng.nonzero_scalar();
    return EtKeypair{mul_base(ask), ask};
}

LinkCiphertext encrypt_link(const GroupElement& apk, const Scalar& x, const Scalar& s) {
    if (s.is_zero()) throw ZeroRandomness{};
    const auto& gens = GeneratorSet::instance();
    return LinkCiphertext{mul_base(s), x * gens.J + s * apk};
}

LinkPseudonym extract_pseudonym(const Scalar& ask, const LinkCiphertext& ct) {
    return LinkPseudonym{ct.c2 - ask * ct.c1};
}

bool equality_test(const Scalar& ask, const LinkCiphertext& a, const LinkCiphertext& b) {
    return extract_pseudonym(ask, a) == extract_pseudonym(ask, b);
}

}  // namespace veilaudit
