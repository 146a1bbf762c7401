#include <set>

#include "doctest.h"
#include "util.hpp"
#include "veilaudit/rng.hpp"

using namespace veilaudit;
using testutil::hex;
using testutil::unhex;

TEST_SUITE("algebra") {

TEST_CASE("scalar field axioms over random samples") {
    SeededRng rng(101, "scalar-axioms");
    for (int i = 0; i < 1000; ++i) {
        Scalar a = rng.scalar(), b = rng.scalar(), c = rng.scalar();
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + Scalar::zero() == a);
        CHECK(a * Scalar::one() == a);
        CHECK(a + a.negate() == Scalar::zero());
    }
    for (int i = 0; i < 100; ++i) {
        Scalar a = rng.nonzero_scalar();
        CHECK(a * a.invert() == Scalar::one());
    }
    CHECK_THROWS_AS(Scalar::zero().invert(), Error);
}

TEST_CASE("group axioms over random samples") {
    SeededRng rng(102, "group-axioms");
    const GroupElement id = GroupElement::identity();
    for (int i = 0; i < 1000; ++i) {
        Scalar sa = rng.scalar(), sb = rng.scalar();
        GroupElement a = mul_base(sa), b = mul_base(sb);
        CHECK(a + b == b + a);
        CHECK(a + id == a);
        CHECK(a - a == id);
        CHECK(a + b == mul_base(sa + sb));
        CHECK(sa * b == sb * a);  // sa*(sb*G) == sb*(sa*G)
    }
    CHECK(mul_base(Scalar::zero()) == id);
    Scalar s = rng.nonzero_scalar();
    CHECK(s * id == id);
}

TEST_CASE("serialization round-trips and malformed rejection") {
    SeededRng rng(103, "serial");
    for (int i = 0; i < 10000; ++i) {
        Scalar s = rng.scalar();
        CHECK(Scalar::decode(s.encode()) == s);
        if (i % 10 == 0) {
            GroupElement p = mul_base(s);
            CHECK(GroupElement::decode(p.encode()) == p);
        }
    }
    Bytes all_ff(32, 0xFF);
    CHECK_THROWS_AS(Scalar::decode(all_ff), MalformedEncoding);
    CHECK_THROWS_AS(GroupElement::decode(all_ff), MalformedEncoding);
    Bytes truncated(31, 0x01);
    CHECK_THROWS_AS(Scalar::decode(truncated), MalformedEncoding);
    CHECK_THROWS_AS(GroupElement::decode(truncated), MalformedEncoding);
}

TEST_CASE("fixed vectors from an external implementation") {
    // base point of the prime-order group (public constant)
    CHECK(hex(GroupElement::base().encode()) ==
          "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76");
    // hash_to_scalar = 64-byte BLAKE2b of len(domain)||domain||payload, LE mod q
    CHECK(hex(hash_to_scalar(domains::kGlobal, {}).encode()) ==
          "711bad3e1802753da486d730025c1c354b092d43cb4c8f46876decffa3bcaf0c");
    Bytes abc = to_bytes("abc");
    CHECK(hex(hash_to_scalar(domains::kGlobal, abc).encode()) ==
          "440f3337a25e6e6f42edba7274fd4ed483599ed64acfc2d3caf98af1a9571209");
    CHECK(hex(hash_to_scalar(domains::kCtrl, abc).encode()) ==
          "d2af9013cf69ce5287e08722fbf8022b69e80387ed52f93cfb6faa776bd9fb0e");
    auto d = digest32(domains::kGlobal, {});
    CHECK(hex(d) == "af2fab5c6edacf369ffd485764db3b4eb6c59124f411325130ced2c4f0d7d26e");
    Bytes ramp(32);
    for (int i = 0; i < 32; ++i) ramp[i] = static_cast<std::uint8_t>(i);
    CHECK(hex(digest32(domains::kAddr, ramp)) ==
          "1dbe094a57f3a4a808e6ff19324b9d9df1d45e3e53336d003f429dd2c3e42e88");
    CHECK(hex(kdf_derive(Scalar::from_u64(7), to_bytes("id")).encode()) ==
          "3c941eaa0528817bec974093b0daee72f44c40697a8107de1bbf22d7a7d7980a");
}

TEST_CASE("domain separation") {
    SeededRng rng(104, "domains");
    for (int i = 0; i < 10000; ++i) {
        Bytes payload = rng.bytes(1 + i % 48);
        CHECK(hash_to_scalar(domains::kGlobal, payload) !=
              hash_to_scalar(domains::kCtrl, payload));
        if (i % 100 == 0)
            CHECK_FALSE(hash_to_group(domains::kGenH, payload) ==
                        hash_to_group(domains::kGenJ, payload));
    }
    const auto& gens = GeneratorSet::instance();
    CHECK_FALSE(gens.H == gens.J);
    CHECK_FALSE(gens.H == gens.G);
    CHECK_FALSE(gens.J == gens.G);
}

TEST_CASE("kdf preconditions and determinism") {
    SeededRng rng(105, "kdf");
    Scalar sk = rng.nonzero_scalar();
    CHECK_THROWS_AS(kdf_derive(sk, {}), EmptySalt);
    CHECK(kdf_derive(sk, to_bytes("a")) == kdf_derive(sk, to_bytes("a")));
    CHECK_FALSE(kdf_derive(sk, to_bytes("a")) == kdf_derive(sk, to_bytes("b")));
}

TEST_CASE("schnorr correctness and forgery rejection") {
    SeededRng rng(106, "schnorr");
    Scalar sk = rng.nonzero_scalar();
    GroupElement pk = mul_base(sk);
    Bytes msg = rng.bytes(100);
    SchnorrSignature sig = schnorr_sign(sk, domains::kExec, msg);
    CHECK(schnorr_verify(pk, domains::kExec, msg, sig));
    CHECK_FALSE(schnorr_verify(pk, domains::kCtrl, msg, sig));  // wrong domain
    CHECK_THROWS_AS(schnorr_sign(Scalar::zero(), domains::kExec, msg), ZeroKey);

    // mutated message, key, or signature parts must all fail
    for (int i = 0; i < 1000; ++i) {
        switch (i % 4) {
            case 0: {
                Bytes m = msg;
                m[rng.uniform(m.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
                CHECK_FALSE(schnorr_verify(pk, domains::kExec, m, sig));
                break;
            }
            case 1: {
                SchnorrSignature s2 = sig;
                s2.response = s2.response + rng.nonzero_scalar();
                CHECK_FALSE(schnorr_verify(pk, domains::kExec, msg, s2));
                break;
            }
            case 2: {
                SchnorrSignature s2 = sig;
                s2.commitment_hash = s2.commitment_hash + rng.nonzero_scalar();
                CHECK_FALSE(schnorr_verify(pk, domains::kExec, msg, s2));
                break;
            }
            case 3: {
                GroupElement pk2 = mul_base(rng.nonzero_scalar());
                CHECK_FALSE(schnorr_verify(pk2, domains::kExec, msg, sig));
                break;
            }
        }
    }
}

TEST_CASE("addresses are deterministic and key-separating") {
    SeededRng rng(107, "addr");
    std::set<Address> seen;
    for (int i = 0; i < 1000; ++i) {
        GroupElement pk = mul_base(rng.nonzero_scalar());
        Address a = derive_address(pk);
        CHECK(a == derive_address(pk));
        CHECK(seen.insert(a).second);
    }
}

}  // TEST_SUITE
