#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "veilaudit/bench.hpp"
#include "veilaudit/protocols.hpp"

namespace py = pybind11;
using namespace veilaudit;

namespace {

Bytes to_vec(const py::bytes& b) {
    std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes to_py(std::span<const std::uint8_t> b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

}  // namespace

PYBIND11_MODULE(_veilaudit, m) {
    m.doc() = "cross-chain audit-tag toolkit: group algebra, proofs, threshold "
              "revelation, and the simulation pipeline";

    py::register_exception<Error>(m, "VeilAuditError");

    py::class_<Scalar>(m, "Scalar")
        .def_static("zero", &Scalar::zero)
        .def_static("one", &Scalar::one)
        .def_static("from_u64", &Scalar::from_u64)
        .def_static("decode", [](const py::bytes& b) { return Scalar::decode(to_vec(b)); })
        .def("encode", [](const Scalar& s) { return to_py(s.encode()); })
        .def("__add__", &Scalar::operator+, py::is_operator())
        .def("__sub__", &Scalar::operator-, py::is_operator())
        .def("__mul__", [](const Scalar& a, const Scalar& b) { return a * b; }, py::is_operator())
        .def("__eq__", [](const Scalar& a, const Scalar& b) { return a == b; })
        .def("negate", &Scalar::negate)
        .def("invert", &Scalar::invert)
        .def("is_zero", &Scalar::is_zero);

    py::class_<GroupElement>(m, "GroupElement")
        .def_static("identity", &GroupElement::identity)
        .def_static("base", &GroupElement::base)
        .def_static("decode",
                    [](const py::bytes& b) { return GroupElement::decode(to_vec(b)); })
        .def("encode", [](const GroupElement& p) { return to_py(p.encode()); })
        .def("__add__", &GroupElement::operator+, py::is_operator())
        .def("__sub__", &GroupElement::operator-, py::is_operator())
        .def("__rmul__", [](const GroupElement& p, const Scalar& s) { return s * p; }, py::is_operator())
        .def("__eq__", [](const GroupElement& a, const GroupElement& b) { return a == b; })
        .def("is_identity", &GroupElement::is_identity);

    m.def("mul_base", &mul_base);
    m.def("hash_to_scalar", [](const std::string& domain, const py::bytes& payload) {
        return hash_to_scalar(domain, to_vec(payload));
    });
    m.def("hash_to_group", [](const std::string& domain, const py::bytes& payload) {
        return hash_to_group(domain, to_vec(payload));
    });
    m.def("kdf_derive", [](const Scalar& master, const py::bytes& salt) {
        return kdf_derive(master, to_vec(salt));
    });
    m.def("digest32", [](const std::string& domain, const py::bytes& payload) {
        return to_py(digest32(domain, to_vec(payload)));
    });
    m.def("derive_address",
          [](const GroupElement& pk) { return to_py(derive_address(pk).encode()); });

    py::class_<SeededRng>(m, "SeededRng")
        .def(py::init<std::uint64_t, std::string_view>(), py::arg("seed"), py::arg("label"))
        .def("scalar", &SeededRng::nonzero_scalar)
        .def("bytes", [](SeededRng& r, std::size_t n) { return to_py(r.bytes(n)); })
        .def("uniform", [](SeededRng& r, std::uint64_t bound) { return r.uniform(bound); });

    // ownership proofs over derived addresses
    py::class_<ControlProof>(m, "ControlProof");
    m.def("prove_ctrl", [](const Scalar& sk, const py::bytes& nonce) {
        return prove_ctrl(sk, derive_address(mul_base(sk)), to_vec(nonce));
    });
    m.def("verify_ctrl",
          [](const py::bytes& addr20, const py::bytes& nonce, const ControlProof& proof) {
              Bytes raw = to_vec(addr20);
              if (raw.size() != Address::kBytes) throw MalformedEncoding("address length");
              Address a;
              std::copy(raw.begin(), raw.end(), a.bytes.begin());
              return verify_ctrl(a, to_vec(nonce), proof);
          });

    py::class_<PedersenCommitment>(m, "PedersenCommitment")
        .def_readonly("C", &PedersenCommitment::C)
        .def("__eq__", [](const PedersenCommitment& a, const PedersenCommitment& b) {
            return a == b;
        });
    m.def("commit", &commit);

    py::class_<DleqProof>(m, "DleqProof");
    m.def("prove_dleq", &prove_dleq);
    m.def("verify_dleq", &verify_dleq);

    // auditor-only linkability
    py::class_<EtKeypair>(m, "EtKeypair")
        .def_readonly("apk", &EtKeypair::apk)
        .def_readonly("ask", &EtKeypair::ask);
    py::class_<LinkCiphertext>(m, "LinkCiphertext")
        .def_readonly("c1", &LinkCiphertext::c1)
        .def_readonly("c2", &LinkCiphertext::c2);
    py::class_<LinkPseudonym>(m, "LinkPseudonym")
        .def_readonly("L", &LinkPseudonym::L)
        .def("__eq__",
             [](const LinkPseudonym& a, const LinkPseudonym& b) { return a == b; });
    m.def("et_keygen", &et_keygen);
    m.def("encrypt_link", &encrypt_link);
    m.def("extract_pseudonym", &extract_pseudonym);
    m.def("equality_test", &equality_test);

    // threshold identity escrow
    py::class_<ThresholdKeyset>(m, "ThresholdKeyset")
        .def_readonly("t", &ThresholdKeyset::t)
        .def_readonly("n", &ThresholdKeyset::n)
        .def_readonly("tpk", &ThresholdKeyset::tpk);
    py::class_<AuthorityShare>(m, "AuthorityShare")
        .def_readonly("index", &AuthorityShare::index)
        .def("export_bytes", [](const AuthorityShare& s) { return to_py(s.export_bytes()); })
        .def_static("import_bytes", [](const py::bytes& b) {
            return AuthorityShare::import_bytes(to_vec(b));
        });
    py::class_<UidCiphertext>(m, "UidCiphertext");
    py::class_<DecryptionShare>(m, "DecryptionShare")
        .def_readonly("index", &DecryptionShare::index);
    py::class_<DealerOutput>(m, "DealerOutput")
        .def_readonly("keyset", &DealerOutput::keyset)
        .def_readonly("shares", &DealerOutput::shares);
    m.def("keygen", &keygen);
    m.def("share_verify", &share_verify);
    m.def("encrypt_uid", &encrypt_uid);
    m.def("partial_decrypt", &partial_decrypt);
    m.def("combine", &combine);

    // statistics
    py::class_<BootstrapCi>(m, "BootstrapCi")
        .def_readonly("mean", &BootstrapCi::mean)
        .def_readonly("lo", &BootstrapCi::lo)
        .def_readonly("hi", &BootstrapCi::hi)
        .def_readonly("n", &BootstrapCi::n);
    m.def("bootstrap_ci", &bootstrap_ci, py::arg("samples"), py::arg("resamples") = 1000,
          py::arg("seed") = 0);

    // one-call pipeline smoke: build a corpus, run the decrypt-once clustering
    // at visibility p, report agreement with ground truth
    m.def(
        "aol_point",
        [](std::size_t total_tags, std::size_t latent_users, double p, std::uint64_t seed) {
            WorkloadSpec spec;
            spec.total_tags = total_tags;
            spec.latent_users = latent_users;
            spec.seed = seed;
            auto scenario = build_scenario(spec);
            SeededRng rng(seed, "sample");
            VisibleSet vis = sample_visible(scenario->env.ledger, p, rng);
            ClusterReport rep = cluster(vis, scenario->env.et.ask, scenario->truth, Party::A);
            return py::make_tuple(rep.ari, rep.nmi);
        },
        py::arg("total_tags"), py::arg("latent_users"), py::arg("p"), py::arg("seed"));
}
