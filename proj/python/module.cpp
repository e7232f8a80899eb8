#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "autoss/harness.hpp"

namespace py = pybind11;
using namespace autoss;

namespace {

py::bytes to_py(const Bytes& b) { return {reinterpret_cast<const char*>(b.data()), b.size()}; }

Bytes from_py(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

const SignatureProvider& provider_for(const std::string& name) {
    static const Ed25519Provider ed;
    static const DebugSigner debug;
    if (name == "ed25519") {
        return ed;
    }
    if (name == "debug") {
        return debug;
    }
    throw Error("unknown signature scheme '" + name + "'");
}

// A message as the client receives it: the wire bytes of the response file.
py::bytes respond(const MBTree& tree, const EmbeddingFunction* f, const std::string& q, double theta,
                  const std::string& mode_name, std::uint32_t topk) {
    const Mode mode = parse_mode(mode_name);
    if (mode == Mode::evs2 && f == nullptr) {
        throw Error("evs2 needs an embedding");
    }
    Response r;
    r.mode = mode;
    r.topk = topk;
    r.signature = tree.signature();
    if (topk > 0) {
        auto proof = topk_build_vo(tree, {q, topk, theta}, mode, f);
        r.R = std::move(proof.R);
        r.vo = std::move(proof.vo);
    } else {
        auto msg = mode == Mode::evs2 ? build_vo_e(tree, *f, {q, theta}) : build_vo(tree, {q, theta});
        r.R = std::move(msg.R);
        r.vo = std::move(msg.vo);
    }
    return to_py(r.serialize());
}

VerificationReport check(const py::bytes& response, const std::string& q, double theta, const py::bytes& pub,
                         const EmbeddingFunction* f, const std::string& scheme) {
    const auto r = Response::deserialize(from_py(response));
    const auto& provider = provider_for(scheme);
    const auto key = from_py(pub);
    if (r.topk > 0) {
        return topk_verify({q, r.topk, theta}, r.R, r.vo, f, provider, key, r.signature);
    }
    if (r.mode == Mode::evs2) {
        if (f == nullptr) {
            throw Error("evs2 responses need the embedding");
        }
        return verify_e({q, theta}, r.R, r.vo, *f, provider, key, r.signature);
    }
    return verify({q, theta}, r.R, r.vo, provider, key, r.signature);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Authenticated edit-distance similarity search";

    // pybind tries the most recently registered translator first, so the
    // subclass has to come after its base.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("edit_distance", py::overload_cast<std::string_view, std::string_view>(&edit_distance));
    m.def("dst_min", [](const std::string& q, const std::string& lo, const std::string& hi) {
        return dst_min(q, {lo, hi});
    }, "Lower bound on the edit distance from q to any string in [lo, hi].");
    m.def("generate_corpus", [](std::size_t n, std::uint64_t seed) { return generate_corpus({.n = n}, seed); },
          py::arg("n"), py::arg("seed") = 0);
    m.def("generate_queries", [](const std::vector<std::string>& corpus, std::size_t count, std::uint64_t seed) {
        return generate_queries(corpus, count, seed);
    }, py::arg("corpus"), py::arg("count"), py::arg("seed") = 0);

    m.def("generate_keys", [](const std::string& scheme) {
        const auto keys = provider_for(scheme).generate_keys();
        return py::make_tuple(to_py(keys.public_key), to_py(keys.private_key));
    }, py::arg("scheme") = "ed25519", "Returns (public, private).");

    py::class_<MBTree>(m, "Index")
        .def(py::init([](std::vector<std::string> corpus, std::uint32_t fanout) {
            return build_tree(std::move(corpus), fanout);
        }), py::arg("corpus"), py::arg("fanout") = 10)
        .def_static("from_bytes", [](const py::bytes& b) { return MBTree::deserialize(from_py(b)); })
        .def("to_bytes", [](const MBTree& t) { return to_py(t.serialize()); })
        .def("sign", [](MBTree& t, const py::bytes& priv, const std::string& scheme) {
            t.sign(provider_for(scheme), from_py(priv));
        }, py::arg("private_key"), py::arg("scheme") = "ed25519")
        .def("verify_signature", [](const MBTree& t, const py::bytes& pub, const std::string& scheme) {
            return t.verify_signature(provider_for(scheme), from_py(pub));
        }, py::arg("public_key"), py::arg("scheme") = "ed25519")
        .def_property_readonly("corpus", [](const MBTree& t) {
            return std::vector<std::string>(t.corpus().begin(), t.corpus().end());
        })
        .def_property_readonly("root_digest", [](const MBTree& t) { return to_hex(t.root_digest()); })
        .def_property_readonly("height", &MBTree::height)
        .def_property_readonly("fanout", &MBTree::fanout)
        .def("__len__", &MBTree::size)
        .def("search", [](const MBTree& t, const std::string& q, double theta) { return search(t, {q, theta}); })
        .def("topk", [](const MBTree& t, const std::string& q, std::uint32_t k, double theta) {
            const auto r = topk_search(t, {q, k, theta});
            return py::make_tuple(r.R, r.dist);
        })
        .def("respond", [](const MBTree& t, const std::string& q, double theta, const std::string& mode,
                           const EmbeddingFunction* f, std::uint32_t topk) { return respond(t, f, q, theta, mode, topk); },
             py::arg("q"), py::arg("theta"), py::arg("mode") = "vs2", py::arg("embedding") = nullptr,
             py::arg("topk") = 0, "Server answer as response-file bytes.");

    py::class_<EmbeddingFunction>(m, "Embedding")
        .def(py::init([](const std::vector<std::string>& corpus, std::uint32_t dim, std::uint64_t seed) {
            return build_embedding(corpus, dim, seed);
        }), py::arg("corpus"), py::arg("dim") = 5, py::arg("seed") = 0)
        .def_static("from_bytes", [](const py::bytes& b) { return EmbeddingFunction::deserialize(from_py(b)); })
        .def("to_bytes", [](const EmbeddingFunction& f) { return to_py(f.serialize()); })
        .def_property_readonly("dim", &EmbeddingFunction::dim)
        .def_property_readonly("reference_sets", &EmbeddingFunction::reference_sets)
        .def("embed", [](const EmbeddingFunction& f, const std::string& s) { return f.embed(std::string_view(s)); });

    m.def("euclid", &euclid);

    py::class_<Counters>(m, "Counters")
        .def_readonly("distance_ops", &Counters::distance_ops)
        .def_readonly("range_bound_ops", &Counters::range_bound_ops)
        .def_readonly("euclid_ops", &Counters::euclid_ops)
        .def_readonly("embed_distance_ops", &Counters::embed_distance_ops)
        .def_readonly("vo_bytes", &Counters::vo_bytes)
        .def_property_readonly("edit_ops", &Counters::edit_ops);

    py::class_<VerificationReport>(m, "Report")
        .def_readonly("passed", &VerificationReport::passed)
        .def_property_readonly("step", [](const VerificationReport& r) { return std::string(step_name(r.failed_step)); })
        .def_property_readonly("diagnosis",
                               [](const VerificationReport& r) { return std::string(diagnosis_name(r.diagnosis)); })
        .def_readonly("detail", &VerificationReport::detail)
        .def_readonly("counters", &VerificationReport::counters)
        .def("__bool__", [](const VerificationReport& r) { return r.passed; })
        .def("__repr__", [](const VerificationReport& r) {
            return r.passed ? std::string("<Report passed>")
                            : "<Report " + std::string(step_name(r.failed_step)) + " " +
                                  std::string(diagnosis_name(r.diagnosis)) + ">";
        });

    m.def("verify", &check, py::arg("response"), py::arg("q"), py::arg("theta"), py::arg("public_key"),
          py::arg("embedding") = nullptr, py::arg("scheme") = "ed25519",
          "Client check of response-file bytes.");

    m.def("response_results", [](const py::bytes& response) { return Response::deserialize(from_py(response)).R; });

    m.def("attack", [](const MBTree& tree, const std::string& kind, const std::string& q, double theta,
                       const std::string& mode, const EmbeddingFunction* f, std::uint32_t topk, std::uint64_t seed,
                       const std::string& victim) -> py::object {
        AttackContext ctx{&tree, f, nullptr, parse_mode(mode), {q, theta}, std::nullopt};
        if (topk > 0) {
            ctx.topk = topk;
        }
        const auto forged = apply_attack(honest_message(ctx), {parse_attack(kind), seed, 1, victim}, ctx);
        if (!forged.applied) {
            return py::none();
        }
        const Response r{ctx.mode, topk, forged.message.R, tree.signature(), forged.message.vo};
        return py::make_tuple(to_py(r.serialize()), std::string(step_name(forged.expected_step)),
                              std::string(diagnosis_name(forged.expected)));
    }, py::arg("index"), py::arg("kind"), py::arg("q"), py::arg("theta"), py::arg("mode") = "vs2",
       py::arg("embedding") = nullptr, py::arg("topk") = 0, py::arg("seed") = 0, py::arg("victim") = "",
       "Forged response bytes with the expected (step, diagnosis), or None if the attack has no target.");
}
