#include <algorithm>
#include <numeric>

#include "autoss/query_ext.hpp"
#include "evs2_plan.hpp"
#include "traversal.hpp"
#include "verifier.hpp"

namespace autoss {
namespace {

struct Ranked {
    std::vector<std::uint32_t> ids;
    std::vector<std::uint32_t> dist;
    std::size_t c = 0;
};

Ranked rank(const MBTree& tree, const TopKQuery& tq) {
    if (tq.k == 0) {
        throw Error("k must be at least 1");
    }
    const auto sk = detail::traverse(tree, tq.q, tq.theta);
    Ranked out;
    out.ids = sk.similar;
    out.c = out.ids.size();
    // Ids are in dictionary order already, so a stable sort by distance
    // yields the (distance, dictionary) ranking.
    std::stable_sort(out.ids.begin(), out.ids.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return sk.dist.at(a) < sk.dist.at(b); });
    if (out.ids.size() > tq.k) {
        out.ids.resize(tq.k);
    }
    for (auto id : out.ids) {
        out.dist.push_back(sk.dist.at(id));
    }
    return out;
}

} // namespace

TopKResult topk_search(const MBTree& tree, const TopKQuery& tq) {
    const auto ranked = rank(tree, tq);
    TopKResult out;
    for (auto id : ranked.ids) {
        out.R.push_back(tree.text(id));
    }
    out.dist = ranked.dist;
    out.c = ranked.c;
    return out;
}

TopKProof topk_build_vo(const MBTree& tree, const TopKQuery& tq, Mode mode, const EmbeddingFunction* f,
                        const EmbeddedCorpus* cache) {
    const auto ranked = rank(tree, tq);
    TopKProof proof;
    proof.vo_theta = ranked.c > tq.k ? static_cast<double>(ranked.dist.back()) : tq.theta;
    const auto sk = detail::traverse(tree, tq.q, proof.vo_theta);
    auto result_ids = ranked.ids;
    std::sort(result_ids.begin(), result_ids.end());
    proof.vo = detail::assemble_vo(tree, mode, f, cache, sk, tq.q, proof.vo_theta, result_ids);
    for (auto id : ranked.ids) {
        proof.R.push_back(tree.text(id));
    }
    return proof;
}

VerificationReport topk_verify(const TopKQuery& tq, std::span<const std::string> R, const VerificationObject& vo,
                               const EmbeddingFunction* f, const SignatureProvider& provider, ByteView public_key,
                               ByteView signature) {
    if (tq.k == 0) {
        throw Error("k must be at least 1");
    }
    detail::VerifyInput in;
    in.q = tq.q;
    in.theta = tq.theta;
    in.mode = vo.mode();
    in.topk = tq.k;
    in.provider = &provider;
    in.public_key = public_key;
    in.signature = signature;
    in.embedding = f;
    if (in.mode == Mode::evs2 && f == nullptr) {
        throw Error("E-VS2 verification needs the embedding function");
    }
    return detail::verify_core(in, R, vo).report;
}

} // namespace autoss
