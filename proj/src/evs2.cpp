#include "autoss/evs2.hpp"

#include <algorithm>
#include <unordered_map>

#include "evs2_plan.hpp"
#include "verifier.hpp"

namespace autoss {

Classification classify_cstrings(const EmbeddingFunction& f, std::string_view q, double theta,
                                 std::span<const std::string> cstrings) {
    Classification out;
    if (cstrings.empty()) {
        return out;
    }
    const auto pq = f.embed(q);
    for (const auto& s : cstrings) {
        (euclid(pq, f.embed(s)) <= theta ? out.fp : out.ds).push_back(s);
    }
    return out;
}

DbhPartition partition_ds(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta) {
    if (pq.size() == 1 && !pts.empty()) {
        auto part = collinear_partition(pq, pts, theta);
        if (partition_valid(pq, pts, theta, part)) {
            return part;
        }
    }
    return partition_points(pq, pts, theta);
}

namespace detail {

EvsPlan plan_evs2(const MBTree& tree, const EmbeddingFunction& f, const EmbeddedCorpus* cache, const Skeleton& sk,
                  std::string_view q, double theta, const std::vector<std::uint32_t>& result_ids) {
    EvsPlan plan;
    plan.pq = f.embed(q);
    std::vector<std::uint32_t> expanded;
    expanded.reserve(sk.dist.size());
    for (const auto& [id, d] : sk.dist) {
        expanded.push_back(id);
    }
    std::sort(expanded.begin(), expanded.end());
    for (auto id : expanded) {
        if (std::binary_search(result_ids.begin(), result_ids.end(), id)) {
            continue;
        }
        auto p = cache ? cache->point(id) : f.embed(tree.text(id));
        if (euclid(plan.pq, p) <= theta) {
            plan.fp.push_back(id);
        } else {
            plan.ds.push_back(id);
            plan.ds_points.push_back(std::move(p));
        }
    }
    return plan;
}

VOEntry render_evs2(const MBTree& tree, const Skeleton& sk, const std::vector<std::uint32_t>& ds,
                    const std::vector<std::uint32_t>& rect_of) {
    std::unordered_map<std::uint32_t, std::uint32_t> rect_by_id;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        rect_by_id.emplace(ds[k], rect_of[k]);
    }
    return render(tree, sk.root, [&](std::uint32_t id) {
        auto it = rect_by_id.find(id);
        if (it == rect_by_id.end()) {
            return VOEntry::make_str(tree.text(id));
        }
        return VOEntry::make_dbh_ref(tree.text(id), it->second);
    });
}

VerificationObject assemble_vo(const MBTree& tree, Mode mode, const EmbeddingFunction* f,
                               const EmbeddedCorpus* cache, const Skeleton& sk, std::string_view q, double theta,
                               const std::vector<std::uint32_t>& result_ids) {
    VerificationObject vo;
    if (mode == Mode::vs2) {
        vo.root = render_plain(tree, sk.root);
        return vo;
    }
    if (f == nullptr) {
        throw Error("E-VS2 needs an embedding function");
    }
    const auto plan = plan_evs2(tree, *f, cache, sk, q, theta, result_ids);
    auto part = partition_ds(plan.pq, plan.ds_points, theta);
    vo.root = render_evs2(tree, sk, plan.ds, part.owner);
    vo.dbhs = std::move(part.rects);
    return vo;
}

} // namespace detail

SearchResult build_vo_e(const MBTree& tree, const EmbeddingFunction& f, const Query& query,
                        const EmbeddedCorpus* cache) {
    const auto sk = detail::traverse(tree, query.q, query.theta);
    SearchResult out;
    for (auto id : sk.similar) {
        out.R.push_back(tree.text(id));
    }
    out.vo = detail::assemble_vo(tree, Mode::evs2, &f, cache, sk, query.q, query.theta, sk.similar);
    return out;
}

VerificationReport verify_e(const Query& query, std::span<const std::string> R, const VerificationObject& vo,
                            const EmbeddingFunction& f, const SignatureProvider& provider, ByteView public_key,
                            ByteView signature) {
    detail::VerifyInput in;
    in.q = query.q;
    in.theta = query.theta;
    in.mode = Mode::evs2;
    in.provider = &provider;
    in.public_key = public_key;
    in.signature = signature;
    in.embedding = &f;
    return detail::verify_core(in, R, vo).report;
}

} // namespace autoss
