#include "autoss/vs2.hpp"

#include "traversal.hpp"
#include "verifier.hpp"

namespace autoss {

std::string_view step_name(Step step) noexcept {
    switch (step) {
    case Step::none:
        return "none";
    case Step::step1:
        return "step1";
    case Step::step2:
        return "step2";
    case Step::step3:
        return "step3";
    case Step::step4:
        return "step4";
    }
    return "?";
}

std::string_view diagnosis_name(Diagnosis diagnosis) noexcept {
    switch (diagnosis) {
    case Diagnosis::ok:
        return "ok";
    case Diagnosis::tampered:
        return "tampered";
    case Diagnosis::overlap_range:
        return "overlap_range";
    case Diagnosis::string_in_nc_range:
        return "string_in_nc_range";
    case Diagnosis::signature_mismatch:
        return "signature_mismatch";
    case Diagnosis::similar_missing:
        return "similar_missing";
    case Diagnosis::dissimilar_returned:
        return "dissimilar_returned";
    case Diagnosis::candidate_claimed_nc:
        return "candidate_claimed_nc";
    case Diagnosis::dbh_not_distant:
        return "dbh_not_distant";
    case Diagnosis::point_not_in_claimed_dbh:
        return "point_not_in_claimed_dbh";
    case Diagnosis::similar_inside_dbh:
        return "similar_inside_dbh";
    case Diagnosis::malformed_vo:
        return "malformed_vo";
    case Diagnosis::rank_order_violation:
        return "rank_order_violation";
    case Diagnosis::bad_exemption:
        return "bad_exemption";
    case Diagnosis::dbh_not_tight:
        return "dbh_not_tight";
    }
    return "?";
}

std::vector<std::string> search(const MBTree& tree, const Query& query) {
    const auto sk = detail::traverse(tree, query.q, query.theta);
    std::vector<std::string> R;
    R.reserve(sk.similar.size());
    for (auto id : sk.similar) {
        R.push_back(tree.text(id));
    }
    return R;
}

SearchResult build_vo(const MBTree& tree, const Query& query) {
    const auto sk = detail::traverse(tree, query.q, query.theta);
    SearchResult out;
    for (auto id : sk.similar) {
        out.R.push_back(tree.text(id));
    }
    out.vo.root = detail::render_plain(tree, sk.root);
    return out;
}

VerificationReport verify(const Query& query, std::span<const std::string> R, const VerificationObject& vo,
                          const SignatureProvider& provider, ByteView public_key, ByteView signature) {
    detail::VerifyInput in;
    in.q = query.q;
    in.theta = query.theta;
    in.mode = Mode::vs2;
    in.provider = &provider;
    in.public_key = public_key;
    in.signature = signature;
    return detail::verify_core(in, R, vo).report;
}

} // namespace autoss
