#include "verifier.hpp"

#include <algorithm>
#include <set>

#include "autoss/metrics.hpp"

namespace autoss::detail {
namespace {

struct Failure {
    Step step;
    Diagnosis diagnosis;
    std::string detail;
};

[[noreturn]] void fail(Step step, Diagnosis diagnosis, std::string detail) {
    throw Failure{step, diagnosis, std::move(detail)};
}

[[noreturn]] void malformed(std::string detail) { fail(Step::step1, Diagnosis::malformed_vo, std::move(detail)); }

// One leaf-level item of the VO after flattening, in dictionary order.
struct Flat {
    enum class Kind : std::uint8_t { str, dbh_ref, exempt, mf };
    Kind kind = Kind::str;
    std::string_view text;
    const StringRange* range = nullptr;
    bool shared_rect = false;
    std::uint32_t rect = 0;
    std::uint32_t pivot = 0;
    std::uint32_t pivot_dist = 0;
    std::uint32_t claimed = 0;
    std::optional<std::size_t> r_index;

    std::string_view key() const { return kind == Kind::mf ? std::string_view(range->lo) : text; }
    std::string_view max() const { return kind == Kind::mf ? std::string_view(range->hi) : text; }
    bool is_string() const { return kind != Kind::mf; }
};

struct Summary {
    std::string_view lo;
    std::string_view hi;
    Digest digest{};
};

class Checker {
public:
    Checker(const VerifyInput& in, std::span<const std::string> R, const VerificationObject& vo)
        : in_(in), R_(R), vo_(vo) {}

    VerifyOutput run() {
        VerifyOutput out;
        try {
            const Summary root = step1();
            step2(root);
            step3(out);
            if (in_.mode == Mode::evs2) {
                step4(out);
            }
        } catch (const Failure& f) {
            out.report.passed = false;
            out.report.failed_step = f.step;
            out.report.diagnosis = f.diagnosis;
            out.report.detail = f.detail;
        }
        counters_.vo_bytes = encoded_size(vo_);
        out.report.counters = counters_;
        return out;
    }

private:
    Summary step1() {
        if (vo_.mode() != in_.mode) {
            malformed("VO mode does not match the query mode");
        }
        if (in_.mode == Mode::evs2) {
            if (in_.embedding == nullptr) {
                throw Error("E-VS2 verification needs the embedding function");
            }
            for (const auto& rect : *vo_.dbhs) {
                check_rect(rect);
            }
        }
        if (vo_.root.is_string_like()) {
            malformed("VO root must be a group or a false-hit subtree");
        }
        const Summary root = walk(vo_.root, 0);

        for (std::size_t k = 1; k < flat_.size(); ++k) {
            if (compare(flat_[k - 1].max(), flat_[k].key()) >= 0) {
                const bool range_involved = !flat_[k - 1].is_string() || !flat_[k].is_string();
                fail(Step::step1, range_involved ? Diagnosis::overlap_range : Diagnosis::malformed_vo,
                     "VO entries out of order near '" + std::string(flat_[k].key()) + "'");
            }
        }

        for (const auto& s : R_) {
            if (!is_valid_utf8(s)) {
                malformed("result string is not valid UTF-8");
            }
        }
        if (in_.topk && R_.size() > *in_.topk) {
            malformed("more than k results returned");
        }
        std::vector<std::string_view> sorted(R_.begin(), R_.end());
        std::sort(sorted.begin(), sorted.end(), phi_less);
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            malformed("duplicate result string");
        }
        if (!in_.topk && !std::equal(sorted.begin(), sorted.end(), R_.begin(), R_.end())) {
            malformed("results are not in dictionary order");
        }
        for (std::size_t k = 0; k < R_.size(); ++k) {
            const std::string_view s = R_[k];
            auto it = std::upper_bound(flat_.begin(), flat_.end(), s,
                                       [](std::string_view v, const Flat& f) { return compare(v, f.key()) < 0; });
            if (it != flat_.begin()) {
                auto& item = *std::prev(it);
                if (item.is_string() && item.text == s) {
                    item.r_index = k;
                    continue;
                }
                if (!item.is_string() && item.range->contains(s)) {
                    fail(Step::step1, Diagnosis::string_in_nc_range,
                         "result '" + std::string(s) + "' lies inside a false-hit range");
                }
            }
            fail(Step::step1, Diagnosis::tampered, "result '" + std::string(s) + "' is not covered by the VO");
        }
        return root;
    }

    void check_rect(const Hyperrect& rect) const {
        if (!rect.valid() || rect.dim() != in_.embedding->dim()) {
            malformed("invalid DBH rectangle");
        }
    }

    Summary walk(const VOEntry& e, std::size_t depth) {
        if (depth > kMaxVODepth) {
            malformed("VO nesting too deep");
        }
        switch (e.kind) {
        case VOEntry::Kind::mf:
            return add_range(e);
        case VOEntry::Kind::shared_mf:
            if (in_.table == nullptr || e.index >= in_.table->mfs.size()) {
                malformed("dangling shared false-hit reference");
            }
            return add_range(in_.table->mfs[e.index]);
        case VOEntry::Kind::group:
            break;
        default:
            malformed("string entry outside a leaf group");
        }
        if (e.children.empty()) {
            malformed("empty group");
        }
        const bool leaf = e.children.front().is_string_like();
        for (const auto& child : e.children) {
            if (child.is_string_like() != leaf) {
                malformed("group mixes strings and subtrees");
            }
        }
        if (leaf) {
            std::vector<Digest> hashes;
            const std::size_t begin = flat_.size();
            for (const auto& child : e.children) {
                add_strings(child);
            }
            for (std::size_t k = begin; k < flat_.size(); ++k) {
                hashes.push_back(string_hash(flat_[k].text));
            }
            Summary s{flat_[begin].text, flat_.back().text, {}};
            s.digest = node_digest(s.lo, s.hi, kids_digest(hashes));
            return s;
        }
        std::vector<Digest> digests;
        std::string_view lo;
        std::string_view hi;
        for (std::size_t k = 0; k < e.children.size(); ++k) {
            const Summary child = walk(e.children[k], depth + 1);
            if (k == 0) {
                lo = child.lo;
            }
            hi = child.hi;
            digests.push_back(child.digest);
        }
        return {lo, hi, node_digest(lo, hi, kids_digest(digests))};
    }

    Summary add_range(const VOEntry& e) {
        if (!e.range.valid()) {
            malformed("false-hit range has lo after hi");
        }
        Flat f;
        f.kind = Flat::Kind::mf;
        f.range = &e.range;
        flat_.push_back(f);
        return {e.range.lo, e.range.hi, node_digest(e.range.lo, e.range.hi, e.kids)};
    }

    void add_strings(const VOEntry& e) {
        Flat f;
        f.text = e.text;
        switch (e.kind) {
        case VOEntry::Kind::str:
            f.kind = Flat::Kind::str;
            flat_.push_back(f);
            return;
        case VOEntry::Kind::dbh_ref:
            if (in_.mode != Mode::evs2 || e.index >= vo_.dbhs->size()) {
                malformed("dangling DBH reference");
            }
            f.kind = Flat::Kind::dbh_ref;
            f.rect = e.index;
            flat_.push_back(f);
            return;
        case VOEntry::Kind::shared_dbh_ref:
            if (in_.mode != Mode::evs2 || in_.table == nullptr || e.index >= in_.table->dbhs.size()) {
                malformed("dangling shared DBH reference");
            }
            check_rect(in_.table->dbhs[e.index]);
            f.kind = Flat::Kind::dbh_ref;
            f.shared_rect = true;
            f.rect = e.index;
            flat_.push_back(f);
            return;
        case VOEntry::Kind::exempt_run: {
            if (e.index >= in_.pivots.size()) {
                fail(Step::step1, Diagnosis::bad_exemption, "exemption names an unknown pivot query");
            }
            const auto& pivot = in_.pivots[e.index];
            if (!pivot.verified) {
                fail(Step::step1, Diagnosis::bad_exemption, "exemption relies on an unverified query");
            }
            if (std::uint64_t{e.first} + e.claimed.size() > pivot.plain.size()) {
                fail(Step::step1, Diagnosis::bad_exemption, "exemption points past the pivot's proven strings");
            }
            for (std::size_t k = 0; k < e.claimed.size(); ++k) {
                const auto& proven = pivot.plain[e.first + k];
                f.kind = Flat::Kind::exempt;
                f.text = proven.text;
                f.pivot = e.index;
                f.pivot_dist = proven.dist;
                f.claimed = e.claimed[k];
                flat_.push_back(f);
            }
            return;
        }
        default:
            malformed("unexpected entry in a leaf group");
        }
    }

    void step2(const Summary& root) {
        if (!in_.provider->verify(root.digest, in_.signature, in_.public_key)) {
            fail(Step::step2, Diagnosis::signature_mismatch, "recomputed root digest does not match the signature");
        }
    }

    std::uint32_t distance(std::string_view s) {
        ++counters_.distance_ops;
        return static_cast<std::uint32_t>(edit_distance(in_.q, s));
    }

    double pivot_distance(std::uint32_t pivot) {
        if (pivot_dist_.size() < in_.pivots.size()) {
            pivot_dist_.resize(in_.pivots.size());
        }
        if (!pivot_dist_[pivot]) {
            pivot_dist_[pivot] = distance(in_.pivots[pivot].query);
        }
        return *pivot_dist_[pivot];
    }

    void check_claim(const Flat& f) const {
        if (f.claimed != f.pivot_dist) {
            fail(Step::step3, Diagnosis::bad_exemption,
                 "claimed pivot distance for '" + std::string(f.text) + "' differs from the proven one");
        }
    }

    void step3(VerifyOutput& out) {
        const double theta = in_.theta;
        std::vector<std::uint32_t> rd(R_.size(), 0);
        std::vector<std::size_t> where(R_.size(), 0);
        for (std::size_t k = 0; k < flat_.size(); ++k) {
            if (flat_[k].r_index) {
                where[*flat_[k].r_index] = k;
            }
        }
        for (std::size_t k = 0; k < R_.size(); ++k) {
            const Flat& f = flat_[where[k]];
            if (f.kind == Flat::Kind::exempt) {
                check_claim(f);
                const double bound = f.pivot_dist + pivot_distance(f.pivot);
                if (!(bound <= theta)) {
                    fail(Step::step3, Diagnosis::bad_exemption,
                         "exemption does not prove '" + std::string(f.text) + "' similar");
                }
                rd[k] = static_cast<std::uint32_t>(bound);
                continue;
            }
            rd[k] = distance(R_[k]);
            if (!(rd[k] <= theta)) {
                fail(Step::step3, Diagnosis::dissimilar_returned,
                     "returned '" + R_[k] + "' is at distance " + std::to_string(rd[k]));
            }
        }

        tau_ = theta;
        if (in_.topk) {
            for (std::size_t k = 1; k < R_.size(); ++k) {
                const bool ordered = rd[k - 1] < rd[k] || (rd[k - 1] == rd[k] && phi_less(R_[k - 1], R_[k]));
                if (!ordered) {
                    fail(Step::step3, Diagnosis::rank_order_violation,
                         "rank " + std::to_string(k + 1) + " is closer than rank " + std::to_string(k));
                }
            }
            if (R_.size() == *in_.topk && !R_.empty()) {
                tau_ = static_cast<double>(rd.back()) - 1.0;
            }
        }

        for (const auto& f : flat_) {
            switch (f.kind) {
            case Flat::Kind::str: {
                if (f.r_index) {
                    out.plain.push_back({std::string(f.text), rd[*f.r_index]});
                    break;
                }
                const auto d = distance(f.text);
                out.plain.push_back({std::string(f.text), d});
                if (!(d > tau_)) {
                    fail(Step::step3, Diagnosis::similar_missing,
                         "'" + std::string(f.text) + "' is similar but not returned");
                }
                break;
            }
            case Flat::Kind::exempt:
                if (!f.r_index) {
                    check_claim(f);
                    if (!(f.pivot_dist - pivot_distance(f.pivot) > tau_)) {
                        fail(Step::step3, Diagnosis::bad_exemption,
                             "exemption does not prove '" + std::string(f.text) + "' dissimilar");
                    }
                }
                break;
            case Flat::Kind::mf:
                ++counters_.range_bound_ops;
                if (!(static_cast<double>(dst_min(in_.q, *f.range)) > tau_)) {
                    fail(Step::step3, Diagnosis::candidate_claimed_nc,
                         "range [" + f.range->lo + ", " + f.range->hi + "] may hold similar strings");
                }
                break;
            case Flat::Kind::dbh_ref:
                break;
            }
        }
    }

    EmbeddedPoint embed(std::string_view s) {
        counters_.embed_distance_ops += in_.embedding->embed_cost();
        return in_.embedding->embed(s);
    }

    const Hyperrect& rect_of(bool shared, std::uint32_t index) const {
        return shared ? in_.table->dbhs[index] : (*vo_.dbhs)[index];
    }

    void step4(VerifyOutput& out) {
        const EmbeddedPoint pq = embed(in_.q);
        const auto& local = *vo_.dbhs;
        std::vector<std::vector<EmbeddedPoint>> members(local.size());
        std::set<std::uint32_t> shared_used;
        for (const auto& f : flat_) {
            if (f.kind != Flat::Kind::dbh_ref) {
                continue;
            }
            auto p = embed(f.text);
            ++counters_.containment_ops;
            if (!rect_of(f.shared_rect, f.rect).contains(p)) {
                fail(Step::step4, Diagnosis::point_not_in_claimed_dbh,
                     "'" + std::string(f.text) + "' is outside its claimed DBH");
            }
            if (f.shared_rect) {
                shared_used.insert(f.rect);
                out.shared_points.emplace_back(f.rect, std::move(p));
            } else {
                members[f.rect].push_back(std::move(p));
            }
        }

        std::vector<const Hyperrect*> used;
        for (const auto& rect : local) {
            used.push_back(&rect);
        }
        for (auto slot : shared_used) {
            used.push_back(&in_.table->dbhs[slot]);
        }
        for (const auto* rect : used) {
            ++counters_.euclid_ops;
            if (!(dst_min_rect(pq, *rect) > tau_)) {
                fail(Step::step4, Diagnosis::dbh_not_distant, "a DBH comes within theta of the query");
            }
        }
        for (std::size_t i = 0; i < local.size(); ++i) {
            if (members[i].empty() || !(mbh(members[i]) == local[i])) {
                fail(Step::step4, Diagnosis::dbh_not_tight,
                     "DBH " + std::to_string(i) + " is not the bounding box of its strings");
            }
        }
        for (const auto& s : R_) {
            const auto p = embed(s);
            for (const auto* rect : used) {
                ++counters_.containment_ops;
                if (rect->contains(p)) {
                    fail(Step::step4, Diagnosis::similar_inside_dbh, "result '" + s + "' lies inside a DBH");
                }
            }
        }
    }

    const VerifyInput& in_;
    std::span<const std::string> R_;
    const VerificationObject& vo_;
    std::vector<Flat> flat_;
    std::vector<std::optional<std::uint32_t>> pivot_dist_;
    double tau_ = 0.0;
    Counters counters_;
};

} // namespace

VerifyOutput verify_core(const VerifyInput& in, std::span<const std::string> R, const VerificationObject& vo) {
    if (in.provider == nullptr) {
        throw Error("verification needs a signature provider");
    }
    return Checker(in, R, vo).run();
}

} // namespace autoss::detail
