#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "autoss/query_ext.hpp"
#include "evs2_plan.hpp"
#include "traversal.hpp"
#include "verifier.hpp"

namespace autoss {
namespace {

constexpr std::string_view kBundleMagic = "MQB1";

bool provably_similar(std::uint32_t pivot_dist, std::uint32_t d12, double theta) {
    return static_cast<double>(pivot_dist) + d12 <= theta;
}

bool provably_dissimilar(std::uint32_t pivot_dist, std::uint32_t d12, double theta) {
    return static_cast<double>(pivot_dist) - static_cast<double>(d12) > theta;
}

struct ProvenIndex {
    std::unordered_map<std::string, std::pair<std::uint32_t, std::uint32_t>> by_text; // ordinal, distance
};

struct QueryState {
    VOEntry root;
    std::vector<std::string> R;
    std::vector<KnownDistance> plain;
    ProvenIndex proven;
};

std::size_t str_bytes(const VOEntry& e) { return encoded_size(e); }

// Replaces runs of Str entries that an earlier query already proved on the
// right side of theta with exemption runs, when that is smaller.
void exempt_leaf(VOEntry& group, const std::vector<QueryState>& done, const std::vector<std::uint32_t>& d,
                 const std::vector<std::string>& R, double theta, std::size_t& exempted) {
    const auto& kids = group.children;
    const std::size_t n = kids.size();
    struct Option {
        std::uint32_t ordinal;
        std::uint32_t dist;
    };
    // options[k][i]: whether pivot i can vouch for child k.
    std::vector<std::vector<std::optional<Option>>> options(n, std::vector<std::optional<Option>>(done.size()));
    for (std::size_t k = 0; k < n; ++k) {
        if (kids[k].kind != VOEntry::Kind::str) {
            continue;
        }
        const bool in_r = std::binary_search(R.begin(), R.end(), kids[k].text);
        for (std::size_t i = 0; i < done.size(); ++i) {
            auto it = done[i].proven.by_text.find(kids[k].text);
            if (it == done[i].proven.by_text.end()) {
                continue;
            }
            const auto [ordinal, dist] = it->second;
            const bool ok = in_r ? provably_similar(dist, d[i], theta) : provably_dissimilar(dist, d[i], theta);
            if (ok) {
                options[k][i] = Option{ordinal, dist};
            }
        }
    }
    std::vector<VOEntry> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n;) {
        std::size_t best_len = 0;
        std::size_t best_pivot = 0;
        for (std::size_t i = 0; i < done.size(); ++i) {
            if (!options[k][i]) {
                continue;
            }
            std::size_t len = 1;
            while (k + len < n && options[k + len][i] && options[k + len][i]->ordinal == options[k][i]->ordinal + len) {
                ++len;
            }
            if (len > best_len) {
                best_len = len;
                best_pivot = i;
            }
        }
        std::size_t plain_bytes = 0;
        for (std::size_t t = 0; t < best_len; ++t) {
            plain_bytes += str_bytes(kids[k + t]);
        }
        if (best_len == 0 || 13 + 4 * best_len >= plain_bytes) {
            out.push_back(kids[k]);
            ++k;
            continue;
        }
        std::vector<std::uint32_t> claimed;
        for (std::size_t t = 0; t < best_len; ++t) {
            claimed.push_back(options[k + t][best_pivot]->dist);
        }
        out.push_back(VOEntry::make_exempt_run(static_cast<std::uint32_t>(best_pivot), options[k][best_pivot]->ordinal,
                                               std::move(claimed)));
        exempted += best_len;
        k += best_len;
    }
    group.children = std::move(out);
}

void exempt_all(VOEntry& e, const std::vector<QueryState>& done, const std::vector<std::uint32_t>& d,
                const std::vector<std::string>& R, double theta, std::size_t& exempted) {
    if (!e.is_group() || e.children.empty()) {
        return;
    }
    if (e.children.front().is_string_like()) {
        exempt_leaf(e, done, d, R, theta, exempted);
        return;
    }
    for (auto& child : e.children) {
        exempt_all(child, done, d, R, theta, exempted);
    }
}

Digest mf_key(const VOEntry& e) { return node_digest(e.range.lo, e.range.hi, e.kids); }

void collect_mfs(const VOEntry& e, std::vector<Digest>& out) {
    for_each_leaf_entry(e, [&](const VOEntry& leaf) {
        if (leaf.kind == VOEntry::Kind::mf) {
            out.push_back(mf_key(leaf));
        }
    });
}

template <typename Fn>
void rewrite(VOEntry& e, Fn&& fn) {
    if (e.is_group()) {
        for (auto& child : e.children) {
            rewrite(child, fn);
        }
    } else {
        fn(e);
    }
}

} // namespace

TriangleSkips triangle_prune(std::span<const KnownDistance> dists_q1, std::uint32_t d12, double theta) {
    TriangleSkips out;
    for (const auto& kd : dists_q1) {
        if (provably_dissimilar(kd.dist, d12, theta)) {
            out.skip_dissimilar.push_back(kd.text);
        } else if (provably_similar(kd.dist, d12, theta)) {
            out.skip_similar.push_back(kd.text);
        }
    }
    return out;
}

bool removal_flips_candidacy(const MBTree& tree, std::uint32_t node, std::uint32_t removed, std::string_view q,
                             double theta) {
    const auto& n = tree.node(node);
    if (removed < n.first || removed > n.last || n.first == n.last) {
        return false;
    }
    const bool before = detail::is_candidate(tree, node, q, theta);
    const auto lo = removed == n.first ? n.first + 1 : n.first;
    const auto hi = removed == n.last ? n.last - 1 : n.last;
    const StringRange shrunk{tree.text(lo), tree.text(hi)};
    const bool after = static_cast<double>(dst_min(q, shrunk)) <= theta;
    return !before && after;
}

std::size_t SharedVOBundle::proof_bytes() const {
    std::size_t n = 0;
    for (const auto& mf : shared_mfs) {
        n += encoded_size(mf) - 1;
    }
    for (const auto& rect : shared_dbhs) {
        n += encoded_size(rect);
    }
    for (const auto& section : sections) {
        n += encoded_size(section.vo);
    }
    return n;
}

Bytes SharedVOBundle::serialize(ByteView signature) const {
    ByteWriter w;
    w.raw(kBundleMagic);
    w.u8(static_cast<std::uint8_t>(mode));
    w.f64(theta);
    w.u32(static_cast<std::uint32_t>(queries.size()));
    for (const auto& q : queries) {
        w.str(q);
    }
    w.blob(signature);
    w.u32(static_cast<std::uint32_t>(shared_mfs.size()));
    for (const auto& mf : shared_mfs) {
        w.str(mf.range.lo);
        w.str(mf.range.hi);
        w.raw(mf.kids);
    }
    encode_rects(w, shared_dbhs);
    w.u32(static_cast<std::uint32_t>(sections.size()));
    for (const auto& section : sections) {
        w.u32(static_cast<std::uint32_t>(section.R.size()));
        for (const auto& s : section.R) {
            w.str(s);
        }
        w.blob(encode_vo(section.vo));
    }
    return w.take();
}

SharedVOBundle SharedVOBundle::deserialize(ByteView bytes, Bytes& signature) {
    ByteReader r(bytes);
    r.expect_magic(kBundleMagic);
    SharedVOBundle b;
    const auto mode = r.u8();
    if (mode > 1) {
        r.fail("unknown mode");
    }
    b.mode = static_cast<Mode>(mode);
    b.theta = r.f64();
    const auto count = r.u32();
    if (count > r.remaining() / 4) {
        r.fail("implausible query count");
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        b.queries.push_back(r.str());
    }
    signature = r.blob();
    const auto mfs = r.u32();
    if (mfs > r.remaining() / 40) {
        r.fail("implausible shared range count");
    }
    for (std::uint32_t i = 0; i < mfs; ++i) {
        auto lo = r.str();
        auto hi = r.str();
        auto raw = r.raw(32);
        Digest kids{};
        std::copy(raw.begin(), raw.end(), kids.begin());
        b.shared_mfs.push_back(VOEntry::make_mf({std::move(lo), std::move(hi)}, kids));
    }
    b.shared_dbhs = decode_rects(r);
    const auto sections = r.u32();
    if (sections != count) {
        r.fail("section count differs from query count");
    }
    for (std::uint32_t i = 0; i < sections; ++i) {
        Section s;
        const auto n = r.u32();
        if (n > r.remaining() / 4) {
            r.fail("implausible result count");
        }
        for (std::uint32_t k = 0; k < n; ++k) {
            s.R.push_back(r.str());
        }
        const auto vo = r.blob();
        s.vo = decode_vo(vo, true);
        b.sections.push_back(std::move(s));
    }
    if (!r.done()) {
        r.fail("trailing bytes after bundle");
    }
    return b;
}

SharedVOBundle build_multi_vo(const MBTree& tree, const EmbeddingFunction* f, const MultiQuery& mq, Mode mode,
                              const EmbeddedCorpus* cache, MultiBuildStats* stats) {
    if (mq.strings.empty()) {
        throw Error("multi-query needs at least one query string");
    }
    if (std::set<std::string>(mq.strings.begin(), mq.strings.end()).size() != mq.strings.size()) {
        throw Error("duplicate query string");
    }
    if (mode == Mode::evs2 && f == nullptr) {
        throw Error("E-VS2 needs an embedding function");
    }
    MultiBuildStats local_stats;
    MultiBuildStats& st = stats ? *stats : local_stats;
    st = {};
    const double theta = mq.theta;

    std::vector<QueryState> done;
    std::vector<Hyperrect> rects; // every DBH created so far, by global id
    for (std::size_t j = 0; j < mq.strings.size(); ++j) {
        const auto& q = mq.strings[j];
        const auto sk = detail::traverse(tree, q, theta);
        QueryState state;
        for (auto id : sk.similar) {
            state.R.push_back(tree.text(id));
        }

        if (mode == Mode::vs2) {
            state.root = detail::render_plain(tree, sk.root);
            st.independent_bytes += encoded_size(state.root);
        } else {
            const auto plan = detail::plan_evs2(tree, *f, cache, sk, q, theta, sk.similar);
            const auto fresh_all = partition_ds(plan.pq, plan.ds_points, theta);
            std::size_t bytes_all = 0;
            for (const auto& rect : fresh_all.rects) {
                bytes_all += encoded_size(rect);
            }

            // Alternative: route points into distant DBHs of earlier queries.
            std::vector<std::optional<std::uint32_t>> reuse(plan.ds.size());
            std::vector<std::optional<bool>> distant(rects.size());
            std::vector<EmbeddedPoint> rest;
            std::vector<std::size_t> rest_index;
            for (std::size_t k = 0; k < plan.ds.size(); ++k) {
                for (std::uint32_t g = 0; g < rects.size(); ++g) {
                    if (!rects[g].contains(plan.ds_points[k])) {
                        continue;
                    }
                    if (!distant[g]) {
                        distant[g] = is_distant(plan.pq, rects[g], theta);
                    }
                    if (*distant[g]) {
                        reuse[k] = g;
                        break;
                    }
                }
                if (!reuse[k]) {
                    rest.push_back(plan.ds_points[k]);
                    rest_index.push_back(k);
                }
            }
            std::vector<std::uint32_t> rect_of(plan.ds.size(), 0);
            const auto fresh_rest = partition_ds(plan.pq, rest, theta);
            std::size_t bytes_rest = 0;
            for (const auto& rect : fresh_rest.rects) {
                bytes_rest += encoded_size(rect);
            }
            const auto base = static_cast<std::uint32_t>(rects.size());
            if (rest.size() < plan.ds.size() && bytes_rest < bytes_all) {
                for (std::size_t k = 0; k < plan.ds.size(); ++k) {
                    if (reuse[k]) {
                        rect_of[k] = *reuse[k];
                        ++st.reused_dbh_points;
                    }
                }
                for (std::size_t t = 0; t < rest_index.size(); ++t) {
                    rect_of[rest_index[t]] = base + fresh_rest.owner[t];
                }
                rects.insert(rects.end(), fresh_rest.rects.begin(), fresh_rest.rects.end());
            } else {
                for (std::size_t k = 0; k < plan.ds.size(); ++k) {
                    rect_of[k] = base + fresh_all.owner[k];
                }
                rects.insert(rects.end(), fresh_all.rects.begin(), fresh_all.rects.end());
            }
            state.root = detail::render_evs2(tree, sk, plan.ds, rect_of);
            st.independent_bytes += encoded_size(state.root) + 5 + bytes_all;
        }

        if (j > 0) {
            std::vector<std::uint32_t> d;
            for (const auto& pivot : mq.strings) {
                if (d.size() == j) {
                    break;
                }
                d.push_back(static_cast<std::uint32_t>(edit_distance(pivot, q)));
            }
            exempt_all(state.root, done, d, state.R, theta, st.exempted_strings);
        }
        for_each_leaf_entry(state.root, [&](const VOEntry& e) {
            if (e.kind == VOEntry::Kind::str) {
                const auto id = tree.find(e.text);
                const auto dist = sk.dist.at(*id);
                state.proven.by_text.emplace(e.text, std::make_pair(static_cast<std::uint32_t>(state.plain.size()), dist));
                state.plain.push_back({e.text, dist});
            }
        });
        done.push_back(std::move(state));
    }

    SharedVOBundle bundle;
    bundle.mode = mode;
    bundle.theta = theta;
    bundle.queries = mq.strings;

    // False-hit subtrees used by two or more queries move to the table.
    std::map<Digest, std::size_t> mf_users;
    std::map<Digest, std::uint32_t> mf_slot;
    for (const auto& state : done) {
        std::vector<Digest> keys;
        collect_mfs(state.root, keys);
        for (const auto& key : std::set<Digest>(keys.begin(), keys.end())) {
            ++mf_users[key];
        }
    }
    // DBHs referenced by two or more queries move to the table too.
    std::vector<std::set<std::size_t>> rect_users(rects.size());
    for (std::size_t j = 0; j < done.size(); ++j) {
        for_each_leaf_entry(done[j].root, [&](const VOEntry& e) {
            if (e.kind == VOEntry::Kind::dbh_ref) {
                rect_users[e.index].insert(j);
            }
        });
    }
    std::vector<std::optional<std::uint32_t>> rect_slot(rects.size());
    for (std::size_t g = 0; g < rects.size(); ++g) {
        if (rect_users[g].size() >= 2) {
            rect_slot[g] = static_cast<std::uint32_t>(bundle.shared_dbhs.size());
            bundle.shared_dbhs.push_back(rects[g]);
        }
    }

    for (auto& state : done) {
        std::map<std::uint32_t, std::uint32_t> local_slot;
        std::vector<Hyperrect> local;
        rewrite(state.root, [&](VOEntry& e) {
            if (e.kind == VOEntry::Kind::mf) {
                const auto key = mf_key(e);
                if (mf_users[key] < 2) {
                    return;
                }
                auto [it, inserted] = mf_slot.emplace(key, static_cast<std::uint32_t>(bundle.shared_mfs.size()));
                if (inserted) {
                    bundle.shared_mfs.push_back(e);
                }
                e = VOEntry::make_shared_mf(it->second);
            } else if (e.kind == VOEntry::Kind::dbh_ref) {
                if (rect_slot[e.index]) {
                    e = VOEntry::make_shared_dbh_ref(std::move(e.text), *rect_slot[e.index]);
                    return;
                }
                auto [it, inserted] = local_slot.emplace(e.index, static_cast<std::uint32_t>(local.size()));
                if (inserted) {
                    local.push_back(rects[e.index]);
                }
                e.index = it->second;
            }
        });
        SharedVOBundle::Section section;
        section.R = std::move(state.R);
        section.vo.root = std::move(state.root);
        if (mode == Mode::evs2) {
            section.vo.dbhs = std::move(local);
        }
        bundle.sections.push_back(std::move(section));
    }
    return bundle;
}

std::vector<VerificationReport> verify_multi(const MultiQuery& mq, const SharedVOBundle& bundle,
                                             const EmbeddingFunction* f, const SignatureProvider& provider,
                                             ByteView public_key, ByteView signature) {
    std::vector<VerificationReport> reports(mq.strings.size());
    auto fail_all = [&](const std::string& why) {
        for (auto& r : reports) {
            r.passed = false;
            r.failed_step = Step::step1;
            r.diagnosis = Diagnosis::malformed_vo;
            r.detail = why;
        }
        return reports;
    };
    if (bundle.queries != mq.strings || bundle.sections.size() != mq.strings.size()) {
        return fail_all("bundle answers a different query list");
    }
    if (bundle.theta != mq.theta) {
        return fail_all("bundle was built for a different threshold");
    }
    if (bundle.mode == Mode::evs2 && f == nullptr) {
        throw Error("E-VS2 verification needs the embedding function");
    }
    for (const auto& mf : bundle.shared_mfs) {
        if (mf.kind != VOEntry::Kind::mf) {
            return fail_all("shared table holds a non-range entry");
        }
    }

    detail::SharedTable table{bundle.shared_mfs, bundle.shared_dbhs};
    std::vector<detail::PivotRecord> pivots;
    std::vector<std::vector<EmbeddedPoint>> slot_points(table.dbhs.size());
    std::vector<std::set<std::size_t>> slot_users(table.dbhs.size());
    for (std::size_t j = 0; j < mq.strings.size(); ++j) {
        detail::VerifyInput in;
        in.q = mq.strings[j];
        in.theta = mq.theta;
        in.mode = bundle.mode;
        in.provider = &provider;
        in.public_key = public_key;
        in.signature = signature;
        in.embedding = f;
        in.table = &table;
        in.pivots = std::span<const detail::PivotRecord>(pivots.data(), pivots.size());
        auto out = detail::verify_core(in, bundle.sections[j].R, bundle.sections[j].vo);
        reports[j] = out.report;
        for (auto& [slot, p] : out.shared_points) {
            slot_points[slot].push_back(std::move(p));
            slot_users[slot].insert(j);
        }
        pivots.push_back({mq.strings[j], out.report.passed, std::move(out.plain)});
    }
    // A shared DBH must be exactly the box around every point citing it.
    for (std::size_t slot = 0; slot < table.dbhs.size(); ++slot) {
        if (slot_points[slot].empty() || mbh(slot_points[slot]) == table.dbhs[slot]) {
            continue;
        }
        for (auto j : slot_users[slot]) {
            if (reports[j].passed) {
                reports[j].passed = false;
                reports[j].failed_step = Step::step4;
                reports[j].diagnosis = Diagnosis::dbh_not_tight;
                reports[j].detail = "shared DBH " + std::to_string(slot) + " is not the bounding box of its strings";
            }
        }
    }
    return reports;
}

} // namespace autoss
