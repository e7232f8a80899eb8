// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "autoss/harness.hpp"
#include "oracles.hpp"
#include "traversal.hpp"

using namespace autoss;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 3) {
    std::ostringstream out;
    out.precision(digits);
    out << v;
    return out.str();
}

// Shared by the first two criteria: 50 corpora of 500-2000 names.
struct Instance {
    std::vector<std::string> corpus;
    MBTree tree;
    EmbeddingFunction f;
    std::vector<std::string> queries;
};

Instance make_instance(std::uint64_t seed, const SignatureProvider& signer, ByteView private_key) {
    std::mt19937_64 rng(seed);
    const auto n = 500 + uniform_below(rng, 1501);
    auto corpus = generate_corpus({.n = n}, seed);
    auto tree = build_tree(corpus, static_cast<std::uint32_t>(4 + uniform_below(rng, 13)));
    tree.sign(signer, private_key);
    auto f = build_embedding(tree.corpus(), 5, seed);
    auto queries = generate_queries(corpus, 10, seed);
    return {std::move(corpus), std::move(tree), std::move(f), std::move(queries)};
}

constexpr int kCorpora = 50;
const double kThetas[] = {1, 2, 3};

Outcome oracle_equivalence(const SignatureProvider& signer, const KeyPair& keys) {
    std::size_t checks = 0;
    for (int c = 0; c < kCorpora; ++c) {
        const auto inst = make_instance(1000 + c, signer, keys.private_key);
        std::mt19937_64 rng(c);
        for (const auto& q : inst.queries) {
            // One pass of the oracle serves all thresholds and top-k.
            std::vector<std::pair<std::size_t, std::string>> all;
            for (const auto& s : inst.corpus) {
                all.push_back({oracle::levenshtein(q, s), s});
            }
            std::sort(all.begin(), all.end());
            for (double theta : kThetas) {
                std::vector<std::string> expect;
                for (const auto& [d, s] : all) {
                    if (static_cast<double>(d) <= theta) {
                        expect.push_back(s);
                    }
                }
                const auto ranked = expect;
                std::sort(expect.begin(), expect.end());
                if (search(inst.tree, {q, theta}) != expect) {
                    return {false, "search differs for '" + q + "' theta " + fmt(theta)};
                }
                const auto k = static_cast<std::uint32_t>(1 + uniform_below(rng, 8));
                const auto top = topk_search(inst.tree, {q, k, theta});
                const std::vector<std::string> want(ranked.begin(),
                                                    ranked.begin() + std::min<std::size_t>(k, ranked.size()));
                if (top.R != want || top.c != ranked.size()) {
                    return {false, "top-k differs for '" + q + "'"};
                }
                checks += 2;
            }
        }
    }
    return {true, std::to_string(checks) + " comparisons"};
}

Outcome honest_round_trip(const SignatureProvider& signer, const KeyPair& keys) {
    std::size_t runs = 0;
    for (int c = 0; c < kCorpora; ++c) {
        const auto inst = make_instance(1000 + c, signer, keys.private_key);
        const EmbeddedCorpus cache(inst.f, inst.tree.corpus());
        for (const auto& q : inst.queries) {
            for (double theta : kThetas) {
                const Query query{q, theta};
                const auto plain = build_vo(inst.tree, query);
                const auto r1 = verify(query, plain.R, decode_vo(encode_vo(plain.vo)), signer, keys.public_key,
                                       inst.tree.signature());
                const auto emb = build_vo_e(inst.tree, inst.f, query, &cache);
                const auto r2 = verify_e(query, emb.R, decode_vo(encode_vo(emb.vo)), inst.f, signer, keys.public_key,
                                         inst.tree.signature());
                if (!r1.passed || !r2.passed) {
                    return {false, "rejected honest answer for '" + q + "': " + r1.detail + r2.detail};
                }
                runs += 2;
            }
        }
    }
    return {true, std::to_string(runs) + " honest verifications"};
}

Outcome detection_matrix(const SignatureProvider& signer, const KeyPair& keys) {
    auto tree = build_tree(generate_corpus({.n = 1000}, 7), 10);
    tree.sign(signer, keys.private_key);
    const auto f = build_embedding(tree.corpus(), 5, 7);
    const EmbeddedCorpus cache(f, tree.corpus());
    MatrixConfig config;
    config.queries = generate_queries(tree.corpus(), 20, 7);
    config.trials = 1000;
    config.seed = 7;
    const auto report = run_detection_matrix(tree, f, cache, config, signer, keys.public_key);
    std::size_t live = 0;
    for (const auto& cell : report.cells) {
        live += cell.trials > 0;
    }
    std::cout << report.csv();
    const bool ok = report.misses() == 0 && report.unexpected() == 0 && report.false_alarms == 0 && live >= 14 &&
                    report.attack_trials() == config.trials;
    return {ok, std::to_string(live) + " cells, " + std::to_string(report.attack_trials()) + " attacks, " +
                    std::to_string(report.misses()) + " missed, " + std::to_string(report.unexpected()) +
                    " wrong step, " + std::to_string(report.false_alarms) + " false alarms in " +
                    std::to_string(report.honest_runs) + " honest runs"};
}

Outcome contractiveness() {
    const auto corpus = generate_corpus({.n = 2000}, 4);
    std::mt19937_64 rng(4);
    std::vector<std::string> pool(corpus.begin(), corpus.end());
    for (int i = 0; i < 500; ++i) {
        pool.push_back(oracle::random_string(rng, 0, 15));
    }
    std::size_t pairs = 0, violations = 0;
    for (std::uint32_t d : {2u, 5u, 10u, 25u}) {
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            const auto f = build_embedding(corpus, d, seed);
            const EmbeddedCorpus points(f, pool);
            for (int i = 0; i < 10000; ++i) {
                const auto a = static_cast<std::uint32_t>(uniform_below(rng, pool.size()));
                const auto b = static_cast<std::uint32_t>(uniform_below(rng, pool.size()));
                ++pairs;
                if (euclid(points.point(a), points.point(b)) > static_cast<double>(edit_distance(pool[a], pool[b]))) {
                    ++violations;
                }
            }
        }
    }
    return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(pairs) + " pairs"};
}

bool boxes_valid(const EmbeddedPoint& pq, std::span<const EmbeddedPoint> pts, double theta, const DbhPartition& p) {
    if (p.owner.size() != pts.size()) {
        return false;
    }
    for (std::size_t r = 0; r < p.rects.size(); ++r) {
        if (!(dst_min_rect(pq, p.rects[r]) > theta)) {
            return false;
        }
        for (std::size_t s = r + 1; s < p.rects.size(); ++s) {
            if (p.rects[r].overlaps(p.rects[s])) {
                return false;
            }
        }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!p.rects.at(p.owner[i]).contains(pts[i])) {
            return false;
        }
    }
    return true;
}

Outcome dbh_validity() {
    std::size_t instances = 0, boxes = 0, small = 0;
    // Boxes emitted for real queries.
    for (int c = 0; c < 5; ++c) {
        const auto tree = build_tree(generate_corpus({.n = 1500}, 50 + c), 10);
        for (std::uint32_t d : {2u, 5u, 10u}) {
            const auto f = build_embedding(tree.corpus(), d, c);
            const EmbeddedCorpus cache(f, tree.corpus());
            for (const auto& q : generate_queries(tree.corpus(), 4, c)) {
                for (double theta : kThetas) {
                    const auto pq = f.embed(q);
                    std::vector<EmbeddedPoint> pts;
                    const auto sk = detail::traverse(tree, q, theta);
                    for (auto id : sk.cstrings) {
                        if (euclid(pq, cache.point(id)) > theta) {
                            pts.push_back(cache.point(id));
                        }
                    }
                    const auto part = partition_ds(pq, pts, theta);
                    if (!boxes_valid(pq, pts, theta, part)) {
                        return {false, "invalid boxes for '" + q + "'"};
                    }
                    ++instances;
                    boxes += part.rects.size();
                }
            }
        }
    }
    // Small planar instances against the exhaustive optimum.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 6);
    for (int t = 0; t < 2000; ++t) {
        const EmbeddedPoint pq{3, 3};
        std::vector<EmbeddedPoint> pts;
        const auto n = 1 + uniform_below(rng, 10);
        while (pts.size() < n) {
            EmbeddedPoint p{std::round(u(rng) * 2) / 2, std::round(u(rng) * 2) / 2};
            if (euclid(pq, p) > 1.0) {
                pts.push_back(p);
            }
        }
        const auto part = partition_points(pq, pts, 1.0);
        if (!boxes_valid(pq, pts, 1.0, part)) {
            return {false, "invalid small instance"};
        }
        const auto optimum = oracle::min_partition(pts.size(), [&](const std::vector<std::uint32_t>& g) {
            std::vector<EmbeddedPoint> sub;
            for (auto v : g) {
                sub.push_back(pts[v]);
            }
            return dst_min_rect(pq, mbh(sub)) > 1.0;
        });
        if (part.rects.size() < optimum) {
            return {false, "heuristic beat the exhaustive optimum"};
        }
        const auto g = build_graph(pq, pts, 1.0);
        const bool complete = g.edge_count() == pts.size() * (pts.size() - 1) / 2;
        if ((complete && part.rects.size() != 1) || (g.edge_count() == 0 && part.rects.size() != pts.size())) {
            return {false, "complete or edgeless graph not matched"};
        }
        ++small;
    }
    return {true, std::to_string(instances) + " query instances (" + std::to_string(boxes) + " boxes), " +
                      std::to_string(small) + " small instances"};
}

Outcome cost_dominance(const SignatureProvider& signer, const KeyPair& keys) {
    std::size_t queries = 0;
    double low_sum = 0, all_sum = 0;
    std::size_t low_n = 0;
    for (int c = 0; c < 10; ++c) {
        auto tree = build_tree(generate_corpus({.n = 1500}, 200 + c), 10);
        tree.sign(signer, keys.private_key);
        const auto f = build_embedding(tree.corpus(), 5, c);
        const EmbeddedCorpus cache(f, tree.corpus());
        for (const auto& q : generate_queries(tree.corpus(), 10, c)) {
            for (double theta : kThetas) {
                const auto a = bench_query(tree, &f, &cache, {q, theta}, Mode::vs2, signer, keys.public_key);
                const auto b = bench_query(tree, &f, &cache, {q, theta}, Mode::evs2, signer, keys.public_key);
                if (!a.reconciles() || !b.reconciles()) {
                    return {false, "counters do not reconcile for '" + q + "'"};
                }
                if (b.counters.edit_ops() > a.counters.edit_ops()) {
                    return {false, "E-VS2 costlier for '" + q + "' theta " + fmt(theta)};
                }
                const double ratio = static_cast<double>(b.counters.edit_ops()) / a.counters.edit_ops();
                all_sum += ratio;
                ++queries;
                if (theta <= 2) {
                    low_sum += ratio;
                    ++low_n;
                }
            }
        }
    }
    const double low = low_sum / low_n;
    return {low < 1.0, std::to_string(queries) + " queries, mean ratio " + fmt(all_sum / queries) +
                           ", theta<=2 mean ratio " + fmt(low)};
}

Outcome lower_bounds() {
    std::mt19937_64 rng(6);
    std::size_t violations = 0;
    for (int t = 0; t < 10000; ++t) {
        std::vector<std::string> four;
        for (int k = 0; k < 4; ++k) {
            four.push_back(oracle::random_string(rng, 1, 9, 'a', 'd'));
        }
        std::sort(four.begin(), four.end());
        const auto q = oracle::random_string(rng, 0, 9, 'a', 'd');
        const StringRange outer{four[0], four[3]}, inner{four[1], four[2]};
        const auto bound = dst_min(q, outer);
        for (const auto& s : four) {
            violations += bound > oracle::levenshtein(q, s);
        }
        violations += dst_min(q, inner) < bound;
    }
    return {violations == 0, std::to_string(violations) + " violations in 10000 trials"};
}

Outcome serialization(const SignatureProvider& signer, const KeyPair& keys) {
    auto tree = build_tree(generate_corpus({.n = 1000}, 8), 10);
    tree.sign(signer, keys.private_key);
    const auto index_bytes = tree.serialize();
    if (MBTree::deserialize(index_bytes).serialize() != index_bytes) {
        return {false, "index round trip differs"};
    }
    const auto f = build_embedding(tree.corpus(), 5, 8);
    if (EmbeddingFunction::deserialize(f.serialize()).serialize() != f.serialize()) {
        return {false, "embedding round trip differs"};
    }
    const auto queries = generate_queries(tree.corpus(), 10, 8);
    std::vector<std::pair<Query, SearchResult>> honest;
    for (const auto& q : queries) {
        for (double theta : {1.0, 2.0}) {
            for (Mode mode : {Mode::vs2, Mode::evs2}) {
                const Query query{q, theta};
                auto msg = mode == Mode::vs2 ? build_vo(tree, query) : build_vo_e(tree, f, query);
                const auto bytes = encode_vo(msg.vo);
                if (encode_vo(decode_vo(bytes)) != bytes) {
                    return {false, "VO round trip differs"};
                }
                honest.emplace_back(query, std::move(msg));
            }
        }
    }
    std::mt19937_64 rng(8);
    std::size_t rejected_parse = 0, rejected_verify = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& [query, msg] = honest[uniform_below(rng, honest.size())];
        auto bytes = encode_vo(msg.vo);
        const auto flips = 1 + uniform_below(rng, 3);
        for (std::uint64_t k = 0; k < flips; ++k) {
            bytes[uniform_below(rng, bytes.size())] ^= static_cast<std::uint8_t>(1 + uniform_below(rng, 255));
        }
        try {
            const auto vo = decode_vo(bytes);
            const auto r = vo.mode() == Mode::evs2
                               ? verify_e(query, msg.R, vo, f, signer, keys.public_key, tree.signature())
                               : verify(query, msg.R, vo, signer, keys.public_key, tree.signature());
            if (r.passed) {
                return {false, "mutated VO verified (iteration " + std::to_string(i) + ")"};
            }
            ++rejected_verify;
        } catch (const ParseError&) {
            ++rejected_parse;
        }
    }
    return {true, "1000 mutations: " + std::to_string(rejected_parse) + " parse errors, " +
                      std::to_string(rejected_verify) + " failed verification"};
}

Outcome multi_query(const SignatureProvider& signer, const KeyPair& keys) {
    std::size_t strict = 0, runs = 0, exempted = 0;
    for (int w = 0; w < 20; ++w) {
        auto tree = build_tree(generate_corpus({.n = 800, .variant_rate = 0.5}, 300 + w), 8);
        tree.sign(signer, keys.private_key);
        const auto f = build_embedding(tree.corpus(), 5, w);
        const auto mode = w % 2 == 0 ? Mode::vs2 : Mode::evs2;
        auto base = generate_queries(tree.corpus(), 3, w);
        // Two near-duplicates so that exemptions have something to cite.
        base.push_back(base[0] + "a");
        base.push_back(base[1].substr(0, base[1].size() - 1) + "q");
        std::set<std::string> seen;
        MultiQuery mq{{}, static_cast<double>(1 + w % 3)};
        for (const auto& q : base) {
            if (seen.insert(q).second) {
                mq.strings.push_back(q);
            }
        }
        MultiBuildStats stats;
        const auto bundle = build_multi_vo(tree, &f, mq, mode, nullptr, &stats);
        if (bundle.proof_bytes() > stats.independent_bytes) {
            return {false, "bundle larger than independent VOs in workload " + std::to_string(w)};
        }
        strict += bundle.proof_bytes() < stats.independent_bytes;
        exempted += stats.exempted_strings;
        Bytes sig;
        const auto back = SharedVOBundle::deserialize(bundle.serialize(tree.signature()), sig);
        for (const auto& r : verify_multi(mq, back, &f, signer, keys.public_key, sig)) {
            if (!r.passed) {
                return {false, "honest bundle rejected: " + r.detail};
            }
        }
        // Every exemption against brute force.
        for (std::size_t j = 0; j < bundle.sections.size(); ++j) {
            std::string bad;
            for_each_leaf_entry(bundle.sections[j].vo.root, [&](const VOEntry& e) {
                if (e.kind != VOEntry::Kind::exempt_run) {
                    return;
                }
                std::vector<std::string> pivot_plain;
                for_each_leaf_entry(bundle.sections.at(e.index).vo.root, [&](const VOEntry& x) {
                    if (x.kind == VOEntry::Kind::str) {
                        pivot_plain.push_back(x.text);
                    }
                });
                const auto& R = bundle.sections[j].R;
                for (std::size_t t = 0; t < e.claimed.size(); ++t) {
                    const auto& s = pivot_plain.at(e.first + t);
                    ++runs;
                    const bool similar = static_cast<double>(oracle::levenshtein(mq.strings[j], s)) <= mq.theta;
                    if (e.claimed[t] != oracle::levenshtein(mq.strings[e.index], s) ||
                        similar != std::binary_search(R.begin(), R.end(), s)) {
                        bad = s;
                    }
                }
            });
            if (!bad.empty()) {
                return {false, "exemption of '" + bad + "' does not hold"};
            }
        }
    }
    // Removing a string never turns a pruned node into a candidate.
    std::size_t removal_checks = 0;
    for (int c = 0; c < 5; ++c) {
        const auto tree = build_tree(generate_corpus({.n = 600}, 400 + c), 6);
        for (const auto& q : generate_queries(tree.corpus(), 10, c)) {
            for (double theta : kThetas) {
                for (std::uint32_t node = 0; node < tree.nodes().size(); ++node) {
                    const auto& n = tree.node(node);
                    if (static_cast<double>(dst_min(q, n.range)) <= theta) {
                        continue;
                    }
                    for (auto id = n.first; id <= n.last; ++id) {
                        ++removal_checks;
                        const auto lo = id == n.first && n.first < n.last ? id + 1 : n.first;
                        const auto hi = id == n.last && n.first < n.last ? id - 1 : n.last;
                        if (removal_flips_candidacy(tree, node, id, q, theta) ||
                            static_cast<double>(dst_min(q, {tree.text(lo), tree.text(hi)})) <= theta) {
                            return {false, "removal revived a pruned node"};
                        }
                    }
                }
            }
        }
    }
    return {true, "20 workloads, " + std::to_string(strict) + " strictly smaller, " + std::to_string(exempted) +
                      " exempted strings (" + std::to_string(runs) + " re-checked), " +
                      std::to_string(removal_checks) + " removal checks"};
}

} // namespace

int main(int argc, char** argv) {
    // Optional arguments restrict the run to the named criteria.
    const std::set<std::string> only(argv + 1, argv + argc);
    Ed25519Provider signer;
    const auto keys = signer.generate_keys();
    const std::vector<Criterion> criteria{
        {"AC1", "search and top-k equal brute force", 120, [&] { return oracle_equivalence(signer, keys); }},
        {"AC2", "honest answers verify", 0, [&] { return honest_round_trip(signer, keys); }},
        {"AC3", "attack detection matrix", 180, [&] { return detection_matrix(signer, keys); }},
        {"AC4", "embedding is contractive", 0, contractiveness},
        {"AC5", "distant boxes are valid", 0, dbh_validity},
        {"AC6", "embedding lowers verification cost", 0, [&] { return cost_dominance(signer, keys); }},
        {"AC7", "range lower bound and monotonicity", 0, lower_bounds},
        {"AC8", "serialization round trips and fuzzing", 0, [&] { return serialization(signer, keys); }},
        {"AC9", "multi-query bundles", 0, [&] { return multi_query(signer, keys); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.contains(c.id)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            out.pass = false;
            out.detail += "; over the " + fmt(c.budget_s) + " s budget";
        }
        failed += !out.pass;
        std::cout << c.id << ' ' << (out.pass ? "PASS" : "FAIL") << ' ' << c.title << ": " << out.detail << " ["
                  << fmt(secs) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
