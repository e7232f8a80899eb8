#include "autoss/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

#include "evs2_plan.hpp"
#include "traversal.hpp"

namespace autoss {

// ---- ingestion and workloads ----------------------------------------------

std::vector<std::string> ingest_text(std::string_view content) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t at = 0;
    while (at < content.size()) {
        auto end = content.find('\n', at);
        if (end == std::string_view::npos) {
            end = content.size();
        }
        std::string_view line = content.substr(at, end - at);
        at = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!is_valid_utf8(line)) {
            throw Utf8Error("line " + std::to_string(line_no) + " is not valid UTF-8");
        }
        if (seen.emplace(line).second) {
            out.emplace_back(line);
        }
    }
    std::sort(out.begin(), out.end(), phi_less);
    return out;
}

std::vector<std::string> ingest(const std::string& path) {
    const auto bytes = read_file(path);
    return ingest_text(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) {
        throw Error("uniform_below(0)");
    }
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

namespace {

char random_letter(std::mt19937_64& rng) { return static_cast<char>('a' + uniform_below(rng, 26)); }

std::string random_edit(std::string s, std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        switch (uniform_below(rng, 3)) {
        case 0:
            if (s.size() < max_len) {
                s.insert(s.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, s.size() + 1)), random_letter(rng));
                return s;
            }
            break;
        case 1:
            if (s.size() > min_len) {
                s.erase(s.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, s.size())));
                return s;
            }
            break;
        default:
            if (!s.empty()) {
                s[uniform_below(rng, s.size())] = random_letter(rng);
                return s;
            }
            break;
        }
    }
    return s;
}

} // namespace

std::vector<std::string> generate_corpus(const CorpusSpec& spec, std::uint64_t seed) {
    if (spec.n == 0 || spec.min_len == 0 || spec.min_len > spec.max_len) {
        throw Error("bad corpus spec");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::string> made;
    std::unordered_set<std::string> seen;
    std::size_t stalls = 0;
    while (made.size() < spec.n) {
        std::string s;
        const bool variant = !made.empty() && static_cast<double>(uniform_below(rng, 1000)) < spec.variant_rate * 1000;
        if (variant) {
            s = made[uniform_below(rng, made.size())];
            const auto edits = 1 + uniform_below(rng, 2);
            for (std::uint64_t e = 0; e < edits; ++e) {
                s = random_edit(std::move(s), rng, spec.min_len, spec.max_len);
            }
        } else {
            const auto len = spec.min_len + uniform_below(rng, spec.max_len - spec.min_len + 1);
            for (std::size_t k = 0; k < len; ++k) {
                s += random_letter(rng);
            }
        }
        if (seen.insert(s).second) {
            made.push_back(std::move(s));
            stalls = 0;
        } else if (++stalls > 100000) {
            throw Error("corpus spec cannot produce enough distinct strings");
        }
    }
    std::sort(made.begin(), made.end(), phi_less);
    return made;
}

std::vector<std::string> generate_queries(std::span<const std::string> corpus, std::size_t count,
                                          std::uint64_t seed, std::size_t max_edits) {
    if (corpus.empty()) {
        throw Error("empty dataset");
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (std::size_t attempt = 0; out.size() < count && attempt < count * 100; ++attempt) {
        std::string s = corpus[uniform_below(rng, corpus.size())];
        const auto edits = uniform_below(rng, max_edits + 1);
        for (std::uint64_t e = 0; e < edits; ++e) {
            s = random_edit(std::move(s), rng, 1, 64);
        }
        if (seen.insert(s).second) {
            out.push_back(std::move(s));
        }
    }
    return out;
}

void save_keys(const std::string& dir, const KeyPair& keys) {
    std::filesystem::create_directories(dir);
    write_file((std::filesystem::path(dir) / "owner.key").string(), keys.private_key);
    write_file((std::filesystem::path(dir) / "owner.pub").string(), keys.public_key);
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* v = std::getenv("AUTOSS_SEED");
    if (v == nullptr || *v == '\0') {
        return fallback;
    }
    try {
        std::size_t used = 0;
        const auto seed = std::stoull(v, &used, 0);
        if (used != std::string_view(v).size()) {
            throw Error("");
        }
        return seed;
    } catch (const std::exception&) {
        throw Error(std::string("AUTOSS_SEED is not an unsigned integer: ") + v);
    }
}

// ---- attacks ----------------------------------------------------------------

std::string_view attack_name(AttackKind kind) noexcept {
    switch (kind) {
    case AttackKind::tamper_string:
        return "tamper_string";
    case AttackKind::add_false_hits_v1:
        return "add_false_hits_v1";
    case AttackKind::add_false_hits_v2:
        return "add_false_hits_v2";
    case AttackKind::drop_similar_v1:
        return "drop_similar_v1";
    case AttackKind::drop_similar_v2:
        return "drop_similar_v2";
    case AttackKind::dbh_relabel:
        return "dbh_relabel";
    case AttackKind::mf_range_shift:
        return "mf_range_shift";
    case AttackKind::reorder_topk:
        return "reorder_topk";
    case AttackKind::truncate_topk:
        return "truncate_topk";
    }
    return "?";
}

AttackKind parse_attack(std::string_view name) {
    for (auto kind : kAllAttacks) {
        if (attack_name(kind) == name) {
            return kind;
        }
    }
    throw Error("unknown attack '" + std::string(name) + "'");
}

bool attack_applies(AttackKind kind, Mode mode) noexcept {
    return kind != AttackKind::dbh_relabel || mode == Mode::evs2;
}

bool is_topk_attack(AttackKind kind) noexcept {
    return kind == AttackKind::reorder_topk || kind == AttackKind::truncate_topk;
}

SearchResult honest_message(const AttackContext& ctx) {
    if (ctx.topk) {
        auto proof = topk_build_vo(*ctx.tree, {ctx.query.q, *ctx.topk, ctx.query.theta}, ctx.mode, ctx.f, ctx.cache);
        return {std::move(proof.R), std::move(proof.vo)};
    }
    if (ctx.mode == Mode::evs2) {
        return build_vo_e(*ctx.tree, *ctx.f, ctx.query, ctx.cache);
    }
    return build_vo(*ctx.tree, ctx.query);
}

VerificationReport verify_message(const AttackContext& ctx, const SearchResult& message,
                                  const SignatureProvider& provider, ByteView public_key, ByteView signature) {
    if (ctx.topk) {
        return topk_verify({ctx.query.q, *ctx.topk, ctx.query.theta}, message.R, message.vo, ctx.f, provider,
                           public_key, signature);
    }
    if (ctx.mode == Mode::evs2) {
        return verify_e(ctx.query, message.R, message.vo, *ctx.f, provider, public_key, signature);
    }
    return verify(ctx.query, message.R, message.vo, provider, public_key, signature);
}

namespace {

AttackResult skip(std::string why) {
    AttackResult r;
    r.skip_reason = std::move(why);
    return r;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
    return items[uniform_below(rng, items.size())];
}

void visit_entries(VOEntry& e, const std::function<void(VOEntry&)>& fn) {
    if (e.is_group()) {
        for (auto& child : e.children) {
            visit_entries(child, fn);
        }
    } else {
        fn(e);
    }
}

void sort_phi(std::vector<std::string>& v) { std::sort(v.begin(), v.end(), phi_less); }

std::vector<std::uint32_t> ids_of(const MBTree& tree, const std::vector<std::string>& texts) {
    std::vector<std::uint32_t> ids;
    for (const auto& s : texts) {
        ids.push_back(*tree.find(s));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

SearchResult rebuild(const AttackContext& ctx, double theta, const detail::TraversalTweaks& tweaks,
                     std::vector<std::uint32_t> result_ids, bool use_similar) {
    const auto sk = detail::traverse(*ctx.tree, ctx.query.q, theta, tweaks);
    if (use_similar) {
        result_ids = sk.similar;
    }
    std::sort(result_ids.begin(), result_ids.end());
    SearchResult out;
    out.vo = detail::assemble_vo(*ctx.tree, ctx.mode, ctx.f, ctx.cache, sk, ctx.query.q, theta, result_ids);
    for (auto id : result_ids) {
        out.R.push_back(ctx.tree->text(id));
    }
    return out;
}

} // namespace

AttackResult apply_attack(const SearchResult& honest, const AttackSpec& spec, const AttackContext& ctx) {
    if (!attack_applies(spec.kind, ctx.mode)) {
        return skip("attack needs E-VS2");
    }
    if (is_topk_attack(spec.kind) != ctx.topk.has_value()) {
        return skip(is_topk_attack(spec.kind) ? "attack needs a top-k query" : "attack needs a threshold query");
    }
    const MBTree& tree = *ctx.tree;
    const double theta = ctx.query.theta;
    std::mt19937_64 rng(spec.seed);
    AttackResult res;
    res.message = honest;
    auto& msg = res.message;

    switch (spec.kind) {
    case AttackKind::tamper_string: {
        std::vector<std::string> strs;
        visit_entries(msg.vo.root, [&](VOEntry& e) {
            if (e.kind == VOEntry::Kind::str) {
                strs.push_back(e.text);
            }
        });
        if (strs.empty()) {
            return skip("VO holds no plain strings");
        }
        const std::string victim = msg.R.empty() ? pick(rng, strs) : pick(rng, msg.R);
        // Appending U+0001 keeps the dictionary position for a-z data.
        const std::string forged = victim + '\x01';
        visit_entries(msg.vo.root, [&](VOEntry& e) {
            if (e.kind == VOEntry::Kind::str && e.text == victim) {
                e.text = forged;
            }
        });
        std::replace(msg.R.begin(), msg.R.end(), victim, forged);
        res.victim_class = msg.R.empty() ? "c" : "similar";
        res.expected_step = Step::step2;
        res.expected = Diagnosis::signature_mismatch;
        break;
    }
    case AttackKind::add_false_hits_v1: {
        std::map<std::string, std::vector<std::string>> pools;
        const std::set<std::string> in_r(msg.R.begin(), msg.R.end());
        visit_entries(msg.vo.root, [&](VOEntry& e) {
            if (e.kind == VOEntry::Kind::mf) {
                const auto lo = *tree.find(e.range.lo);
                const auto hi = *tree.find(e.range.hi);
                for (auto id = lo; id <= hi; ++id) {
                    pools["nc"].push_back(tree.text(id));
                }
            } else if (e.kind == VOEntry::Kind::str && !in_r.contains(e.text)) {
                pools[ctx.mode == Mode::vs2 ? "c" : "fp"].push_back(e.text);
            } else if (e.kind == VOEntry::Kind::dbh_ref) {
                pools["ds"].push_back(e.text);
            }
        });
        std::string cls = spec.victim;
        if (cls.empty()) {
            std::vector<std::string> classes;
            for (const auto& [name, pool] : pools) {
                classes.push_back(name);
            }
            if (classes.empty()) {
                return skip("no dissimilar strings to add");
            }
            cls = pick(rng, classes);
        }
        if (pools[cls].empty()) {
            return skip("no " + cls + " victims");
        }
        std::set<std::string> victims;
        for (std::uint32_t k = 0; k < std::max<std::uint32_t>(spec.count, 1) && victims.size() < pools[cls].size(); ++k) {
            victims.insert(pick(rng, pools[cls]));
        }
        msg.R.insert(msg.R.end(), victims.begin(), victims.end());
        sort_phi(msg.R);
        res.victim_class = cls;
        res.expected_step = cls == "nc" ? Step::step1 : Step::step3;
        res.expected = cls == "nc" ? Diagnosis::string_in_nc_range : Diagnosis::dissimilar_returned;
        break;
    }
    case AttackKind::add_false_hits_v2: {
        const auto sk = detail::traverse(tree, ctx.query.q, theta);
        std::optional<std::uint32_t> victim;
        for (int attempt = 0; attempt < 256 && !victim; ++attempt) {
            const auto id = static_cast<std::uint32_t>(uniform_below(rng, tree.size()));
            if (static_cast<double>(edit_distance(ctx.query.q, tree.text(id))) > theta) {
                victim = id;
            }
        }
        if (!victim) {
            return skip("no dissimilar corpus string found");
        }
        res.victim_class = sk.dist.contains(*victim) ? "c" : "nc";
        auto ids = sk.similar;
        ids.push_back(*victim);
        msg = rebuild(ctx, theta, {{*victim}, {}}, ids, false);
        res.expected_step = Step::step3;
        res.expected = Diagnosis::dissimilar_returned;
        break;
    }
    case AttackKind::drop_similar_v1: {
        if (msg.R.empty()) {
            return skip("empty result");
        }
        for (std::uint32_t k = 0; k < std::max<std::uint32_t>(spec.count, 1) && !msg.R.empty(); ++k) {
            msg.R.erase(msg.R.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, msg.R.size())));
        }
        res.victim_class = "similar";
        res.expected_step = Step::step3;
        res.expected = Diagnosis::similar_missing;
        break;
    }
    case AttackKind::drop_similar_v2: {
        if (msg.R.empty()) {
            return skip("empty result");
        }
        const auto victim = *tree.find(pick(rng, msg.R));
        msg = rebuild(ctx, theta, {{}, {tree.leaf_of(victim)}}, {}, true);
        res.victim_class = "similar";
        res.expected_step = Step::step3;
        res.expected = Diagnosis::candidate_claimed_nc;
        break;
    }
    case AttackKind::dbh_relabel: {
        if (msg.R.empty()) {
            return skip("empty result");
        }
        const std::string victim = pick(rng, msg.R);
        const auto id = *tree.find(victim);
        const auto p = ctx.cache ? ctx.cache->point(id) : ctx.f->embed(victim);
        auto& rects = *msg.vo.dbhs;
        std::uint32_t target = 0;
        if (rects.empty()) {
            rects.push_back(point_rect(p));
        } else {
            target = static_cast<std::uint32_t>(uniform_below(rng, rects.size()));
            extend(rects[target], p);
        }
        visit_entries(msg.vo.root, [&](VOEntry& e) {
            if (e.kind == VOEntry::Kind::str && e.text == victim) {
                e = VOEntry::make_dbh_ref(victim, target);
            }
        });
        std::erase(msg.R, victim);
        res.victim_class = "similar";
        res.expected_step = Step::step4;
        res.expected = Diagnosis::dbh_not_distant;
        break;
    }
    case AttackKind::mf_range_shift: {
        std::vector<VOEntry*> mfs;
        visit_entries(msg.vo.root, [&](VOEntry& e) {
            if (e.kind == VOEntry::Kind::mf && e.range.lo != e.range.hi) {
                mfs.push_back(&e);
            }
        });
        if (mfs.empty()) {
            return skip("no false-hit range to narrow");
        }
        auto* e = pick(rng, mfs);
        e->range.hi = e->range.lo;
        res.victim_class = "nc";
        res.expected_step = Step::step2;
        res.expected = Diagnosis::signature_mismatch;
        break;
    }
    case AttackKind::reorder_topk: {
        if (msg.R.size() < 2) {
            return skip("fewer than two ranked results");
        }
        const auto i = uniform_below(rng, msg.R.size() - 1);
        std::swap(msg.R[i], msg.R[i + 1]);
        res.victim_class = "similar";
        res.expected_step = Step::step3;
        res.expected = Diagnosis::rank_order_violation;
        break;
    }
    case AttackKind::truncate_topk: {
        if (msg.R.size() != *ctx.topk) {
            return skip("result shorter than k");
        }
        const auto last = static_cast<std::uint32_t>(edit_distance(ctx.query.q, msg.R.back()));
        const auto sk = detail::traverse(tree, ctx.query.q, theta);
        std::vector<std::uint32_t> farther;
        for (auto id : sk.similar) {
            if (sk.dist.at(id) > last) {
                farther.push_back(id);
            }
        }
        if (farther.empty()) {
            return skip("no similar string ranks strictly below k");
        }
        const auto replacement = pick(rng, farther);
        const double forged_theta = sk.dist.at(replacement);
        std::vector<std::string> ranked(msg.R.begin(), msg.R.end() - 1);
        ranked.push_back(tree.text(replacement));
        auto ids = ids_of(tree, ranked);
        const auto rebuilt = rebuild(ctx, forged_theta, {}, ids, false);
        msg.vo = rebuilt.vo;
        msg.R = ranked;
        res.victim_class = "similar";
        res.expected_step = Step::step3;
        res.expected = Diagnosis::similar_missing;
        break;
    }
    }
    res.applied = true;
    return res;
}

// ---- detection matrix ----------------------------------------------------------

std::uint64_t MatrixReport::attack_trials() const {
    std::uint64_t n = 0;
    for (const auto& c : cells) {
        n += c.trials;
    }
    return n;
}

std::uint64_t MatrixReport::misses() const {
    std::uint64_t n = 0;
    for (const auto& c : cells) {
        n += c.trials - c.detected;
    }
    return n;
}

std::uint64_t MatrixReport::unexpected() const {
    std::uint64_t n = 0;
    for (const auto& c : cells) {
        n += c.trials - c.as_expected;
    }
    return n;
}

std::string MatrixReport::csv() const {
    std::ostringstream out;
    out << "attack,mode,victim,expected_step,expected_diagnosis,trials,skipped,detected,as_expected,fired\n";
    for (const auto& c : cells) {
        std::string fired;
        for (const auto& [what, n] : c.fired) {
            if (!fired.empty()) {
                fired += ';';
            }
            fired += what + '=' + std::to_string(n);
        }
        out << attack_name(c.kind) << ',' << mode_name(c.mode) << ',' << c.victim_class << ','
            << step_name(c.expected_step) << ',' << diagnosis_name(c.expected) << ',' << c.trials << ','
            << c.skipped << ',' << c.detected << ',' << c.as_expected << ',' << fired << '\n';
    }
    out << "honest,all,,none,ok," << honest_runs << ",0," << false_alarms << ',' << (honest_runs - false_alarms)
        << ",\n";
    return out.str();
}

MatrixReport run_detection_matrix(const MBTree& tree, const EmbeddingFunction& f, const EmbeddedCorpus& cache,
                                  const MatrixConfig& config, const SignatureProvider& provider,
                                  ByteView public_key) {
    if (config.queries.empty() || config.thetas.empty() || config.modes.empty()) {
        throw Error("detection matrix needs queries, thresholds and modes");
    }
    struct Plan {
        AttackKind kind;
        Mode mode;
        std::string victim;
    };
    std::vector<Plan> plans;
    for (auto kind : kAllAttacks) {
        for (auto mode : config.modes) {
            if (!attack_applies(kind, mode)) {
                continue;
            }
            if (kind == AttackKind::add_false_hits_v1) {
                for (const char* v : {"nc", mode == Mode::vs2 ? "c" : "fp"}) {
                    plans.push_back({kind, mode, v});
                }
                if (mode == Mode::evs2) {
                    plans.push_back({kind, mode, "ds"});
                }
            } else {
                plans.push_back({kind, mode, ""});
            }
        }
    }

    // Top-k attacks need queries with enough ranked results; collect every
    // usable (query, theta, k) up front instead of hoping to draw one.
    struct TopKChoice {
        std::size_t query;
        double theta;
        std::uint32_t k;
    };
    std::vector<TopKChoice> reorder_pool, truncate_pool;
    for (std::size_t qi = 0; qi < config.queries.size(); ++qi) {
        for (double theta : config.thetas) {
            const auto ranked =
                topk_search(tree, {config.queries[qi], static_cast<std::uint32_t>(tree.size()), theta});
            for (std::uint32_t k = 2; k <= ranked.c; ++k) {
                reorder_pool.push_back({qi, theta, k});
                if (ranked.dist[k - 1] < ranked.dist.back()) {
                    truncate_pool.push_back({qi, theta, k});
                }
            }
        }
    }

    MatrixReport report;
    std::map<std::tuple<AttackKind, Mode, std::string>, std::size_t> cell_index;
    std::mt19937_64 rng(config.seed);
    const Bytes& signature = tree.signature();
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        const auto& plan = plans[t % plans.size()];
        auto key = std::make_tuple(plan.kind, plan.mode, plan.victim);
        if (!cell_index.contains(key)) {
            cell_index[key] = report.cells.size();
            MatrixCell cell;
            cell.kind = plan.kind;
            cell.mode = plan.mode;
            cell.victim_class = plan.victim;
            report.cells.push_back(cell);
        }
        auto& cell = report.cells[cell_index[key]];

        // Try queries until the attack has something to bite on.
        bool done = false;
        for (int attempt = 0; attempt < 64 && !done; ++attempt) {
            AttackContext ctx;
            ctx.tree = &tree;
            ctx.f = &f;
            ctx.cache = &cache;
            ctx.mode = plan.mode;
            ctx.query = {pick(rng, config.queries), pick(rng, config.thetas)};
            if (is_topk_attack(plan.kind)) {
                const auto& pool = plan.kind == AttackKind::reorder_topk ? reorder_pool : truncate_pool;
                if (pool.empty()) {
                    break;
                }
                const auto& choice = pick(rng, pool);
                ctx.query = {config.queries[choice.query], choice.theta};
                ctx.topk = choice.k;
            }
            const auto honest = honest_message(ctx);
            ++report.honest_runs;
            if (!verify_message(ctx, honest, provider, public_key, signature).passed) {
                ++report.false_alarms;
            }
            AttackSpec spec{plan.kind, rng(), 1, plan.victim};
            auto attack = apply_attack(honest, spec, ctx);
            if (!attack.applied) {
                continue;
            }
            // Cheating messages travel through the wire format like honest ones.
            attack.message.vo = decode_vo(encode_vo(attack.message.vo));
            const auto verdict = verify_message(ctx, attack.message, provider, public_key, signature);
            ++cell.trials;
            cell.expected_step = attack.expected_step;
            cell.expected = attack.expected;
            if (!verdict.passed) {
                ++cell.detected;
            }
            if (verdict.failed_step == attack.expected_step && verdict.diagnosis == attack.expected) {
                ++cell.as_expected;
            }
            ++cell.fired[std::string(step_name(verdict.failed_step)) + ":" +
                         std::string(diagnosis_name(verdict.diagnosis))];
            done = true;
        }
        if (!done) {
            ++cell.skipped;
        }
    }
    return report;
}

// ---- benchmark records ---------------------------------------------------------

VOBreakdown breakdown(const SearchResult& message) {
    VOBreakdown b;
    const std::set<std::string> in_r(message.R.begin(), message.R.end());
    b.n_R = message.R.size();
    std::function<void(const VOEntry&)> walk = [&](const VOEntry& e) {
        switch (e.kind) {
        case VOEntry::Kind::group:
            b.framing_bytes += 2;
            for (const auto& child : e.children) {
                walk(child);
            }
            return;
        case VOEntry::Kind::str:
            b.str_bytes += encoded_size(e);
            if (!in_r.contains(e.text)) {
                ++b.n_F;
            }
            return;
        case VOEntry::Kind::mf:
            b.mf_bytes += encoded_size(e);
            ++b.n_MF;
            return;
        case VOEntry::Kind::dbh_ref:
            b.ref_bytes += encoded_size(e);
            ++b.n_DS;
            return;
        default:
            throw Error("bundle entries have no standalone breakdown");
        }
    };
    walk(message.vo.root);
    if (message.vo.dbhs) {
        b.framing_bytes += 5;
        b.n_DBH = message.vo.dbhs->size();
        for (const auto& rect : *message.vo.dbhs) {
            b.dbh_bytes += encoded_size(rect);
        }
    }
    b.n_C = b.n_F + b.n_DS;
    return b;
}

bool BenchRecord::reconciles() const {
    if (vo_bytes != parts.total_bytes() || counters.vo_bytes != vo_bytes) {
        return false;
    }
    if (!passed) {
        return false;
    }
    const auto exact = mode == Mode::vs2 ? parts.n_C : parts.n_F;
    if (counters.edit_ops() != parts.n_R + exact + 2 * parts.n_MF) {
        return false;
    }
    return mode == Mode::vs2 ? counters.euclid_ops == 0 : counters.euclid_ops == parts.n_DBH;
}

BenchRecord bench_query(const MBTree& tree, const EmbeddingFunction* f, const EmbeddedCorpus* cache,
                        const Query& query, Mode mode, const SignatureProvider& provider, ByteView public_key) {
    using Clock = std::chrono::steady_clock;
    BenchRecord rec;
    rec.query = query.q;
    rec.mode = mode;
    rec.theta = query.theta;
    rec.dim = f ? f->dim() : 0;
    rec.fanout = tree.fanout();
    rec.n = tree.size();
    const auto t0 = Clock::now();
    const auto msg = mode == Mode::evs2 ? build_vo_e(tree, *f, query, cache) : build_vo(tree, query);
    const auto t1 = Clock::now();
    const auto report = mode == Mode::evs2
                            ? verify_e(query, msg.R, msg.vo, *f, provider, public_key, tree.signature())
                            : verify(query, msg.R, msg.vo, provider, public_key, tree.signature());
    const auto t2 = Clock::now();
    rec.parts = breakdown(msg);
    rec.vo_bytes = encode_vo(msg.vo).size();
    rec.counters = report.counters;
    rec.passed = report.passed;
    rec.build_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    rec.verify_us = std::chrono::duration<double, std::micro>(t2 - t1).count();
    return rec;
}

std::string bench_csv_header() {
    return "query_id,query,mode,theta,dim,fanout,n,n_R,n_C,n_F,n_DS,n_MF,n_DBH,str_bytes,mf_bytes,dbh_bytes,"
           "ref_bytes,framing_bytes,vo_bytes,edit_ops,distance_ops,range_bound_ops,euclid_ops,embed_distance_ops,"
           "passed,reconciles,build_us,verify_us";
}

std::string to_csv(const BenchRecord& r) {
    std::ostringstream out;
    const auto& p = r.parts;
    const auto& c = r.counters;
    out << r.query_id << ',' << r.query << ',' << mode_name(r.mode) << ',' << r.theta << ',' << r.dim << ','
        << r.fanout << ',' << r.n << ',' << p.n_R << ',' << p.n_C << ',' << p.n_F << ',' << p.n_DS << ','
        << p.n_MF << ',' << p.n_DBH << ',' << p.str_bytes << ',' << p.mf_bytes << ',' << p.dbh_bytes << ','
        << p.ref_bytes << ',' << p.framing_bytes << ',' << r.vo_bytes << ',' << c.edit_ops() << ','
        << c.distance_ops << ',' << c.range_bound_ops << ',' << c.euclid_ops << ',' << c.embed_distance_ops << ','
        << (r.passed ? 1 : 0) << ',' << (r.reconciles() ? 1 : 0) << ',' << r.build_us << ',' << r.verify_us;
    return out.str();
}

std::vector<BenchRecord> bench(const std::vector<std::string>& corpus, const BenchConfig& config,
                               const SignatureProvider& provider) {
    const auto keys = provider.generate_keys();
    std::vector<BenchRecord> out;
    for (auto fanout : config.fanouts) {
        auto tree = build_tree(corpus, fanout);
        tree.sign(provider, keys.private_key);
        for (auto dim : config.dims) {
            const auto f = build_embedding(tree.corpus(), dim, config.seed);
            const EmbeddedCorpus cache(f, tree.corpus());
            for (std::size_t qi = 0; qi < config.queries.size(); ++qi) {
                for (auto theta : config.thetas) {
                    for (auto mode : config.modes) {
                        auto rec = bench_query(tree, &f, &cache, {config.queries[qi], theta}, mode, provider,
                                               keys.public_key);
                        rec.query_id = qi;
                        out.push_back(std::move(rec));
                    }
                }
            }
        }
    }
    return out;
}

} // namespace autoss

namespace autoss {

Bytes Response::serialize() const {
    ByteWriter w;
    w.raw(std::string_view("SSR1"));
    w.u8(static_cast<std::uint8_t>(mode));
    w.u32(topk);
    w.u32(static_cast<std::uint32_t>(R.size()));
    for (const auto& s : R) {
        w.str(s);
    }
    w.blob(signature);
    w.blob(encode_vo(vo));
    return w.take();
}

Response Response::deserialize(ByteView bytes) {
    ByteReader r(bytes);
    r.expect_magic("SSR1");
    Response out;
    const auto mode = r.u8();
    if (mode > static_cast<std::uint8_t>(Mode::evs2)) {
        r.fail("unknown mode");
    }
    out.mode = static_cast<Mode>(mode);
    out.topk = r.u32();
    const auto n = r.u32();
    if (n > r.remaining() / 4) {
        r.fail("result count exceeds file size");
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        out.R.push_back(r.str());
    }
    out.signature = r.blob();
    out.vo = decode_vo(r.blob());
    if (!r.done()) {
        r.fail("trailing bytes");
    }
    if (out.vo.mode() != out.mode) {
        throw ParseError("VO mode disagrees with header", 4);
    }
    return out;
}

} // namespace autoss
