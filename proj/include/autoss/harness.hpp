#pragma once

// Simulated cheating servers, the detection matrix, benchmark records,
// dataset ingestion and synthetic workloads.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "autoss/query_ext.hpp"

namespace autoss {

// ---- ingestion and workloads ----------------------------------------------

/// Newline-delimited UTF-8: strips a trailing CR, drops empty lines, keeps the
/// first of duplicate lines, then sorts in dictionary order. Throws Utf8Error
/// naming the 1-based line number of an invalid line.
std::vector<std::string> ingest_text(std::string_view content);
std::vector<std::string> ingest(const std::string& path);

/// Unbiased draw from [0, n).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

struct CorpusSpec {
    std::size_t n = 1000;
    std::size_t min_len = 3;
    std::size_t max_len = 13;
    /// Share of strings derived from an earlier one by one or two edits, so
    /// that near neighbours exist as they do in name lists.
    double variant_rate = 0.3;
};

/// Sorted, duplicate-free lowercase a-z corpus.
std::vector<std::string> generate_corpus(const CorpusSpec& spec, std::uint64_t seed);
/// Corpus strings perturbed by up to `max_edits` random edits.
std::vector<std::string> generate_queries(std::span<const std::string> corpus, std::size_t count,
                                          std::uint64_t seed, std::size_t max_edits = 2);

/// Writes owner.key and owner.pub into `dir`.
void save_keys(const std::string& dir, const KeyPair& keys);

/// Seed from AUTOSS_SEED, falling back to `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback = 0);

// ---- server response file ----------------------------------------------------

/// What the server hands the client for one query: result, VO and the
/// owner's root signature. `topk` is 0 for threshold queries.
struct Response {
    Mode mode = Mode::vs2;
    std::uint32_t topk = 0;
    std::vector<std::string> R;
    Bytes signature;
    VerificationObject vo;

    Bytes serialize() const;
    static Response deserialize(ByteView bytes);
};

// ---- attacks ----------------------------------------------------------------

enum class AttackKind : std::uint8_t {
    tamper_string,
    add_false_hits_v1,
    add_false_hits_v2,
    drop_similar_v1,
    drop_similar_v2,
    dbh_relabel,
    mf_range_shift,
    reorder_topk,
    truncate_topk,
};

inline constexpr AttackKind kAllAttacks[] = {
    AttackKind::tamper_string,   AttackKind::add_false_hits_v1, AttackKind::add_false_hits_v2,
    AttackKind::drop_similar_v1, AttackKind::drop_similar_v2,   AttackKind::dbh_relabel,
    AttackKind::mf_range_shift,  AttackKind::reorder_topk,      AttackKind::truncate_topk,
};

std::string_view attack_name(AttackKind kind) noexcept;
AttackKind parse_attack(std::string_view name);
bool attack_applies(AttackKind kind, Mode mode) noexcept;
bool is_topk_attack(AttackKind kind) noexcept;

struct AttackSpec {
    AttackKind kind = AttackKind::tamper_string;
    std::uint64_t seed = 0;
    /// Victims per trial for add_false_hits_v1 and drop_similar_v1.
    std::uint32_t count = 1;
    /// For add_false_hits_v1: "nc", "c", "fp" or "ds". Chosen by seed if empty.
    std::string victim;
};

struct AttackContext {
    const MBTree* tree = nullptr;
    const EmbeddingFunction* f = nullptr;
    const EmbeddedCorpus* cache = nullptr;
    Mode mode = Mode::vs2;
    Query query;
    /// Set for top-k queries; the honest message then comes from topk_build_vo.
    std::optional<std::uint32_t> topk;
};

struct AttackResult {
    bool applied = false;
    std::string skip_reason;
    std::string victim_class;
    SearchResult message;
    Step expected_step = Step::none;
    Diagnosis expected = Diagnosis::ok;
};

/// Deterministic in (honest, spec, ctx). v1 attacks keep the honest VO and
/// doctor R; v2 attacks rebuild the VO for the doctored R.
AttackResult apply_attack(const SearchResult& honest, const AttackSpec& spec, const AttackContext& ctx);

/// Runs the client check matching the context (plain, E-VS2 or top-k).
VerificationReport verify_message(const AttackContext& ctx, const SearchResult& message,
                                  const SignatureProvider& provider, ByteView public_key, ByteView signature);

/// Honest server answer for the context.
SearchResult honest_message(const AttackContext& ctx);

// ---- detection matrix ----------------------------------------------------------

struct MatrixCell {
    AttackKind kind = AttackKind::tamper_string;
    Mode mode = Mode::vs2;
    std::string victim_class;
    Step expected_step = Step::none;
    Diagnosis expected = Diagnosis::ok;
    std::uint64_t trials = 0;
    std::uint64_t skipped = 0;
    std::uint64_t detected = 0;
    std::uint64_t as_expected = 0;
    std::map<std::string, std::uint64_t> fired;
};

struct MatrixReport {
    std::vector<MatrixCell> cells;
    std::uint64_t honest_runs = 0;
    std::uint64_t false_alarms = 0;

    std::uint64_t attack_trials() const;
    std::uint64_t misses() const;
    std::uint64_t unexpected() const;
    std::string csv() const;
};

struct MatrixConfig {
    std::vector<std::string> queries;
    std::vector<double> thetas{1, 2, 3};
    std::vector<Mode> modes{Mode::vs2, Mode::evs2};
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
};

MatrixReport run_detection_matrix(const MBTree& tree, const EmbeddingFunction& f, const EmbeddedCorpus& cache,
                                  const MatrixConfig& config, const SignatureProvider& provider,
                                  ByteView public_key);

// ---- benchmark records ---------------------------------------------------------

/// Component counts and measured byte sizes of one answered query.
struct VOBreakdown {
    std::size_t n_R = 0;
    std::size_t n_C = 0;
    std::size_t n_F = 0;
    std::size_t n_DS = 0;
    std::size_t n_MF = 0;
    std::size_t n_DBH = 0;
    std::size_t str_bytes = 0;
    std::size_t mf_bytes = 0;
    std::size_t dbh_bytes = 0;
    std::size_t ref_bytes = 0;
    std::size_t framing_bytes = 0;

    std::size_t total_bytes() const noexcept {
        return str_bytes + mf_bytes + dbh_bytes + ref_bytes + framing_bytes;
    }
};

VOBreakdown breakdown(const SearchResult& message);

struct BenchRecord {
    std::size_t query_id = 0;
    std::string query;
    Mode mode = Mode::vs2;
    double theta = 0.0;
    std::uint32_t dim = 0;
    std::uint32_t fanout = 0;
    std::size_t n = 0;
    VOBreakdown parts;
    std::size_t vo_bytes = 0;
    Counters counters;
    bool passed = false;
    double build_us = 0.0;
    double verify_us = 0.0;

    /// Byte total and operation counts agree with the cost model recomputed
    /// from the component counts.
    bool reconciles() const;
};

BenchRecord bench_query(const MBTree& tree, const EmbeddingFunction* f, const EmbeddedCorpus* cache,
                        const Query& query, Mode mode, const SignatureProvider& provider, ByteView public_key);

std::string bench_csv_header();
std::string to_csv(const BenchRecord& record);

struct BenchConfig {
    std::vector<std::string> queries;
    std::vector<double> thetas{1, 2, 3};
    std::vector<std::uint32_t> dims{5};
    std::vector<std::uint32_t> fanouts{10};
    std::vector<Mode> modes{Mode::vs2, Mode::evs2};
    std::uint64_t seed = 0;
};

std::vector<BenchRecord> bench(const std::vector<std::string>& corpus, const BenchConfig& config,
                               const SignatureProvider& provider);

} // namespace autoss
