// Command-line front end. Owner, server and client roles are subcommands; they
// only share state through files.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "autoss/harness.hpp"

using namespace autoss;

namespace {

constexpr int kVerifyFailed = 2;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& s) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) {
        if constexpr (std::is_floating_point_v<T>) {
            out.push_back(static_cast<T>(std::stod(item)));
        } else {
            out.push_back(static_cast<T>(std::stoul(item)));
        }
    }
    return out;
}

std::vector<Mode> parse_modes(const std::string& s) {
    std::vector<Mode> out;
    for (const auto& item : split_list(s)) {
        out.push_back(parse_mode(item));
    }
    return out;
}

Bytes load_or_make_keys(const std::string& dir, const SignatureProvider& provider) {
    const auto key_path = (std::filesystem::path(dir) / "owner.key").string();
    if (std::filesystem::exists(key_path)) {
        return read_file(key_path);
    }
    const auto keys = provider.generate_keys();
    save_keys(dir, keys);
    return keys.private_key;
}

void print_report(const VerificationReport& report) {
    if (report.passed) {
        std::cout << "PASS edit_ops=" << report.counters.edit_ops() << " euclid_ops=" << report.counters.euclid_ops
                  << " vo_bytes=" << report.counters.vo_bytes << '\n';
    } else {
        std::cerr << "FAIL " << step_name(report.failed_step) << ' ' << diagnosis_name(report.diagnosis);
        if (!report.detail.empty()) {
            std::cerr << ": " << report.detail;
        }
        std::cerr << '\n';
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    const auto bytes = read_file(path);
    std::vector<std::string> out;
    std::string line;
    std::stringstream in(std::string(bytes.begin(), bytes.end()));
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Authenticated string similarity search"};
    app.require_subcommand(1);
    std::string signer = "ed25519";
    app.add_option("--signer", signer, "Signature scheme (ed25519 or debug)");
    const std::uint64_t default_seed = seed_from_env(0);

    // build
    std::string data, index_path, keys_dir;
    std::uint32_t fanout = 10;
    auto* build = app.add_subcommand("build", "Owner: build and sign the index");
    build->add_option("--data", data, "Newline-delimited UTF-8 corpus")->required();
    build->add_option("--fanout", fanout, "Node fanout")->check(CLI::Range(2u, 1u << 20));
    build->add_option("--out", index_path, "Index file to write")->required();
    build->add_option("--keys", keys_dir, "Directory holding owner.key/owner.pub (created if missing)")->required();

    // embed
    std::string emb_path;
    std::uint32_t dim = 5;
    std::uint64_t seed = default_seed;
    auto* embed = app.add_subcommand("embed", "Owner: build the string embedding");
    auto* embed_src = embed->add_option("--data", data, "Corpus file");
    embed->add_option("--index", index_path, "Index file, as an alternative corpus source")->excludes(embed_src);
    embed->add_option("--dim", dim, "Dimensions")->check(CLI::Range(1u, 4096u));
    embed->add_option("--seed", seed, "Reference-set seed");
    embed->add_option("--out", emb_path, "Embedding file to write")->required();

    // query
    std::string q, out_path, mode_name_s = "vs2";
    double theta = 0;
    std::uint32_t topk = 0;
    auto* query = app.add_subcommand("query", "Server: answer a query with a VO");
    query->add_option("--index", index_path)->required();
    query->add_option("--embed", emb_path);
    query->add_option("--q", q)->required();
    query->add_option("--theta", theta)->required()->check(CLI::NonNegativeNumber);
    query->add_option("--mode", mode_name_s)->check(CLI::IsMember({"vs2", "evs2"}));
    query->add_option("--topk", topk, "Return the k nearest strings within theta");
    query->add_option("--vo", out_path, "Response file to write")->required();

    // multi-query
    std::string queries_path;
    auto* multi = app.add_subcommand("multi-query", "Server: answer a batch with one shared bundle");
    multi->add_option("--index", index_path)->required();
    multi->add_option("--embed", emb_path);
    multi->add_option("--queries", queries_path, "One query per line")->required();
    multi->add_option("--theta", theta)->required()->check(CLI::NonNegativeNumber);
    multi->add_option("--mode", mode_name_s)->check(CLI::IsMember({"vs2", "evs2"}));
    multi->add_option("--out", out_path, "Bundle file to write")->required();

    // verify
    std::string vo_path, pub_path;
    auto* verify_cmd = app.add_subcommand("verify", "Client: check a response or bundle (exit 2 on failure)");
    verify_cmd->add_option("--vo", vo_path, "Response or bundle file")->required();
    verify_cmd->add_option("--q", q, "Query string (single responses)");
    verify_cmd->add_option("--queries", queries_path, "Query list (bundles)");
    verify_cmd->add_option("--theta", theta)->required()->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--pub", pub_path, "Owner public key")->required();
    verify_cmd->add_option("--embed", emb_path);

    // attack
    std::string kind_name, victim;
    auto* attack = app.add_subcommand("attack", "Simulate a cheating server and verify its answer");
    attack->add_option("--kind", kind_name)->required();
    attack->add_option("--seed", seed);
    attack->add_option("--index", index_path)->required();
    attack->add_option("--embed", emb_path);
    attack->add_option("--pub", pub_path)->required();
    attack->add_option("--q", q)->required();
    attack->add_option("--theta", theta)->required()->check(CLI::NonNegativeNumber);
    attack->add_option("--mode", mode_name_s)->check(CLI::IsMember({"vs2", "evs2"}));
    attack->add_option("--topk", topk);
    attack->add_option("--victim", victim, "Victim class for add_false_hits_v1: nc, c, fp or ds");
    attack->add_option("--vo", out_path, "Also write the forged response here");

    // bench and detect share a synthetic workload
    std::size_t n = 1000, n_queries = 10;
    std::uint64_t trials = 1000;
    std::string thetas_s = "1,2,3", dims_s = "5", fanouts_s = "10", modes_s = "vs2,evs2";
    auto* bench_cmd = app.add_subcommand("bench", "Measure VO size and verification cost (CSV on stdout)");
    bench_cmd->add_option("--data", data, "Corpus file (synthetic if omitted)");
    bench_cmd->add_option("--n", n, "Synthetic corpus size");
    bench_cmd->add_option("--queries", queries_path, "Query file (random perturbed corpus strings if omitted)");
    bench_cmd->add_option("--num-queries", n_queries);
    bench_cmd->add_option("--thetas", thetas_s);
    bench_cmd->add_option("--dims", dims_s);
    bench_cmd->add_option("--fanouts", fanouts_s);
    bench_cmd->add_option("--modes", modes_s);
    bench_cmd->add_option("--seed", seed);

    auto* detect = app.add_subcommand("detect", "Run the attack detection matrix (CSV on stdout)");
    detect->add_option("--data", data, "Corpus file (synthetic if omitted)");
    detect->add_option("--n", n);
    detect->add_option("--num-queries", n_queries);
    detect->add_option("--trials", trials);
    detect->add_option("--thetas", thetas_s);
    detect->add_option("--dim", dim);
    detect->add_option("--fanout", fanout);
    detect->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto provider = make_provider(signer);
        const Mode mode = parse_mode(mode_name_s);

        auto load_corpus = [&] {
            return data.empty() ? generate_corpus({.n = n}, seed) : ingest(data);
        };
        auto load_embedding = [&]() -> std::optional<EmbeddingFunction> {
            if (emb_path.empty()) {
                return std::nullopt;
            }
            return EmbeddingFunction::load(emb_path);
        };
        auto need_embedding = [&](std::optional<EmbeddingFunction>& f) {
            if (mode == Mode::evs2 && !f) {
                throw Error("evs2 needs --embed");
            }
        };

        if (*build) {
            auto tree = build_tree(ingest(data), fanout);
            tree.sign(*provider, load_or_make_keys(keys_dir, *provider));
            tree.save(index_path);
            std::cout << "strings=" << tree.size() << " nodes=" << tree.nodes().size() << " height=" << tree.height()
                      << " root=" << to_hex(tree.root_digest()) << '\n';
        } else if (*embed) {
            std::vector<std::string> corpus;
            if (index_path.empty()) {
                corpus = ingest(data);
            } else {
                const auto tree = MBTree::load(index_path);
                corpus.assign(tree.corpus().begin(), tree.corpus().end());
            }
            const auto f = build_embedding(corpus, dim, seed);
            f.save(emb_path);
            std::cout << "dim=" << f.dim() << " seed=" << f.seed() << '\n';
        } else if (*query) {
            const auto tree = MBTree::load(index_path);
            auto f = load_embedding();
            need_embedding(f);
            Response resp;
            resp.mode = mode;
            resp.topk = topk;
            resp.signature = tree.signature();
            if (topk > 0) {
                auto proof = topk_build_vo(tree, {q, topk, theta}, mode, f ? &*f : nullptr);
                resp.R = std::move(proof.R);
                resp.vo = std::move(proof.vo);
            } else {
                auto msg = mode == Mode::evs2 ? build_vo_e(tree, *f, {q, theta}) : build_vo(tree, {q, theta});
                resp.R = std::move(msg.R);
                resp.vo = std::move(msg.vo);
            }
            write_file(out_path, resp.serialize());
            for (const auto& s : resp.R) {
                std::cout << s << '\n';
            }
        } else if (*multi) {
            const auto tree = MBTree::load(index_path);
            auto f = load_embedding();
            need_embedding(f);
            MultiBuildStats stats;
            const MultiQuery mq{read_lines(queries_path), theta};
            const auto bundle = build_multi_vo(tree, f ? &*f : nullptr, mq, mode, nullptr, &stats);
            write_file(out_path, bundle.serialize(tree.signature()));
            std::cout << "bundle_bytes=" << bundle.proof_bytes() << " independent_bytes=" << stats.independent_bytes
                      << " exempted=" << stats.exempted_strings << " reused_dbh_points=" << stats.reused_dbh_points
                      << '\n';
        } else if (*verify_cmd) {
            const auto bytes = read_file(vo_path);
            const auto pub = read_file(pub_path);
            auto f = load_embedding();
            const bool is_bundle = bytes.size() >= 4 && std::string(bytes.begin(), bytes.begin() + 4) == "MQB1";
            if (is_bundle) {
                if (queries_path.empty()) {
                    throw Error("bundles need --queries");
                }
                Bytes sig;
                const auto bundle = SharedVOBundle::deserialize(bytes, sig);
                const auto reports =
                    verify_multi({read_lines(queries_path), theta}, bundle, f ? &*f : nullptr, *provider, pub, sig);
                bool all = true;
                for (const auto& r : reports) {
                    print_report(r);
                    all = all && r.passed;
                }
                return all ? 0 : kVerifyFailed;
            }
            if (q.empty()) {
                throw Error("single responses need --q");
            }
            const auto resp = Response::deserialize(bytes);
            if (resp.mode == Mode::evs2 && !f) {
                throw Error("evs2 responses need --embed");
            }
            VerificationReport report;
            if (resp.topk > 0) {
                report = topk_verify({q, resp.topk, theta}, resp.R, resp.vo, f ? &*f : nullptr, *provider, pub,
                                     resp.signature);
            } else if (resp.mode == Mode::evs2) {
                report = verify_e({q, theta}, resp.R, resp.vo, *f, *provider, pub, resp.signature);
            } else {
                report = verify({q, theta}, resp.R, resp.vo, *provider, pub, resp.signature);
            }
            print_report(report);
            return report.passed ? 0 : kVerifyFailed;
        } else if (*attack) {
            const auto tree = MBTree::load(index_path);
            auto f = load_embedding();
            need_embedding(f);
            std::optional<EmbeddedCorpus> cache;
            if (f) {
                cache.emplace(*f, tree.corpus());
            }
            AttackContext ctx;
            ctx.tree = &tree;
            ctx.f = f ? &*f : nullptr;
            ctx.cache = cache ? &*cache : nullptr;
            ctx.mode = mode;
            ctx.query = {q, theta};
            if (topk > 0) {
                ctx.topk = topk;
            }
            const auto honest = honest_message(ctx);
            auto forged = apply_attack(honest, {parse_attack(kind_name), seed, 1, victim}, ctx);
            if (!forged.applied) {
                std::cerr << "attack not applicable: " << forged.skip_reason << '\n';
                return 1;
            }
            if (!out_path.empty()) {
                Response resp{mode, topk, forged.message.R, tree.signature(), forged.message.vo};
                write_file(out_path, resp.serialize());
            }
            forged.message.vo = decode_vo(encode_vo(forged.message.vo));
            const auto report = verify_message(ctx, forged.message, *provider, read_file(pub_path), tree.signature());
            std::cout << "victim=" << forged.victim_class << " expected=" << step_name(forged.expected_step) << ':'
                      << diagnosis_name(forged.expected) << " got=" << step_name(report.failed_step) << ':'
                      << diagnosis_name(report.diagnosis) << '\n';
            return report.passed ? 1 : 0;
        } else if (*bench_cmd) {
            const auto corpus = load_corpus();
            BenchConfig config;
            config.queries = queries_path.empty() ? generate_queries(corpus, n_queries, seed) : read_lines(queries_path);
            config.thetas = parse_numbers<double>(thetas_s);
            config.dims = parse_numbers<std::uint32_t>(dims_s);
            config.fanouts = parse_numbers<std::uint32_t>(fanouts_s);
            config.modes = parse_modes(modes_s);
            config.seed = seed;
            std::cout << bench_csv_header() << '\n';
            for (const auto& rec : bench(corpus, config, *provider)) {
                std::cout << to_csv(rec) << '\n';
            }
        } else if (*detect) {
            const auto corpus = load_corpus();
            auto tree = build_tree(corpus, fanout);
            const auto keys = provider->generate_keys();
            tree.sign(*provider, keys.private_key);
            const auto f = build_embedding(tree.corpus(), dim, seed);
            const EmbeddedCorpus cache(f, tree.corpus());
            MatrixConfig config;
            config.queries = generate_queries(tree.corpus(), n_queries, seed);
            config.thetas = parse_numbers<double>(thetas_s);
            config.trials = trials;
            config.seed = seed;
            const auto report = run_detection_matrix(tree, f, cache, config, *provider, keys.public_key);
            std::cout << report.csv();
            return report.misses() == 0 && report.false_alarms == 0 ? 0 : kVerifyFailed;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
