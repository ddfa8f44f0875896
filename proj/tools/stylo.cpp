// Command-line entry point for every stage of the pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stylo/attrib.hpp"
#include "stylo/corpus.hpp"
#include "stylo/error.hpp"
#include "stylo/eval.hpp"
#include "stylo/mcts.hpp"
#include "stylo/pairgen.hpp"
#include "stylo/parser.hpp"
#include "stylo/structure.hpp"
#include "stylo/synth.hpp"
#include "stylo/transforms.hpp"
#include "stylo/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stylo;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write " + path);
}

// A corpus is either an ingestion directory or a JSON file written by `ingest`.
Corpus load_corpus(const std::string& path, int workers) {
    if (fs::is_directory(path)) return ingest_corpus(path, workers);
    try {
        return corpus_from_json(json::parse(read_text(path)));
    } catch (const json::exception& e) {
        throw IoError("malformed corpus file " + path + ": " + e.what());
    }
}

// Every <name>.in with a sibling <name>.out, ordered by file name. When some
// inputs are named <stem>.<N>.in only those are used, so a corpus tests/
// directory can be passed as is.
std::vector<TestCase> load_test_dir(const fs::path& dir, const std::string& stem) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> inputs, own;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".in") continue;
        inputs.push_back(e.path());
        if (e.path().filename().string().rfind(stem + ".", 0) == 0) own.push_back(e.path());
    }
    if (!own.empty()) inputs = own;
    std::sort(inputs.begin(), inputs.end());
    std::vector<TestCase> tests;
    for (const auto& in : inputs) {
        fs::path out = in;
        out.replace_extension(".out");
        if (!fs::exists(out)) throw IoError("missing expected output for " + in.string());
        tests.push_back({read_text(in), read_text(out), {}});
    }
    return tests;
}

struct SearchOptions {
    SearchConfig config;
    void add(CLI::App* cmd) {
        cmd->add_option("--budget", config.budget, "Search iterations")->check(CLI::NonNegativeNumber);
        cmd->add_option("--max-depth", config.max_depth, "Longest transform sequence")->check(CLI::PositiveNumber);
        cmd->add_option("--exploration", config.exploration, "UCT exploration constant")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--rollout-depth", config.rollout_depth, "Random steps after each expansion")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--seed", config.seed, "Search seed");
        cmd->add_flag("!--no-early-stop", config.early_stop, "Keep searching after the first success");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Code stylometry toolkit: attribution, style transforms and evasion search"};
    app.require_subcommand(1);
    int workers = 1;
    if (const char* env = std::getenv("STYLO_WORKERS"); env && *env) workers = std::max(1, std::atoi(env));

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Read a corpus directory and write it as JSON");
    std::string ingest_root, ingest_out, ingest_rejections;
    ingest->add_option("root", ingest_root, "Corpus root (<root>/<author>/<challenge>.cpp)")->required();
    ingest->add_option("-o,--out", ingest_out, "Corpus JSON output (default stdout)");
    ingest->add_option("--rejections", ingest_rejections, "Rejection report as JSON lines");
    ingest->add_option("-j,--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic multi-author corpus directory");
    int gen_authors = 20, gen_challenges = 8;
    uint64_t gen_seed = 7;
    std::string gen_out;
    gen->add_option("--authors", gen_authors, "Number of authors");
    gen->add_option("--challenges", gen_challenges, "Programs per author (at most 8)");
    gen->add_option("--seed", gen_seed, "Style seed");
    gen->add_option("-o,--out", gen_out, "Output directory")->required();

    // split
    auto* split = app.add_subcommand("split", "Stratified train/test split");
    std::string split_corpus, split_train, split_test;
    uint64_t split_seed = 1;
    double split_fraction = 0.75;
    split->add_option("corpus", split_corpus, "Corpus directory or JSON")->required();
    split->add_option("--seed", split_seed, "Split seed");
    split->add_option("--fraction", split_fraction, "Training share per author")->check(CLI::Range(0.0, 1.0));
    split->add_option("--train", split_train, "Training corpus JSON")->required();
    split->add_option("--test", split_test, "Test corpus JSON")->required();

    // train-attrib
    auto* train = app.add_subcommand("train-attrib", "Train an attribution model");
    std::string train_corpus, train_out, train_kind = "tfidf-rf", train_eval;
    ForestConfig forest;
    VocabConfig vocab;
    train->add_option("corpus", train_corpus, "Training corpus directory or JSON")->required();
    train->add_option("-o,--out", train_out, "Model file")->required();
    train->add_option("--kind", train_kind, "tfidf-rf or ast-rf");
    train->add_option("--trees", forest.n_trees, "Forest size")->check(CLI::PositiveNumber);
    train->add_option("--seed", forest.seed, "Forest seed");
    train->add_option("--max-terms", vocab.max_terms, "Vocabulary size cap")->check(CLI::PositiveNumber);
    train->add_option("--eval", train_eval, "Held-out corpus to report accuracy on");
    train->add_option("-j,--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    // evade
    auto* evade_cmd = app.add_subcommand("evade", "Search for a transform sequence that changes attribution");
    std::string ev_model, ev_source, ev_author, ev_target, ev_trace, ev_out, ev_method = "mcts";
    SearchOptions ev_search;
    evade_cmd->add_option("--model", ev_model, "Model file")->required();
    evade_cmd->add_option("source", ev_source, "Program to rewrite")->required();
    evade_cmd->add_option("--author", ev_author, "True author")->required();
    evade_cmd->add_option("--target", ev_target, "Target author (targeted search)");
    evade_cmd->add_option("--method", ev_method, "mcts or random")->check(CLI::IsMember({"mcts", "random"}));
    evade_cmd->add_option("--trace", ev_trace, "Per-iteration trace as JSON lines");
    evade_cmd->add_option("--code-out", ev_out, "Write the rewritten program here");
    ev_search.add(evade_cmd);

    // pairgen
    auto* pg = app.add_subcommand("pairgen", "Build source-target style pairs as JSON lines");
    std::string pg_model, pg_corpus, pg_out;
    int pg_units = 0;
    bool pg_strict = false;
    SearchOptions pg_search;
    pg_search.config.budget = 60;
    pg->add_option("--model", pg_model, "Model file")->required();
    pg->add_option("corpus", pg_corpus, "Source units (corpus directory or JSON)")->required();
    pg->add_option("-o,--out", pg_out, "JSONL output")->required();
    pg->add_option("--units", pg_units, "Use only the first N units (0 = all)")->check(CLI::NonNegativeNumber);
    pg->add_flag("--strict", pg_strict, "Drop variants whose targeted search failed");
    pg->add_option("-j,--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    pg_search.add(pg);

    // encode, also reachable as `frontend encode`
    EncodeLimits limits;
    std::string enc_source;
    auto add_encode = [&](CLI::App* parent) {
        auto* enc = parent->add_subcommand("encode", "Tokens, AST leaf paths and data flow of a program as JSON");
        enc->add_option("source", enc_source, "Program file (- for stdin)")->required();
        enc->add_option("--max-tokens", limits.max_tokens, "Token cap")->check(CLI::PositiveNumber);
        enc->add_option("--max-leaf-paths", limits.max_leaf_paths, "Leaf-path cap")->check(CLI::PositiveNumber);
        enc->add_option("--max-dfg-nodes", limits.max_dfg_nodes, "DFG node cap")->check(CLI::PositiveNumber);
        enc->add_option("--max-ast-depth", limits.max_ast_depth, "Leaf-path depth cap")->check(CLI::PositiveNumber);
        return enc;
    };
    auto* encode = add_encode(&app);
    auto* frontend = app.add_subcommand("frontend", "Front-end utilities");
    frontend->require_subcommand(1);
    auto* frontend_encode = add_encode(frontend);

    // verify
    auto* verify = app.add_subcommand("verify", "Check a candidate against its original on test cases");
    std::string vf_original, vf_candidate, vf_tests;
    bool vf_external = false;
    verify->add_option("--original", vf_original, "Original program")->required();
    verify->add_option("--candidate", vf_candidate, "Rewritten program")->required();
    verify->add_option("--tests", vf_tests, "Directory of <name>.in / <name>.out pairs")->required();
    verify->add_flag("--external", vf_external, "Also compile and run the candidate with g++");

    // report
    auto* report = app.add_subcommand("report", "Print the tables of a finished run");
    std::string rp_dir;
    bool rp_json = false;
    report->add_option("run", rp_dir, "Run directory or report.json")->required();
    report->add_flag("--json", rp_json, "Print the JSON report");

    // run
    auto* run = app.add_subcommand("run", "Run every stage from a key = value config file");
    std::string run_config;
    run->add_option("config", run_config, "Config file")->required();

    // transforms list
    auto* transforms = app.add_subcommand("transforms", "Transform catalog");
    transforms->require_subcommand(1);
    auto* tlist = transforms->add_subcommand("list", "List transforms");
    std::string tl_source;
    tlist->add_option("--actions", tl_source, "List the applicable actions of this program instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            Corpus c = ingest_corpus(ingest_root, workers);
            write_text(ingest_out, to_json(c).dump() + "\n");
            if (!ingest_rejections.empty()) {
                std::ostringstream rej;
                write_rejections(c, rej);
                write_text(ingest_rejections, rej.str());
            }
            std::cerr << c.units.size() << " units, " << c.authors.size() << " authors, " << c.rejected.size()
                      << " rejected\n";
        } else if (*gen) {
            write_corpus(generate_authored_corpus(gen_authors, gen_challenges, gen_seed), gen_out);
        } else if (*split) {
            auto [tr, te] = split_dataset(load_corpus(split_corpus, workers), split_seed, split_fraction);
            write_text(split_train, to_json(tr).dump() + "\n");
            write_text(split_test, to_json(te).dump() + "\n");
            std::cerr << tr.units.size() << " train, " << te.units.size() << " test\n";
        } else if (*train) {
            forest.workers = workers;
            AttributionModel m =
                train_attributor(load_corpus(train_corpus, workers), model_kind_from_string(train_kind), vocab, forest);
            save_model(m, train_out);
            if (!train_eval.empty())
                std::cout << json{{"accuracy", evaluate_accuracy(m, load_corpus(train_eval, workers))}}.dump() << "\n";
        } else if (*evade_cmd) {
            AttributionModel m = load_model(ev_model);
            Ast ast = parse_source(read_text(ev_source));
            Objective goal = ev_target.empty() ? Objective::untargeted(ev_author) : Objective::targeted(ev_target);
            EvasionResult r;
            if (ev_method == "random") {
                r = random_baseline(ast, m, goal, ev_search.config.budget, ev_search.config.seed,
                                    ev_search.config.max_depth);
            } else {
                std::ofstream trace;
                TraceSink sink;
                if (!ev_trace.empty()) {
                    trace.open(ev_trace);
                    if (!trace) throw IoError("cannot write " + ev_trace);
                    sink = [&](const TraceEvent& e) { trace << to_json(e).dump() << "\n"; };
                }
                r = stylo::evade(ast, m, goal, ev_search.config, sink);
            }
            r.true_author = ev_author;
            if (!ev_out.empty()) write_text(ev_out, r.final_code);
            std::cout << to_json(r).dump(2) << "\n";
            return r.success ? 0 : 1;
        } else if (*pg) {
            AttributionModel m = load_model(pg_model);
            Corpus c = load_corpus(pg_corpus, workers);
            std::vector<SourceUnit> units = c.units;
            if (pg_units > 0 && units.size() > static_cast<size_t>(pg_units)) units.resize(pg_units);
            PairgenConfig config;
            config.search = pg_search.config;
            config.strict = pg_strict;
            PairDataset d = build_dataset(units, m.labels(), m, config, workers);
            export_jsonl(d, pg_out);
            std::cerr << d.pairs.size() << " pairs\n";
        } else if (*encode || *frontend_encode) {
            std::string source;
            if (enc_source == "-") {
                std::ostringstream s;
                s << std::cin.rdbuf();
                source = s.str();
            } else {
                source = read_text(enc_source);
            }
            std::cout << encode_program(source, limits).dump() << "\n";
        } else if (*verify) {
            Ast original = parse_source(read_text(vf_original));
            std::string candidate = read_text(vf_candidate);
            std::vector<TestCase> tests = load_test_dir(vf_tests, fs::path(vf_original).stem().string());
            auto describe = [](const EquivalenceVerdict& v) {
                json j = {{"verdict", to_string(v.verdict)}, {"detail", v.detail}};
                if (v.failure) {
                    j["family"] = to_string(v.failure->family);
                    j["category"] = to_string(v.failure->category);
                }
                if (v.failed_case) j["failed_case"] = *v.failed_case;
                return j;
            };
            EquivalenceVerdict v = check_equivalence(original, candidate, tests);
            json out = describe(v);
            bool ok = v.equivalent();
            if (vf_external) {
                EquivalenceVerdict ext = check_equivalence_external(candidate, tests, ExternalBackend{});
                out["external"] = describe(ext);
                ok = ok && ext.equivalent();
            }
            std::cout << out.dump(2) << "\n";
            return ok ? 0 : 1;
        } else if (*report) {
            fs::path path = fs::is_directory(rp_dir) ? fs::path(rp_dir) / "report.json" : fs::path(rp_dir);
            json j = json::parse(read_text(path));
            if (rp_json)
                std::cout << j.dump(2) << "\n";
            else
                write_text_report(report_from_json(j), std::cout);
        } else if (*run) {
            MetricsReport r = run_experiment(load_config(run_config));
            write_text_report(r, std::cout);
        } else if (*tlist) {
            if (tl_source.empty()) {
                for (const auto& t : transform_catalog())
                    std::cout << t.code << "\t" << to_string(t.family) << "\t" << t.name << "\t" << t.summary << "\n";
            } else {
                for (const auto& a : enumerate_actions(parse_source(read_text(tl_source))))
                    std::cout << to_string(a) << "\n";
            }
        }
    } catch (const StageFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
