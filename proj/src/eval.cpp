#include "stylo/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "stylo/error.hpp"
#include "stylo/pairgen.hpp"
#include "stylo/parallel.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"
#include "stylo/synth.hpp"

namespace stylo {

namespace fs = std::filesystem;
using nlohmann::json;

ErrorTable empty_error_table() {
    ErrorTable t;
    for (auto c : kAllErrorCategories) t[c] = 0;
    return t;
}

json to_json(const ErrorTable& table) {
    json j = json::object();
    for (const auto& [c, n] : table) j[std::string(to_string(c))] = n;
    return j;
}

namespace {

ErrorCategory category_from_string(std::string_view s) {
    for (auto c : kAllErrorCategories)
        if (to_string(c) == s) return c;
    throw ConfigError("unknown error category: " + std::string(s));
}

}  // namespace

TransformationMetrics transformation_success_rate(const std::vector<std::pair<SourceUnit, std::string>>& outputs,
                                                  const ExecLimits& limits, int workers) {
    std::vector<std::optional<EquivalenceVerdict>> verdicts(outputs.size());
    parallel_for(outputs.size(), workers, [&](size_t i) {
        const auto& [unit, candidate] = outputs[i];
        if (unit.tests.empty()) return;
        Ast original = parse_source(unit.code);
        verdicts[i] = check_equivalence(original, candidate, unit.tests, limits);
    });
    TransformationMetrics m;
    m.error_table = empty_error_table();
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (!verdicts[i]) {
            ++m.excluded_no_tests;
            continue;
        }
        ++m.total;
        if (verdicts[i]->equivalent())
            ++m.equivalent;
        else if (verdicts[i]->failure)
            ++m.error_table[verdicts[i]->failure->category];
        m.verdicts.push_back({outputs[i].first.author, outputs[i].first.challenge, *verdicts[i]});
    }
    m.rate = m.total ? static_cast<double>(m.equivalent) / static_cast<double>(m.total) : 0.0;
    return m;
}

namespace {

bool evades(const AttributionModel& model, const std::string& true_author, const std::string& candidate) {
    try {
        parse_source(candidate);
        return predict_source(model, candidate).author != true_author;
    } catch (const SyntaxFailure&) {
        return false;
    }
}

}  // namespace

double evasion_success_rate(const AttributionModel& model,
                            const std::vector<std::pair<std::string, std::string>>& outputs, int workers) {
    if (outputs.empty()) return 0.0;
    std::vector<char> hit(outputs.size(), 0);
    parallel_for(outputs.size(), workers,
                 [&](size_t i) { hit[i] = evades(model, outputs[i].first, outputs[i].second) ? 1 : 0; });
    size_t n = static_cast<size_t>(std::count(hit.begin(), hit.end(), 1));
    return static_cast<double>(n) / static_cast<double>(outputs.size());
}

// ---------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) throw ConfigError("bad value for " + key + ": " + value);
    return v;
}

int parse_int(const std::string& key, const std::string& value, int min) {
    long long v = parse_number<long long>(key, value);
    if (v < min || v > 1'000'000'000) throw ConfigError("out of range for " + key + ": " + value);
    return static_cast<int>(v);
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value[0] == '-') throw ConfigError("bad value for " + key + ": " + value);
    return parse_number<uint64_t>(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("bad boolean for " + key + ": " + value);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        c.echo[key] = value;

        if (key == "corpus") c.corpus = value;
        else if (key == "synthetic_authors") c.synthetic_authors = parse_int(key, value, 2);
        else if (key == "synthetic_challenges") c.synthetic_challenges = parse_int(key, value, 1);
        else if (key == "synthetic_seed") c.synthetic_seed = parse_u64(key, value);
        else if (key == "out") c.out = value;
        else if (key == "seed") c.seeds = {parse_u64(key, value)};
        else if (key == "seeds") {
            c.seeds.clear();
            for (const auto& s : split_list(value)) c.seeds.push_back(parse_u64(key, s));
            if (c.seeds.empty()) throw ConfigError("seeds is empty");
        } else if (key == "train_fraction") {
            c.train_fraction = parse_number<double>(key, value);
            if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw ConfigError("train_fraction outside (0, 1)");
        } else if (key == "attributors") {
            c.attributors.clear();
            for (const auto& s : split_list(value)) c.attributors.push_back(model_kind_from_string(s));
            if (c.attributors.empty()) throw ConfigError("attributors is empty");
        } else if (key == "vocab_unit") {
            if (value == "word") c.vocab.unit = VocabUnit::Word;
            else if (value == "char") c.vocab.unit = VocabUnit::CharNgram;
            else throw ConfigError("vocab_unit must be word or char");
        } else if (key == "vocab_n") c.vocab.n = parse_int(key, value, 1);
        else if (key == "max_terms") c.vocab.max_terms = static_cast<size_t>(parse_int(key, value, 1));
        else if (key == "trees") c.trees = parse_int(key, value, 1);
        else if (key == "budget") c.search.budget = parse_int(key, value, 0);
        else if (key == "max_depth") c.search.max_depth = parse_int(key, value, 1);
        else if (key == "exploration") {
            c.search.exploration = parse_number<double>(key, value);
            if (!(c.search.exploration > 0.0)) throw ConfigError("exploration must be positive");
        } else if (key == "rollout_depth") c.search.rollout_depth = parse_int(key, value, 0);
        else if (key == "early_stop") c.search.early_stop = parse_bool(key, value);
        else if (key == "random_baseline") c.random_baseline = parse_bool(key, value);
        else if (key == "evade_limit") c.evade_limit = parse_int(key, value, 0);
        else if (key == "pairgen") c.pairgen = parse_bool(key, value);
        else if (key == "pairgen_units") c.pairgen_units = parse_int(key, value, 1);
        else if (key == "pairgen_budget") c.pairgen_budget = parse_int(key, value, 0);
        else if (key == "pairgen_strict") c.pairgen_strict = parse_bool(key, value);
        else if (key == "neural") c.neural = parse_bool(key, value);
        else if (key == "neural_cmd") c.neural_cmd = value;
        else if (key == "workers") c.workers = parse_int(key, value, 1);
        else throw ConfigError("unknown config key: " + key);
    }
    if (const char* env = std::getenv("STYLO_WORKERS"); env && *env) c.workers = parse_int("STYLO_WORKERS", env, 1);
    if (c.neural && c.neural_cmd.empty()) throw ConfigError("neural stage enabled without neural_cmd");
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path.string());
    ExperimentConfig c = parse_config(in);
    fs::path base = path.parent_path();
    if (!c.corpus.empty() && fs::path(c.corpus).is_relative()) c.corpus = (base / c.corpus).string();
    if (c.out.is_relative()) c.out = base / c.out;
    return c;
}

// ---------------------------------------------------------------- report

namespace {

json stats_json(const MethodStats& s) {
    return {{"per_seed", s.per_seed},
            {"rate", s.rate},
            {"attempts", s.attempts},
            {"evaded", s.evaded},
            {"mean_iterations", s.mean_iterations}};
}

json transformation_json(const TransformationMetrics& m) {
    return {{"rate", m.rate},
            {"total", m.total},
            {"equivalent", m.equivalent},
            {"excluded_no_tests", m.excluded_no_tests},
            {"error_table", to_json(m.error_table)}};
}

}  // namespace

json to_json(const MetricsReport& r, bool with_timing) {
    json j;
    j["corpus"] = {{"units", r.corpus_units}, {"authors", r.corpus_authors}, {"rejected", r.corpus_rejected}};
    json attributors = json::object();
    for (const auto& [name, a] : r.attributors) {
        json ja = {{"accuracy", {{"per_seed", a.accuracy_per_seed},
                                 {"mean", a.accuracy_mean},
                                 {"variance", a.accuracy_variance}}},
                   {"evasion", {{"mcts", stats_json(a.mcts)}}}};
        if (a.random) ja["evasion"]["random"] = stats_json(*a.random);
        attributors[name] = ja;
    }
    j["attributors"] = attributors;
    j["transformation"] = transformation_json(r.transformation);
    if (r.pairgen)
        j["pairgen"] = {{"units", r.pairgen->units},
                        {"style_sets", r.pairgen->style_sets},
                        {"variants", r.pairgen->variants},
                        {"successful_variants", r.pairgen->successful_variants},
                        {"pairs", r.pairgen->pairs}};
    if (r.neural)
        j["neural"] = {{"transformation", transformation_json(r.neural->transformation)},
                       {"evasion_rate", r.neural->evasion_rate}};
    if (with_timing) {
        json t = json::array();
        for (const auto& [stage, secs] : r.timing) t.push_back({{"stage", stage}, {"seconds", secs}});
        j["timing"] = t;
    }
    j["config"] = r.config;
    return j;
}

namespace {

MethodStats stats_from_json(const json& j) {
    MethodStats s;
    s.per_seed = j.at("per_seed").get<std::vector<double>>();
    s.rate = j.at("rate");
    s.attempts = j.at("attempts");
    s.evaded = j.at("evaded");
    s.mean_iterations = j.at("mean_iterations");
    return s;
}

TransformationMetrics transformation_from_json(const json& j) {
    TransformationMetrics m;
    m.rate = j.at("rate");
    m.total = j.at("total");
    m.equivalent = j.at("equivalent");
    m.excluded_no_tests = j.at("excluded_no_tests");
    m.error_table = empty_error_table();
    for (const auto& [name, n] : j.at("error_table").items()) m.error_table[category_from_string(name)] = n;
    return m;
}

}  // namespace

MetricsReport report_from_json(const json& j) {
    try {
        MetricsReport r;
        r.corpus_units = j.at("corpus").at("units");
        r.corpus_authors = j.at("corpus").at("authors");
        r.corpus_rejected = j.at("corpus").at("rejected");
        for (const auto& [name, ja] : j.at("attributors").items()) {
            AttributorReport a;
            a.accuracy_per_seed = ja.at("accuracy").at("per_seed").get<std::vector<double>>();
            a.accuracy_mean = ja.at("accuracy").at("mean");
            a.accuracy_variance = ja.at("accuracy").at("variance");
            a.mcts = stats_from_json(ja.at("evasion").at("mcts"));
            if (ja.at("evasion").contains("random")) a.random = stats_from_json(ja.at("evasion").at("random"));
            r.attributors[name] = a;
        }
        r.transformation = transformation_from_json(j.at("transformation"));
        if (j.contains("pairgen")) {
            const json& p = j.at("pairgen");
            r.pairgen = PairgenStats{p.at("units"), p.at("style_sets"), p.at("variants"),
                                     p.at("successful_variants"), p.at("pairs")};
        }
        if (j.contains("neural"))
            r.neural = NeuralStats{transformation_from_json(j.at("neural").at("transformation")),
                                   j.at("neural").at("evasion_rate")};
        if (j.contains("timing"))
            for (const auto& t : j.at("timing")) r.timing.emplace_back(t.at("stage"), t.at("seconds"));
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed report: ") + e.what());
    }
}

namespace {

std::string pct(double x) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * x << "%";
    return s.str();
}

std::string fixed(double x, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

void row(std::ostream& out, const std::vector<std::string>& cells, const std::vector<int>& widths) {
    for (size_t i = 0; i < cells.size(); ++i) out << std::left << std::setw(widths[i]) << cells[i];
    out << "\n";
}

double stage_seconds(const MetricsReport& r, const std::string& stage) {
    for (const auto& [s, secs] : r.timing)
        if (s == stage) return secs;
    return 0.0;
}

void error_section(std::ostream& out, const std::string& title, ErrorFamily family,
                   const TransformationMetrics& m) {
    out << title << "\n";
    size_t failures = m.total - m.equivalent;
    size_t sum = 0;
    for (auto c : kAllErrorCategories) {
        if (family_of(c) != family) continue;
        size_t n = m.error_table.at(c);
        sum += n;
        row(out, {"  " + std::string(to_string(c)), std::to_string(n),
                  failures ? pct(static_cast<double>(n) / static_cast<double>(failures)) : "-"},
            {30, 8, 10});
    }
    row(out, {"  total", std::to_string(sum), ""}, {30, 8, 10});
}

}  // namespace

void write_text_report(const MetricsReport& r, std::ostream& out) {
    out << "corpus: " << r.corpus_units << " units, " << r.corpus_authors << " authors, " << r.corpus_rejected
        << " rejected\n\n";

    out << "Attribution accuracy\n";
    row(out, {"  attributor", "mean", "variance", "per seed"}, {16, 10, 12, 0});
    for (const auto& [name, a] : r.attributors) {
        std::string seeds;
        for (double x : a.accuracy_per_seed) seeds += (seeds.empty() ? "" : " ") + fixed(x, 4);
        row(out, {"  " + name, pct(a.accuracy_mean), fixed(a.accuracy_variance, 6), seeds}, {16, 10, 12, 0});
    }
    out << "\n";

    out << "Transformation\n";
    row(out, {"  method", "success", "equivalent/total", "seconds"}, {16, 10, 20, 0});
    row(out, {"  mcts", pct(r.transformation.rate),
              std::to_string(r.transformation.equivalent) + "/" + std::to_string(r.transformation.total),
              fixed(stage_seconds(r, "evade"), 2)},
        {16, 10, 20, 0});
    if (r.neural)
        row(out, {"  neural", pct(r.neural->transformation.rate),
                  std::to_string(r.neural->transformation.equivalent) + "/" +
                      std::to_string(r.neural->transformation.total),
                  fixed(stage_seconds(r, "neural"), 2)},
            {16, 10, 20, 0});
    out << "\n";

    const TransformationMetrics& errors = r.neural ? r.neural->transformation : r.transformation;
    error_section(out, "Syntax errors", ErrorFamily::Syntax, errors);
    out << "\n";
    error_section(out, "Semantic errors", ErrorFamily::Semantic, errors);
    out << "\n";

    out << "Evasion success rate\n";
    row(out, {"  attributor", "method", "rate", "evaded/attempts", "mean iterations"}, {16, 10, 10, 18, 0});
    for (const auto& [name, a] : r.attributors) {
        auto line = [&](const std::string& method, const MethodStats& s) {
            row(out, {"  " + name, method, pct(s.rate), std::to_string(s.evaded) + "/" + std::to_string(s.attempts),
                      fixed(s.mean_iterations, 1)},
                {16, 10, 10, 18, 0});
        };
        line("mcts", a.mcts);
        if (a.random) line("random", *a.random);
    }
    if (r.neural) out << "  neural evasion: " << pct(r.neural->evasion_rate) << "\n";
    out << "\n";

    if (r.pairgen)
        out << "Pairs: " << r.pairgen->pairs << " from " << r.pairgen->style_sets << " style sets ("
            << r.pairgen->successful_variants << "/" << r.pairgen->variants << " variants reached their style)\n\n";

    out << "Timing (seconds)\n";
    for (const auto& [stage, secs] : r.timing) row(out, {"  " + stage, fixed(secs, 3)}, {16, 0});
}

// ---------------------------------------------------------------- runner

namespace {

using Clock = std::chrono::steady_clock;

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("malformed " + path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << text;
        if (!out) throw IoError("cannot write " + path.string());
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<json> read_jsonl_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

std::string jsonl(const std::vector<json>& lines) {
    std::string text;
    for (const auto& j : lines) text += j.dump() + "\n";
    return text;
}

std::string model_file(ModelKind kind, uint64_t seed) {
    return "model-" + std::string(to_string(kind)) + "-s" + std::to_string(seed) + ".json";
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
    return s;
}

std::string shell_quote(const std::string& s) { return "'" + replace_all(s, "'", "'\\''") + "'"; }

class Runner {
public:
    explicit Runner(const ExperimentConfig& c) : c_(c), dir_(c.out) {}

    MetricsReport run() {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw StageFailure("ingest", "cannot create " + dir_.string());
        stage("ingest", [&] { return ingest(); });
        corpus_ = corpus_from_json(read_json(dir_ / "corpus.json"));
        stage("train", [&] { return train(); });
        stage("evade", [&] { return evade(); });
        if (c_.pairgen) stage("pairgen", [&] { return pairgen(); });
        if (c_.neural) stage("neural", [&] { return neural(); });
        stage("verify", [&] { return verify(); });
        MetricsReport report;
        run_stage("report", [&] {
            report = build_report();
            report.timing = timing_;
            return json::object();
        });
        report.timing = timing_;
        write_json(dir_ / "report.json", to_json(report));
        std::ostringstream text;
        write_text_report(report, text);
        write_text(dir_ / "report.txt", text.str());
        return report;
    }

private:
    const ExperimentConfig& c_;
    fs::path dir_;
    Corpus corpus_;
    std::vector<std::pair<std::string, double>> timing_;

    fs::path done_file(const std::string& name) const { return dir_ / ("stage-" + name + ".json"); }

    template <typename F>
    json run_stage(const std::string& name, F&& body) {
        auto t0 = Clock::now();
        json summary;
        try {
            summary = body();
        } catch (const StageFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw StageFailure(name, e.what());
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        timing_.emplace_back(name, secs);
        summary["seconds"] = secs;
        return summary;
    }

    // Skips the stage when its summary file exists.
    template <typename F>
    void stage(const std::string& name, F&& body) {
        fs::path done = done_file(name);
        if (fs::exists(done)) {
            json s;
            try {
                s = read_json(done);
            } catch (const std::exception& e) {
                throw StageFailure(name, e.what());
            }
            timing_.emplace_back(name, s.value("seconds", 0.0));
            return;
        }
        json summary = run_stage(name, body);
        try {
            write_json(done, summary);
        } catch (const std::exception& e) {
            throw StageFailure(name, e.what());
        }
    }

    json ingest() {
        Corpus corpus = c_.corpus.empty()
                            ? generate_authored_corpus(c_.synthetic_authors, c_.synthetic_challenges, c_.synthetic_seed)
                            : ingest_corpus(c_.corpus, c_.workers);
        write_text(dir_ / "corpus.json", to_json(corpus).dump() + "\n");
        std::ostringstream rej;
        write_rejections(corpus, rej);
        write_text(dir_ / "rejections.jsonl", rej.str());
        return {{"units", corpus.units.size()}, {"authors", corpus.authors.size()}};
    }

    ForestConfig forest(uint64_t seed) const {
        ForestConfig f;
        f.n_trees = c_.trees;
        f.seed = seed;
        f.workers = c_.workers;
        return f;
    }

    Corpus test_split(uint64_t seed) const { return split_dataset(corpus_, seed, c_.train_fraction).second; }

    AttributionModel model(ModelKind kind, uint64_t seed) const { return load_model(dir_ / model_file(kind, seed)); }

    json train() {
        json accuracy = json::object();
        for (ModelKind kind : c_.attributors) {
            json per_seed = json::array();
            for (uint64_t seed : c_.seeds) {
                auto [train, test] = split_dataset(corpus_, seed, c_.train_fraction);
                AttributionModel m = train_attributor(train, kind, c_.vocab, forest(seed));
                save_model(m, dir_ / model_file(kind, seed));
                per_seed.push_back(evaluate_accuracy(m, test));
            }
            accuracy[std::string(to_string(kind))] = per_seed;
        }
        return {{"accuracy", accuracy}};
    }

    json evade() {
        std::vector<json> lines;
        for (ModelKind kind : c_.attributors) {
            for (uint64_t seed : c_.seeds) {
                AttributionModel m = model(kind, seed);
                Corpus test = test_split(seed);
                std::vector<const SourceUnit*> targets;
                for (const auto& u : test.units)
                    if (predict_source(m, u.code).author == u.author) targets.push_back(&u);
                if (c_.evade_limit > 0 && targets.size() > static_cast<size_t>(c_.evade_limit))
                    targets.resize(static_cast<size_t>(c_.evade_limit));
                std::vector<std::vector<json>> slots(targets.size());
                parallel_for(targets.size(), c_.workers, [&](size_t i) {
                    const SourceUnit& u = *targets[i];
                    Ast ast = parse_source(u.code);
                    Objective goal = Objective::untargeted(u.author);
                    SearchConfig sc = c_.search;
                    sc.seed = mix_seed(seed, stable_hash(u.author + "/" + u.challenge));
                    auto record = [&](const std::string& method, const EvasionResult& r) {
                        json j = to_json(r);
                        j["attributor"] = to_string(kind);
                        j["seed"] = seed;
                        j["method"] = method;
                        j["author"] = u.author;
                        j["challenge"] = u.challenge;
                        slots[i].push_back(j);
                    };
                    record("mcts", stylo::evade(ast, m, goal, sc));
                    if (c_.random_baseline)
                        record("random", random_baseline(ast, m, goal, sc.budget, sc.seed, sc.max_depth));
                });
                for (auto& s : slots)
                    for (auto& j : s) lines.push_back(std::move(j));
            }
        }
        write_text(dir_ / "evasion.jsonl", jsonl(lines));
        return {{"records", lines.size()}};
    }

    json pairgen() {
        ModelKind kind = c_.attributors.front();
        uint64_t seed = c_.seeds.front();
        AttributionModel m = model(kind, seed);
        Corpus test = test_split(seed);
        std::vector<SourceUnit> units;
        for (const auto& u : test.units) {
            if (units.size() >= static_cast<size_t>(c_.pairgen_units)) break;
            units.push_back(u);
        }
        PairgenConfig pc;
        pc.search = c_.search;
        pc.search.budget = c_.pairgen_budget;
        pc.search.seed = seed;
        pc.strict = c_.pairgen_strict;
        std::vector<StyleSet> sets;
        PairDataset data = build_dataset(units, m.labels(), m, pc, c_.workers, &sets);
        PairgenStats st;
        st.units = units.size();
        st.style_sets = sets.size();
        for (const auto& s : sets)
            for (const auto& v : s.variants)
                if (v) {
                    ++st.variants;
                    if (v->success) ++st.successful_variants;
                }
        st.pairs = data.pairs.size();
        fs::remove(dir_ / "pairs.jsonl");
        if (!data.pairs.empty()) export_jsonl(data, dir_ / "pairs.jsonl");
        return {{"units", st.units},
                {"style_sets", st.style_sets},
                {"variants", st.variants},
                {"successful_variants", st.successful_variants},
                {"pairs", st.pairs}};
    }

    // Inputs are the test units of the first seed; the command writes one
    // file per input plus out/manifest.json listing {id, file}.
    json neural() {
        fs::path root = dir_ / "neural", inputs = root / "inputs", outputs = root / "outputs";
        fs::remove_all(root);
        fs::create_directories(inputs);
        fs::create_directories(outputs);
        Corpus test = test_split(c_.seeds.front());
        json manifest = json::array();
        for (size_t i = 0; i < test.units.size(); ++i) {
            std::string file = std::to_string(i) + ".cpp";
            write_text(inputs / file, test.units[i].code);
            manifest.push_back({{"id", i},
                                {"file", file},
                                {"author", test.units[i].author},
                                {"challenge", test.units[i].challenge}});
        }
        write_json(inputs / "manifest.json", manifest);
        std::string cmd = c_.neural_cmd;
        cmd = replace_all(cmd, "{pairs}", shell_quote((dir_ / "pairs.jsonl").string()));
        cmd = replace_all(cmd, "{inputs}", shell_quote(inputs.string()));
        cmd = replace_all(cmd, "{out}", shell_quote(outputs.string()));
        int rc = std::system(cmd.c_str());
        if (rc != 0) throw Error("neural command exited with status " + std::to_string(rc));
        json produced = read_json(outputs / "manifest.json");
        if (!produced.is_array()) throw Error("neural manifest is not an array");
        return {{"inputs", manifest.size()}, {"outputs", produced.size()}};
    }

    json verify() {
        std::vector<json> lines;
        std::map<std::pair<std::string, std::string>, const SourceUnit*> by_key;
        for (const auto& u : corpus_.units) by_key[{u.author, u.challenge}] = &u;
        auto find_unit = [&](const std::string& a, const std::string& ch) -> const SourceUnit& {
            auto it = by_key.find({a, ch});
            if (it == by_key.end()) throw Error("unit missing from corpus: " + a + "/" + ch);
            return *it->second;
        };

        std::vector<json> evasion = read_jsonl_lines(dir_ / "evasion.jsonl");
        std::map<std::pair<std::string, uint64_t>, AttributionModel> models;
        for (ModelKind kind : c_.attributors)
            for (uint64_t seed : c_.seeds) models[{std::string(to_string(kind)), seed}] = model(kind, seed);
        std::vector<char> evaded(evasion.size(), 0);
        parallel_for(evasion.size(), c_.workers, [&](size_t i) {
            const json& e = evasion[i];
            const auto& m = models.at({e.at("attributor").get<std::string>(), e.at("seed").get<uint64_t>()});
            evaded[i] = evades(m, e.at("author"), e.at("final_code")) ? 1 : 0;
        });
        std::vector<std::pair<SourceUnit, std::string>> mcts_outputs;
        for (size_t i = 0; i < evasion.size(); ++i) {
            const json& e = evasion[i];
            lines.push_back({{"kind", "evasion"},
                             {"attributor", e.at("attributor")},
                             {"method", e.at("method")},
                             {"seed", e.at("seed")},
                             {"author", e.at("author")},
                             {"challenge", e.at("challenge")},
                             {"iterations", e.at("iterations_used")},
                             {"evaded", evaded[i] != 0}});
            if (e.at("method") == "mcts")
                mcts_outputs.emplace_back(find_unit(e.at("author"), e.at("challenge")), e.at("final_code"));
        }
        append_transformation(lines, "mcts", mcts_outputs);

        if (c_.neural) {
            fs::path root = dir_ / "neural";
            json inputs = read_json(root / "inputs" / "manifest.json");
            json produced = read_json(root / "outputs" / "manifest.json");
            std::map<size_t, std::string> files;
            for (const auto& p : produced) files[p.at("id").get<size_t>()] = p.at("file").get<std::string>();
            std::vector<std::pair<SourceUnit, std::string>> outputs;
            for (const auto& in : inputs) {
                const SourceUnit& u = find_unit(in.at("author"), in.at("challenge"));
                auto it = files.find(in.at("id").get<size_t>());
                std::string text;
                if (it != files.end()) {
                    std::ifstream f(root / "outputs" / it->second, std::ios::binary);
                    text.assign(std::istreambuf_iterator<char>(f), {});
                }
                outputs.emplace_back(u, text);
            }
            const AttributionModel& m = models.at({std::string(to_string(c_.attributors.front())), c_.seeds.front()});
            for (const auto& [u, text] : outputs)
                lines.push_back({{"kind", "evasion"},
                                 {"attributor", to_string(c_.attributors.front())},
                                 {"method", "neural"},
                                 {"seed", c_.seeds.front()},
                                 {"author", u.author},
                                 {"challenge", u.challenge},
                                 {"iterations", 0},
                                 {"evaded", evades(m, u.author, text)}});
            append_transformation(lines, "neural", outputs);
        }
        write_text(dir_ / "verdicts.jsonl", jsonl(lines));
        return {{"records", lines.size()}};
    }

    void append_transformation(std::vector<json>& lines, const std::string& source,
                               const std::vector<std::pair<SourceUnit, std::string>>& outputs) {
        TransformationMetrics m = transformation_success_rate(outputs, {}, c_.workers);
        size_t k = 0;
        for (const auto& [u, text] : outputs) {
            json j = {{"kind", "transformation"}, {"source", source}, {"author", u.author}, {"challenge", u.challenge}};
            if (u.tests.empty()) {
                j["verdict"] = "excluded";
            } else {
                const auto& v = m.verdicts[k++].verdict;
                j["verdict"] = to_string(v.verdict);
                if (v.failure) j["category"] = to_string(v.failure->category);
            }
            lines.push_back(j);
        }
    }

    MetricsReport build_report() {
        MetricsReport r;
        r.corpus_units = corpus_.units.size();
        r.corpus_authors = corpus_.authors.size();
        r.corpus_rejected = corpus_.rejected.size();
        r.config = c_.echo;

        json train = read_json(done_file("train"));
        for (ModelKind kind : c_.attributors) {
            std::string name(to_string(kind));
            AttributorReport a;
            a.accuracy_per_seed = train.at("accuracy").at(name).get<std::vector<double>>();
            double n = static_cast<double>(a.accuracy_per_seed.size());
            for (double x : a.accuracy_per_seed) a.accuracy_mean += x / n;
            for (double x : a.accuracy_per_seed) a.accuracy_variance += (x - a.accuracy_mean) * (x - a.accuracy_mean) / n;
            if (c_.random_baseline) a.random = MethodStats{};
            r.attributors[name] = a;
        }

        std::vector<json> verdicts = read_jsonl_lines(dir_ / "verdicts.jsonl");
        std::map<std::string, std::map<uint64_t, std::pair<size_t, size_t>>> per_seed;  // evaded, attempts
        std::map<std::string, double> iterations;
        r.transformation.error_table = empty_error_table();
        std::optional<NeuralStats> neural;
        if (c_.neural) {
            neural = NeuralStats{};
            neural->transformation.error_table = empty_error_table();
        }
        size_t neural_evaded = 0, neural_attempts = 0;
        for (const auto& v : verdicts) {
            if (v.at("kind") == "evasion") {
                std::string method = v.at("method");
                bool hit = v.at("evaded").get<bool>();
                if (method == "neural") {
                    ++neural_attempts;
                    neural_evaded += hit;
                    continue;
                }
                std::string key = v.at("attributor").get<std::string>() + "/" + method;
                auto& cell = per_seed[key][v.at("seed").get<uint64_t>()];
                cell.first += hit;
                ++cell.second;
                iterations[key] += v.at("iterations").get<double>();
            } else {
                TransformationMetrics& m = v.at("source") == "neural" ? neural->transformation : r.transformation;
                std::string verdict = v.at("verdict");
                if (verdict == "excluded") {
                    ++m.excluded_no_tests;
                    continue;
                }
                ++m.total;
                if (verdict == to_string(Verdict::Equivalent))
                    ++m.equivalent;
                else if (v.contains("category"))
                    ++m.error_table[category_from_string(v.at("category").get<std::string>())];
            }
        }
        auto finish = [](TransformationMetrics& m) {
            m.rate = m.total ? static_cast<double>(m.equivalent) / static_cast<double>(m.total) : 0.0;
        };
        finish(r.transformation);
        for (auto& [name, a] : r.attributors) {
            auto fill = [&](const std::string& method, MethodStats& s) {
                std::string key = name + "/" + method;
                for (uint64_t seed : c_.seeds) {
                    auto [hit, n] = per_seed[key][seed];
                    s.per_seed.push_back(n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0);
                    s.evaded += hit;
                    s.attempts += n;
                }
                s.rate = s.attempts ? static_cast<double>(s.evaded) / static_cast<double>(s.attempts) : 0.0;
                s.mean_iterations = s.attempts ? iterations[key] / static_cast<double>(s.attempts) : 0.0;
            };
            fill("mcts", a.mcts);
            if (a.random) fill("random", *a.random);
        }
        if (neural) {
            finish(neural->transformation);
            neural->evasion_rate =
                neural_attempts ? static_cast<double>(neural_evaded) / static_cast<double>(neural_attempts) : 0.0;
            r.neural = neural;
        }
        if (c_.pairgen) {
            json p = read_json(done_file("pairgen"));
            r.pairgen = PairgenStats{p.at("units"), p.at("style_sets"), p.at("variants"), p.at("successful_variants"),
                                     p.at("pairs")};
        }
        return r;
    }
};

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& config) { return Runner(config).run(); }

RecomputedRates recompute_from_verdicts(const fs::path& path) {
    RecomputedRates out;
    out.error_table = empty_error_table();
    std::map<std::string, std::pair<size_t, size_t>> evasion;
    size_t equivalent = 0, total = 0;
    for (const auto& v : read_jsonl_lines(path)) {
        if (v.at("kind") == "evasion") {
            auto& cell = evasion[v.at("attributor").get<std::string>() + "/" + v.at("method").get<std::string>()];
            cell.first += v.at("evaded").get<bool>();
            ++cell.second;
        } else if (v.at("source") == "mcts" && v.at("verdict") != "excluded") {
            ++total;
            if (v.at("verdict") == to_string(Verdict::Equivalent))
                ++equivalent;
            else if (v.contains("category"))
                ++out.error_table[category_from_string(v.at("category").get<std::string>())];
        }
    }
    for (const auto& [key, cell] : evasion)
        out.evasion[key] = static_cast<double>(cell.first) / static_cast<double>(cell.second);
    out.transformation = total ? static_cast<double>(equivalent) / static_cast<double>(total) : 0.0;
    return out;
}

}  // namespace stylo
