#include "stylo/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "stylo/binder.hpp"
#include "stylo/parallel.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"

namespace stylo {

namespace fs = std::filesystem;

Corpus Corpus::from_units(std::vector<SourceUnit> units) {
    Corpus c;
    std::sort(units.begin(), units.end(), [](const SourceUnit& a, const SourceUnit& b) {
        return std::tie(a.author, a.challenge) < std::tie(b.author, b.challenge);
    });
    std::set<std::string> names;
    for (const auto& u : units) names.insert(u.author);
    c.units = std::move(units);
    c.authors.assign(names.begin(), names.end());
    return c;
}

size_t Corpus::author_index(const std::string& author) const {
    auto it = std::lower_bound(authors.begin(), authors.end(), author);
    if (it == authors.end() || *it != author) throw Error("unknown author: " + author);
    return static_cast<size_t>(it - authors.begin());
}

bool valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        size_t len;
        uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += len;
    }
    return true;
}

namespace {

std::optional<std::string> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Job {
    std::string author;
    fs::path file;
};

struct Outcome {
    std::optional<SourceUnit> unit;
    std::optional<Rejection> rejection;
};

// tests/<challenge>.<N>.in|out grouped by challenge, ordered by N.
std::vector<TestCase> load_tests(const fs::path& dir, const std::string& challenge, std::vector<Rejection>& bad) {
    std::map<long, std::pair<std::optional<fs::path>, std::optional<fs::path>>> found;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return {};
    std::string prefix = challenge + ".";
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0) continue;
        std::string rest = name.substr(prefix.size());
        size_t dot = rest.find('.');
        if (dot == std::string::npos) continue;
        std::string num = rest.substr(0, dot), ext = rest.substr(dot + 1);
        if (num.empty() || !std::all_of(num.begin(), num.end(), ::isdigit)) continue;
        if (ext == "in")
            found[std::stol(num)].first = entry.path();
        else if (ext == "out")
            found[std::stol(num)].second = entry.path();
    }
    std::vector<TestCase> tests;
    for (const auto& [n, files] : found) {
        if (!files.first || !files.second) {
            bad.push_back({(files.first ? *files.first : *files.second).string(), "test file without its pair"});
            continue;
        }
        auto in = read_bytes(*files.first), out = read_bytes(*files.second);
        if (!in || !out || !valid_utf8(*in) || !valid_utf8(*out)) {
            bad.push_back({files.first->string(), "unreadable test pair"});
            continue;
        }
        tests.push_back({*in, *out, {}});
    }
    return tests;
}

Outcome ingest_one(const Job& job, std::vector<Rejection>& test_issues) {
    Outcome o;
    auto bytes = read_bytes(job.file);
    if (!bytes) {
        o.rejection = Rejection{job.file.string(), "unreadable"};
        return o;
    }
    if (!valid_utf8(*bytes)) {
        o.rejection = Rejection{job.file.string(), "invalid UTF-8"};
        return o;
    }
    try {
        Ast ast = parse_source(*bytes);
        bind(ast);
    } catch (const Error& e) {
        o.rejection = Rejection{job.file.string(), std::string("out of subset: ") + e.what()};
        return o;
    }
    SourceUnit u;
    u.author = job.author;
    u.challenge = job.file.stem().string();
    u.code = std::move(*bytes);
    u.tests = load_tests(job.file.parent_path() / "tests", u.challenge, test_issues);
    o.unit = std::move(u);
    return o;
}

}  // namespace

Corpus ingest_corpus(const fs::path& root, int workers) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw MissingRoot("corpus root does not exist: " + root.string());
    std::vector<Job> jobs;
    for (const auto& a : fs::directory_iterator(root)) {
        if (!a.is_directory()) continue;
        std::string author = a.path().filename().string();
        for (const auto& f : fs::directory_iterator(a.path()))
            if (f.is_regular_file() && f.path().extension() == ".cpp") jobs.push_back({author, f.path()});
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& x, const Job& y) { return x.file < y.file; });

    std::vector<Outcome> outcomes(jobs.size());
    std::vector<std::vector<Rejection>> issues(jobs.size());
    parallel_for(jobs.size(), workers, [&](size_t i) { outcomes[i] = ingest_one(jobs[i], issues[i]); });

    std::vector<SourceUnit> units;
    std::vector<Rejection> rejected;
    for (size_t i = 0; i < jobs.size(); ++i) {
        if (outcomes[i].unit) units.push_back(std::move(*outcomes[i].unit));
        if (outcomes[i].rejection) rejected.push_back(std::move(*outcomes[i].rejection));
        for (auto& r : issues[i]) rejected.push_back(std::move(r));
    }
    if (units.empty()) throw EmptyCorpus("no parsable units under " + root.string());
    Corpus c = Corpus::from_units(std::move(units));
    c.rejected = std::move(rejected);
    return c;
}

std::pair<Corpus, Corpus> split_dataset(const Corpus& corpus, uint64_t seed, double train_fraction) {
    if (!(train_fraction > 0 && train_fraction < 1)) throw ConfigError("train fraction must lie in (0, 1)");
    std::map<std::string, std::vector<size_t>> by_author;
    for (size_t i = 0; i < corpus.units.size(); ++i) by_author[corpus.units[i].author].push_back(i);
    for (const auto& [author, idx] : by_author)
        if (idx.size() < 2) throw AuthorTooSmall(author);
    std::vector<SourceUnit> train, test;
    for (auto& [author, idx] : by_author) {
        Rng rng(mix_seed(seed, stable_hash(author)));
        rng.shuffle(idx);
        auto n = static_cast<long>(idx.size());
        long k = std::lround(train_fraction * static_cast<double>(n));
        k = std::clamp(k, 1L, n - 1);
        for (long i = 0; i < n; ++i) (i < k ? train : test).push_back(corpus.units[idx[static_cast<size_t>(i)]]);
    }
    return {Corpus::from_units(std::move(train)), Corpus::from_units(std::move(test))};
}

void write_corpus(const Corpus& corpus, const fs::path& root) {
    for (const auto& u : corpus.units) {
        fs::path dir = root / u.author;
        fs::create_directories(dir / "tests");
        auto put = [](const fs::path& p, const std::string& text) {
            std::ofstream out(p, std::ios::binary);
            out << text;
            if (!out) throw IoError("cannot write " + p.string());
        };
        put(dir / (u.challenge + ".cpp"), u.code);
        for (size_t i = 0; i < u.tests.size(); ++i) {
            std::string stem = u.challenge + "." + std::to_string(i + 1);
            put(dir / "tests" / (stem + ".in"), u.tests[i].input);
            put(dir / "tests" / (stem + ".out"), u.tests[i].expected_output);
        }
    }
}

void write_rejections(const Corpus& corpus, std::ostream& out) {
    for (const auto& r : corpus.rejected) out << nlohmann::json{{"path", r.path}, {"reason", r.reason}}.dump() << "\n";
}

nlohmann::json to_json(const SourceUnit& u) {
    auto tests = nlohmann::json::array();
    for (const auto& t : u.tests) {
        nlohmann::json jt{{"input", t.input}, {"expected_output", t.expected_output}};
        if (t.abs_tolerance) jt["abs_tolerance"] = *t.abs_tolerance;
        tests.push_back(std::move(jt));
    }
    return {{"author", u.author}, {"challenge", u.challenge}, {"code", u.code}, {"tests", tests}};
}

nlohmann::json to_json(const Corpus& c) {
    auto units = nlohmann::json::array();
    for (const auto& u : c.units) units.push_back(to_json(u));
    auto rejected = nlohmann::json::array();
    for (const auto& r : c.rejected) rejected.push_back({{"path", r.path}, {"reason", r.reason}});
    return {{"authors", c.authors}, {"units", units}, {"rejected", rejected}};
}

Corpus corpus_from_json(const nlohmann::json& j) {
    std::vector<SourceUnit> units;
    for (const auto& ju : j.at("units")) {
        SourceUnit u;
        u.author = ju.at("author").get<std::string>();
        u.challenge = ju.at("challenge").get<std::string>();
        u.code = ju.at("code").get<std::string>();
        for (const auto& jt : ju.at("tests")) {
            TestCase t{jt.at("input").get<std::string>(), jt.at("expected_output").get<std::string>(), {}};
            if (jt.contains("abs_tolerance")) t.abs_tolerance = jt["abs_tolerance"].get<double>();
            u.tests.push_back(std::move(t));
        }
        units.push_back(std::move(u));
    }
    Corpus c = Corpus::from_units(std::move(units));
    if (j.contains("rejected"))
        for (const auto& r : j["rejected"]) c.rejected.push_back({r.at("path"), r.at("reason")});
    return c;
}

}  // namespace stylo
