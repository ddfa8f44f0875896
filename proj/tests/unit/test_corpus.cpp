#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "stylo/corpus.hpp"
#include "stylo/rng.hpp"

using namespace stylo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("stylo-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void put(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

const char* kProgram = "int main(){int x=1; return x;}";

Corpus make_corpus(int authors, int per_author) {
    std::vector<SourceUnit> units;
    for (int a = 0; a < authors; ++a)
        for (int c = 0; c < per_author; ++c)
            units.push_back({"author" + std::to_string(a), "c" + std::to_string(c), kProgram, {}});
    return Corpus::from_units(std::move(units));
}

}  // namespace

TEST_CASE("two authors with two files each") {
    TempDir d("ingest");
    for (const char* a : {"a2", "a1"})
        for (const char* c : {"p", "q"}) put(d.path / a / (std::string(c) + ".cpp"), kProgram);
    put(d.path / "a1" / "tests" / "p.1.in", "1 2\n");
    put(d.path / "a1" / "tests" / "p.1.out", "3\n");
    put(d.path / "a1" / "tests" / "p.2.in", "5\n");
    put(d.path / "a1" / "tests" / "p.2.out", "5\n");
    put(d.path / "a1" / "notes.txt", "ignored");
    Corpus c = ingest_corpus(d.path);
    CHECK(c.units.size() == 4);
    CHECK(c.authors == std::vector<std::string>{"a1", "a2"});
    CHECK(c.rejected.empty());
    REQUIRE(c.units[0].challenge == "p");
    REQUIRE(c.units[0].tests.size() == 2);
    CHECK(c.units[0].tests[0].input == "1 2\n");
    CHECK(c.units[0].tests[1].expected_output == "5\n");
    CHECK(ingest_corpus(d.path, 4) == c);
}

TEST_CASE("invalid UTF-8 is reported, not dropped silently") {
    TempDir d("utf8");
    put(d.path / "a" / "good.cpp", kProgram);
    put(d.path / "a" / "bad.cpp", std::string("int main(){return 0;} // \xff\xfe"));
    Corpus c = ingest_corpus(d.path);
    CHECK(c.units.size() == 1);
    REQUIRE(c.rejected.size() == 1);
    CHECK(c.rejected[0].reason == "invalid UTF-8");
    std::ostringstream report;
    write_rejections(c, report);
    auto line = nlohmann::json::parse(report.str());
    CHECK(line["path"].get<std::string>().find("bad.cpp") != std::string::npos);
}

TEST_CASE("out-of-subset units are rejected") {
    TempDir d("subset");
    put(d.path / "a" / "ok.cpp", kProgram);
    put(d.path / "a" / "cls.cpp", "class A {}; int main(){return 0;}");
    Corpus c = ingest_corpus(d.path);
    CHECK(c.units.size() == 1);
    REQUIRE(c.rejected.size() == 1);
    CHECK(c.rejected[0].reason.rfind("out of subset", 0) == 0);
}

TEST_CASE("missing root and empty corpus") {
    CHECK_THROWS_AS(ingest_corpus("/nonexistent/stylo/root"), MissingRoot);
    TempDir d("empty");
    CHECK_THROWS_AS(ingest_corpus(d.path), EmptyCorpus);
}

TEST_CASE("utf8 validation") {
    CHECK(valid_utf8("plain"));
    CHECK(valid_utf8("caf\xc3\xa9"));
    CHECK_FALSE(valid_utf8("\xc3"));
    CHECK_FALSE(valid_utf8("\xc0\xaf"));
    CHECK_FALSE(valid_utf8("\xed\xa0\x80"));
}

TEST_CASE("stratified split") {
    Corpus c = make_corpus(10, 8);
    auto [train, test] = split_dataset(c, 7, 0.75);
    CHECK(train.units.size() == 60);
    CHECK(test.units.size() == 20);
    for (const auto& a : c.authors) {
        int n_train = 0, n_test = 0;
        for (const auto& u : train.units) n_train += u.author == a;
        for (const auto& u : test.units) n_test += u.author == a;
        CHECK(n_train == 6);
        CHECK(n_test == 2);
    }
    auto again = split_dataset(c, 7, 0.75);
    CHECK(again.first == train);
    CHECK(again.second == test);
}

TEST_CASE("split partitions the corpus for many seeds and fractions") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        int authors = 2 + static_cast<int>(rng.below(6));
        std::vector<SourceUnit> units;
        for (int a = 0; a < authors; ++a) {
            int n = 2 + static_cast<int>(rng.below(9));
            for (int k = 0; k < n; ++k) units.push_back({"a" + std::to_string(a), "c" + std::to_string(k), kProgram, {}});
        }
        Corpus c = Corpus::from_units(units);
        double f = 0.05 + 0.9 * rng.uniform();
        auto [train, test] = split_dataset(c, rng.next(), f);
        CHECK(train.units.size() + test.units.size() == c.units.size());
        std::vector<SourceUnit> joined = train.units;
        joined.insert(joined.end(), test.units.begin(), test.units.end());
        CHECK(Corpus::from_units(joined).units == c.units);
        for (const auto& a : c.authors) {
            long n = 0, k = 0;
            for (const auto& u : c.units) n += u.author == a;
            for (const auto& u : train.units) k += u.author == a;
            long want = std::clamp(std::lround(f * static_cast<double>(n)), 1L, n - 1);
            CHECK(k == want);
        }
    }
}

TEST_CASE("author with a single unit") {
    Corpus c = make_corpus(3, 2);
    c.units.push_back({"zed", "c0", kProgram, {}});
    c = Corpus::from_units(c.units);
    try {
        split_dataset(c, 1, 0.5);
        FAIL("expected AuthorTooSmall");
    } catch (const AuthorTooSmall& e) {
        CHECK(e.author() == "zed");
    }
}

TEST_CASE("json round trip and layout round trip") {
    Corpus c = make_corpus(2, 2);
    c.units[0].tests.push_back({"1\n", "1\n", 0.5});
    c.units[1].tests.push_back({"2\n", "2\n", {}});
    CHECK(corpus_from_json(to_json(c)) == c);
    TempDir d("layout");
    write_corpus(c, d.path);
    Corpus back = ingest_corpus(d.path);
    CHECK(back.units.size() == c.units.size());
    CHECK(back.units[1].tests == c.units[1].tests);
}
