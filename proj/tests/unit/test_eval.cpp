#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "stylo/error.hpp"
#include "stylo/eval.hpp"
#include "stylo/synth.hpp"

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

SourceUnit unit(const std::string& author, const std::string& code, std::vector<TestCase> tests) {
    return {author, "c1", code, std::move(tests)};
}

const char* kSum = R"(#include <cstdio>
int main() {
    int n;
    scanf("%d", &n);
    int s = 0;
    for (int i = 1; i <= n; i++) {
        s += i;
    }
    printf("%d\n", s);
    return 0;
}
)";

std::vector<TestCase> sum_tests() { return {{"3\n", "6\n", {}}, {"10\n", "55\n", {}}, {"1\n", "1\n", {}}}; }

ExperimentConfig small_config(const fs::path& out) {
    std::istringstream in(R"(
synthetic_authors = 5
synthetic_challenges = 4
synthetic_seed = 3
seeds = 1, 2
trees = 25
budget = 40
max_depth = 4
pairgen_units = 1
pairgen_budget = 8
)");
    ExperimentConfig c = parse_config(in);
    c.out = out;
    c.workers = 2;
    return c;
}

nlohmann::json without_timing(const MetricsReport& r) { return to_json(r, false); }

}  // namespace

TEST_CASE("identical candidates give a perfect transformation rate") {
    std::vector<std::pair<SourceUnit, std::string>> outputs;
    for (int i = 0; i < 4; ++i) outputs.emplace_back(unit("a", kSum, sum_tests()), kSum);
    TransformationMetrics m = transformation_success_rate(outputs);
    CHECK(m.rate == 1.0);
    CHECK(m.total == 4);
    CHECK(m.excluded_no_tests == 0);
    for (const auto& [c, n] : m.error_table) CHECK(n == 0);
    CHECK(m.error_table.size() == 8);
}

TEST_CASE("failures land in the error table and units without tests are excluded") {
    std::string missing_semi = kSum;
    missing_semi.replace(missing_semi.find("int s = 0;"), 10, "int s = 0");
    std::string wrong_output = kSum;
    wrong_output.replace(wrong_output.find("printf(\"%d\\n\", s);"), 18, "printf(\"%d\\n\", n);");
    std::vector<std::pair<SourceUnit, std::string>> outputs = {
        {unit("a", kSum, sum_tests()), kSum},
        {unit("a", kSum, sum_tests()), missing_semi},
        {unit("a", kSum, sum_tests()), wrong_output},
        {unit("a", kSum, {}), kSum},
    };
    TransformationMetrics m = transformation_success_rate(outputs, {}, 2);
    CHECK(m.total == 3);
    CHECK(m.excluded_no_tests == 1);
    CHECK(m.equivalent == 1);
    CHECK(m.rate == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m.error_table.at(ErrorCategory::MissingSemicolonOrBrace) == 1);
    size_t semantic = 0;
    for (const auto& [c, n] : m.error_table)
        if (family_of(c) == ErrorFamily::Semantic) semantic += n;
    CHECK(semantic == 1);
    size_t failures = 0;
    for (const auto& [c, n] : m.error_table) failures += n;
    CHECK(static_cast<double>(failures) == doctest::Approx((1.0 - m.rate) * static_cast<double>(m.total)));
    REQUIRE(m.verdicts.size() == 3);
    CHECK(m.verdicts[1].verdict.verdict == Verdict::SyntaxFail);
}

TEST_CASE("evasion rate counts mislabels and treats unparsable candidates as failures") {
    Corpus c = generate_authored_corpus(4, 4, 11);
    ForestConfig f;
    f.n_trees = 40;
    AttributionModel m = train_attributor(c, ModelKind::TfidfRf, VocabConfig{}, f);
    std::vector<std::pair<std::string, std::string>> recall, wrong, broken;
    for (const auto& u : c.units) {
        recall.emplace_back(u.author, u.code);
        wrong.emplace_back(u.author == "a01" ? "a02" : "a01", u.code);
        broken.emplace_back(u.author == "a01" ? "a02" : "a01", "int main( {");
    }
    for (const auto& [a, code] : recall) REQUIRE(predict_source(m, code).author == a);
    CHECK(evasion_success_rate(m, recall) == 0.0);
    std::vector<std::pair<std::string, std::string>> own_wrong;
    for (const auto& [a, code] : wrong)
        if (predict_source(m, code).author != a) own_wrong.emplace_back(a, code);
    CHECK(evasion_success_rate(m, own_wrong, 3) == 1.0);
    CHECK(evasion_success_rate(m, broken) == 0.0);
    CHECK(evasion_success_rate(m, {}) == 0.0);
}

TEST_CASE("config parsing") {
    unsetenv("STYLO_WORKERS");
    std::istringstream in(R"(# comment
corpus = data   # trailing
seeds = 4,5 ,6
attributors = tfidf-rf, ast-rf
budget = 500
exploration = 0.5
early_stop = false
neural = true
neural_cmd = run {pairs} {inputs} {out}
workers = 3
)");
    ExperimentConfig c = parse_config(in);
    CHECK(c.corpus == "data");
    CHECK(c.seeds == std::vector<uint64_t>{4, 5, 6});
    CHECK(c.attributors.size() == 2);
    CHECK(c.search.exploration == 0.5);
    CHECK(!c.search.early_stop);
    CHECK(c.workers == 3);
    CHECK(c.echo.at("budget") == "500");

    auto bad = [](const std::string& text) {
        std::istringstream s(text);
        CHECK_THROWS_AS(parse_config(s), ConfigError);
    };
    bad("colour = blue\n");
    bad("budget = many\n");
    bad("budget = -1\n");
    bad("early_stop = perhaps\n");
    bad("train_fraction = 1.0\n");
    bad("attributors = svm\n");
    bad("neural = true\n");
    bad("just a line\n");

    setenv("STYLO_WORKERS", "7", 1);
    std::istringstream w("workers = 2\n");
    CHECK(parse_config(w).workers == 7);
    unsetenv("STYLO_WORKERS");
}

TEST_CASE("a small synthetic run populates every report field") {
    TempDir dir("eval-run");
    ExperimentConfig c = small_config(dir.path / "a");
    MetricsReport r = run_experiment(c);
    CHECK(r.corpus_units == 20);
    CHECK(r.corpus_authors == 5);
    REQUIRE(r.attributors.count("tfidf-rf") == 1);
    const AttributorReport& a = r.attributors.at("tfidf-rf");
    CHECK(a.accuracy_per_seed.size() == 2);
    CHECK(a.mcts.per_seed.size() == 2);
    REQUIRE(a.random);
    CHECK(a.mcts.attempts == a.random->attempts);
    CHECK(a.mcts.attempts > 0);
    CHECK(a.mcts.rate >= 0.0);
    CHECK(a.mcts.rate <= 1.0);
    CHECK(r.transformation.total == a.mcts.attempts);
    CHECK(r.transformation.rate == 1.0);
    REQUIRE(r.pairgen);
    CHECK(r.pairgen->style_sets == 1);
    CHECK(r.pairgen->pairs == 3);
    CHECK(!r.neural);
    std::vector<std::string> stages;
    for (const auto& [s, secs] : r.timing) stages.push_back(s);
    CHECK(stages == std::vector<std::string>{"ingest", "train", "evade", "pairgen", "verify", "report"});
    for (const char* f : {"corpus.json", "rejections.jsonl", "evasion.jsonl", "pairs.jsonl", "verdicts.jsonl",
                          "report.json", "report.txt"})
        CHECK(fs::exists(c.out / f));
    nlohmann::json j = to_json(r);
    CHECK(j.contains("timing"));
    CHECK(!j.contains("neural"));
    CHECK(j["config"]["budget"] == "40");
    CHECK(to_json(report_from_json(j)) == j);

    SUBCASE("rates recomputed from the verdict log match the summary") {
        RecomputedRates rr = recompute_from_verdicts(c.out / "verdicts.jsonl");
        CHECK(std::abs(rr.evasion.at("tfidf-rf/mcts") - a.mcts.rate) <= 1e-12);
        CHECK(std::abs(rr.evasion.at("tfidf-rf/random") - a.random->rate) <= 1e-12);
        CHECK(std::abs(rr.transformation - r.transformation.rate) <= 1e-12);
        CHECK(rr.error_table == r.transformation.error_table);
    }

    SUBCASE("a fresh rerun with the same seeds gives the same report") {
        ExperimentConfig c2 = c;
        c2.out = dir.path / "b";
        c2.workers = 1;
        CHECK(without_timing(run_experiment(c2)) == without_timing(r));
    }

    SUBCASE("a resumed run loads finished stages") {
        fs::remove(c.out / "stage-evade.json");
        fs::remove(c.out / "stage-verify.json");
        fs::remove(c.out / "verdicts.jsonl");
        fs::remove(c.out / "evasion.jsonl");
        MetricsReport again = run_experiment(c);
        CHECK(without_timing(again) == without_timing(r));
        CHECK(again.timing[1].second == r.timing[1].second);
        CHECK(again.timing[2].second != r.timing[2].second);
    }

    SUBCASE("a broken stage names itself and keeps earlier artifacts") {
        fs::remove(c.out / "stage-verify.json");
        fs::remove(c.out / "evasion.jsonl");
        try {
            run_experiment(c);
            FAIL("expected a stage failure");
        } catch (const StageFailure& e) {
            CHECK(e.stage() == "verify");
        }
        CHECK(fs::exists(c.out / "corpus.json"));
        CHECK(fs::exists(c.out / "stage-train.json"));
    }

    SUBCASE("the neural stage adds metrics without changing primary ones") {
        ExperimentConfig n = c;
        n.out = dir.path / "n";
        n.neural = true;
        n.neural_cmd = "cp {inputs}/*.cpp {out}/ && cp {inputs}/manifest.json {out}/manifest.json";
        MetricsReport rn = run_experiment(n);
        REQUIRE(rn.neural);
        CHECK(rn.neural->transformation.rate == 1.0);
        CHECK(rn.neural->transformation.total > 0);
        CHECK(rn.neural->evasion_rate < 1.0);
        nlohmann::json jn = without_timing(rn), jr = without_timing(r);
        jn.erase("neural");
        CHECK(jn["attributors"] == jr["attributors"]);
        CHECK(jn["transformation"] == jr["transformation"]);
        CHECK(jn["pairgen"] == jr["pairgen"]);
    }
}

TEST_CASE("a missing corpus fails the ingest stage") {
    TempDir dir("eval-missing");
    ExperimentConfig c;
    c.corpus = (dir.path / "nowhere").string();
    c.out = dir.path / "out";
    try {
        run_experiment(c);
        FAIL("expected a stage failure");
    } catch (const StageFailure& e) {
        CHECK(e.stage() == "ingest");
    }
}

TEST_CASE("the text report carries every table") {
    MetricsReport r;
    r.corpus_units = 3;
    r.transformation.error_table = empty_error_table();
    r.attributors["tfidf-rf"].accuracy_per_seed = {1.0};
    r.timing = {{"ingest", 0.5}};
    std::ostringstream out;
    write_text_report(r, out);
    std::string text = out.str();
    for (const char* heading : {"Attribution accuracy", "Transformation", "Syntax errors", "Semantic errors",
                                "Evasion success rate", "Timing"})
        CHECK(text.find(heading) != std::string::npos);
    CHECK(text.find("missing-semicolon-or-brace") != std::string::npos);
}
