#include <doctest.h>

#include "stylo/parser.hpp"
#include "stylo/verify.hpp"

using namespace stylo;

namespace {

const char* kOriginal =
    "#include <iostream>\nusing namespace std;\n"
    "int main() {\n    int a, b;\n    cin >> a;\n    cin >> b;\n    int s = a + b;\n"
    "    cout << s << endl;\n    cout << a * b << endl;\n    return 0;\n}\n";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

std::vector<TestCase> tests() { return {{"2 3", "5\n6\n", {}}, {"4 4", "8\n16\n", {}}, {"0 9", "9\n0\n", {}}}; }

}  // namespace

TEST_CASE("normalization") {
    CHECK(normalize_output("a  \nb\t\n\n\n") == "a\nb");
    CHECK(normalize_output("") == "");
    CHECK(normalize_output("  x") == "  x");
    TestCase t{"", "1.000\n", 1e-6};
    CHECK(outputs_match("1\n", t));
    CHECK_FALSE(outputs_match("1.1\n", t));
    CHECK_FALSE(outputs_match("1\n", TestCase{"", "1.000\n", {}}));
}

TEST_CASE("identical candidate is equivalent") {
    Ast orig = parse_source(kOriginal);
    auto v = check_equivalence(orig, kOriginal, tests());
    CHECK(v.equivalent());
    CHECK_FALSE(v.failure);
    CHECK(check_equivalence(orig, print_source(orig), tests()).equivalent());
}

TEST_CASE("no tests") { CHECK_THROWS_AS(check_equivalence(parse_source(kOriginal), kOriginal, {}), NoTests); }

TEST_CASE("missing semicolon after return") {
    Ast orig = parse_source(kOriginal);
    auto v = check_equivalence(orig, replace(kOriginal, "return 0;", "return 0"), tests());
    CHECK(v.verdict == Verdict::SyntaxFail);
    REQUIRE(v.failure);
    CHECK(v.failure->category == ErrorCategory::MissingSemicolonOrBrace);
}

TEST_CASE("printing the wrong variable") {
    Ast orig = parse_source(kOriginal);
    auto v = check_equivalence(orig, replace(kOriginal, "cout << s <<", "cout << a <<"), tests());
    CHECK(v.verdict == Verdict::SemanticFail);
    REQUIRE(v.failed_case);
    CHECK(*v.failed_case == 0);
    REQUIRE(v.failure);
    CHECK(v.failure->category == ErrorCategory::MisusedVariable);
}

TEST_CASE("taxonomy over one seeded candidate per category") {
    Ast orig = parse_source(kOriginal);
    struct Case {
        std::string source;
        ErrorCategory want;
    };
    std::vector<Case> cases = {
        {replace(kOriginal, "int s = a + b;", "int s = a + t;"), ErrorCategory::UndeclaredVariable},
        {replace(kOriginal, "int a, b;", "int a, b;\n    int a;"), ErrorCategory::RedeclaredVariable},
        {replace(kOriginal, "int s = a + b;", "int s = a + b"), ErrorCategory::MissingSemicolonOrBrace},
        {replace(kOriginal, "return 0;", "return;"), ErrorCategory::ReturnStatement},
        {replace(kOriginal, "int s = a + b;", "int s = a + ;"), ErrorCategory::SyntaxOther},
        {replace(kOriginal, "int s = a + b;", "int s = b + b;"), ErrorCategory::MisusedVariable},
        {replace(kOriginal, "    cout << a * b << endl;\n", ""), ErrorCategory::OutputStatement},
        {replace(kOriginal, "    cin >> b;\n", ""), ErrorCategory::InputStatement},
    };
    for (const auto& c : cases) {
        auto v = check_equivalence(orig, c.source, tests());
        CHECK_FALSE(v.equivalent());
        REQUIRE(v.failure);
        CHECK_MESSAGE(v.failure->category == c.want, to_string(c.want) << " got " << to_string(v.failure->category));
        CHECK(v.failure->family == family_of(c.want));
        auto t = tests();
        const TestCase* failing = v.failed_case ? &t[*v.failed_case] : nullptr;
        CHECK(classify_failure(orig, c.source, failing) == *v.failure);
    }
}

TEST_CASE("runtime failure of the candidate is a semantic failure") {
    Ast orig = parse_source(kOriginal);
    auto v = check_equivalence(orig, replace(kOriginal, "int s = a + b;", "int s = a / (b - b);"), tests());
    CHECK(v.verdict == Verdict::SemanticFail);
    REQUIRE(v.failure);
    CHECK(v.failure->family == ErrorFamily::Semantic);
}

TEST_CASE("external compiler backend") {
    if (std::system("command -v g++ >/dev/null 2>&1") != 0) return;
    ExternalBackend be;
    be.timeout_secs = 60;
    CHECK(check_equivalence_external(kOriginal, tests(), be).equivalent());
    auto bad = check_equivalence_external(replace(kOriginal, "return 0;", "return 0"), tests(), be);
    CHECK(bad.verdict == Verdict::SyntaxFail);
}
