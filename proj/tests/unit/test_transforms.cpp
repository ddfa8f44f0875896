#include <doctest.h>

#include <algorithm>
#include <set>

#include "stylo/binder.hpp"
#include "stylo/error.hpp"
#include "stylo/interp.hpp"
#include "stylo/parser.hpp"
#include "stylo/transforms.hpp"
#include "stylo/verify.hpp"

using namespace stylo;

namespace {

struct Program {
    const char* source;
    std::vector<TestCase> tests;
};

const std::vector<Program>& programs() {
    static const std::vector<Program> p = {
        {"#include <iostream>\nusing namespace std;\n"
         "int main() {\n    int n;\n    cin >> n;\n    int s = 0;\n"
         "    for (int i = 0; i < n; i++) {\n        s += i;\n    }\n    cout << s << endl;\n    return 0;\n}\n",
         {{"5", "10\n", {}}, {"0", "0\n", {}}, {"10", "45\n", {}}}},
        {"#include <cstdio>\n#include <iostream>\nusing namespace std;\n"
         "int main() {\n    int t, total = 0, k;\n    scanf(\"%d\", &t);\n"
         "    for (k = 1; k <= t; ++k) {\n        if (k % 3 == 0) continue;\n        if (k > 7) break;\n"
         "        total = total + k;\n    }\n    printf(\"Case #%d: %d\\n\", t, total);\n    return 0;\n}\n",
         {{"5", "Case #5: 12\n", {}}, {"20", "Case #20: 19\n", {}}, {"2", "Case #2: 3\n", {}}}},
        {"#include <iostream>\n#include <vector>\nusing namespace std;\n"
         "long long sq(long long x) { return x * x; }\n"
         "int main() {\n    long long a, b;\n    cin >> a >> b;\n    vector<long long> v;\n"
         "    long long best;\n    int i = 0;\n    best = a;\n    while (i < 3) {\n        v.push_back(sq(a + i));\n"
         "        i++;\n    }\n    if (a > b) cout << \"big \" << sq(a) << endl;\n    else {\n        best = b;\n"
         "        cout << best << '\\n';\n    }\n    cout << v[2] - b << endl;\n    return 0;\n}\n",
         {{"3 2", "big 9\n23\n", {}}, {"1 5", "5\n4\n", {}}, {"100000 7", "big 10000000000\n10000399997\n", {}}}},
        {"#include <iostream>\n#include <string>\nusing namespace std;\ntypedef long long ll;\n"
         "int main() {\n    string name;\n    ll count;\n    cin >> name >> count;\n    char c = name[0];\n"
         "    ll acc = 1;\n    do {\n        acc *= 2;\n        count--;\n    } while (count > 0);\n"
         "    cout << c << \" \" << name << \" \" << acc << endl;\n    return 0;\n}\n",
         {{"bob 3", "b bob 8\n", {}}, {"x 1", "x x 2\n", {}}, {"alice 10", "a alice 1024\n", {}}}},
    };
    return p;
}

void check_all_actions(const Program& prog) {
    Ast ast = parse_source(prog.source);
    auto actions = enumerate_actions(ast);
    REQUIRE_FALSE(actions.empty());
    for (const auto& a : actions) {
        INFO(to_string(a));
        Ast out = apply(ast, a);
        std::string text = print_source(out);
        INFO(text);
        Ast back = parse_source(text);
        CHECK(structurally_equal(back, parse_source(print_source(back))));
        auto v = check_equivalence(ast, text, prog.tests);
        CHECK(v.equivalent());
        for (const auto& b : enumerate_actions(back)) {
            INFO(to_string(b));
            std::string twice = print_source(apply(back, b));
            CHECK(check_equivalence(ast, twice, prog.tests).equivalent());
        }
    }
}

size_t count_of(const std::vector<TransformAction>& v, TransformId id) {
    return static_cast<size_t>(std::count_if(v.begin(), v.end(), [&](auto& a) { return a.transform == id; }));
}

}  // namespace

TEST_CASE("catalog lists twelve transforms") {
    REQUIRE(transform_catalog().size() == static_cast<size_t>(kTransformCount));
    CHECK(info(TransformId::T1).code == "T1");
    CHECK(transform_from_string("T12") == TransformId::T12);
    CHECK(transform_from_string("for-to-while") == TransformId::T1);
    CHECK_THROWS_AS(transform_from_string("T13"), ConfigError);
}

TEST_CASE("naming schemes") {
    CHECK(split_words("maxValue") == std::vector<std::string>{"max", "value"});
    CHECK(split_words("max_value2") == std::vector<std::string>{"max", "value", "2"});
    CHECK(split_words("HTTPServer") == std::vector<std::string>{"http", "server"});
    CHECK(apply_scheme("max_value", NamingScheme::Camel) == "maxValue");
    CHECK(apply_scheme("maxValue", NamingScheme::Snake) == "max_value");
    CHECK(apply_scheme("count", NamingScheme::Camel) == "countVal");
    CHECK(apply_scheme("count", NamingScheme::Snake) == "count_val");
    CHECK(apply_scheme("Total", NamingScheme::SingleLetter) == "t");
}

TEST_CASE("one for loop yields exactly one T1 action") {
    Ast ast = parse_source("int main() {\n    for (int i = 0; i < 3; i++) {\n    }\n    return 0;\n}\n");
    CHECK(count_of(enumerate_actions(ast), TransformId::T1) == 1);
}

TEST_CASE("empty main admits only layout and naming actions") {
    Ast ast = parse_source("int main() {\n}\n");
    for (const auto& a : enumerate_actions(ast)) CHECK(info(a.transform).family == TransformFamily::Layout);
    Ast ret = parse_source("int main() {\n    return 0;\n}\n");
    for (const auto& a : enumerate_actions(ret)) CHECK(info(a.transform).family == TransformFamily::Layout);
}

TEST_CASE("enumeration is deterministic") {
    for (const auto& p : programs()) {
        Ast ast = parse_source(p.source);
        CHECK(enumerate_actions(ast) == enumerate_actions(ast));
        CHECK(enumerate_actions(ast) == enumerate_actions(parse_source(p.source)));
    }
}

TEST_CASE("T1 without a for loop is inapplicable") {
    Ast ast = parse_source("int main() {\n    int x = 0;\n    return x;\n}\n");
    TransformAction a{TransformId::T1, {{0, 1, 0}, ""}};
    CHECK_THROWS_AS(apply(ast, a), InapplicableAction);
    CHECK_THROWS_AS(apply(ast, TransformAction{TransformId::T1, {{9, 9}, ""}}), InapplicableAction);
}

TEST_CASE("T1 example: for to while") {
    const char* src = "int main() {\n    int n = 4, s = 0;\n    for (int i = 0; i < n; i++) {\n        s += i;\n"
                      "    }\n    printf(\"%d\", s);\n    return 0;\n}\n";
    Ast ast = parse_source(src);
    auto acts = enumerate_actions(ast, TransformId::T1);
    REQUIRE(acts.size() == 1);
    Ast before = ast;
    std::string out = print_source(apply(ast, acts[0]));
    CHECK(structurally_equal(ast, before));
    CHECK(out.find("for") == std::string::npos);
    auto decl = out.find("int i = 0;");
    auto loop = out.find("while (i < n)");
    auto inc = out.find("i++;");
    REQUIRE(decl != std::string::npos);
    REQUIRE(loop != std::string::npos);
    REQUIRE(inc != std::string::npos);
    CHECK(decl < loop);
    CHECK(loop < out.find("s += i;"));
    CHECK(out.find("s += i;") < inc);
    CHECK(execute(parse_source(out), "").stdout_text == "6");
}

TEST_CASE("T1 routes continue through the increment") {
    const char* src = "int main() {\n    int s = 0;\n    for (int i = 0; i < 10; i++) {\n        if (i % 2) continue;\n"
                      "        if (i == 8) break;\n        s += i;\n    }\n    printf(\"%d\", s);\n}\n";
    Ast ast = parse_source(src);
    auto acts = enumerate_actions(ast, TransformId::T1);
    REQUIRE(acts.size() == 1);
    Ast out = apply(ast, acts[0]);
    std::string text = print_source(out);
    CHECK(text.find("do") != std::string::npos);
    CHECK(execute(out, "").stdout_text == "12");
    CHECK(execute(ast, "").stdout_text == "12");
}

TEST_CASE("T5 example: rename everywhere in scope") {
    const char* src = "int main() {\n    int a = 2;\n    int b = a * a;\n    a = a + b;\n    printf(\"%d\", a);\n}\n";
    Ast ast = parse_source(src);
    auto acts = enumerate_actions(ast, TransformId::T5);
    REQUIRE_FALSE(acts.empty());
    auto it = std::find_if(acts.begin(), acts.end(), [](auto& x) { return x.site.path == NodePath{0, 0, 0, 0}; });
    REQUIRE(it != acts.end());
    Ast out = apply(ast, *it);
    Bindings b = bind(out);
    for (const auto& d : b.decls) CHECK(d.name != "a");
    CHECK(execute(out, "").stdout_text == "6");
    TransformAction bogus{TransformId::T5, {{0, 0, 0, 0}, "value"}};
    CHECK_THROWS_AS(apply(ast, bogus), InapplicableAction);
}

TEST_CASE("rename pool is bounded") {
    std::string src = "int main() {\n";
    for (int i = 0; i < 12; ++i) src += "    int v" + std::to_string(i) + " = " + std::to_string(i) + ";\n";
    src += "    return 0;\n}\n";
    auto acts = enumerate_actions(parse_source(src), TransformId::T5);
    std::set<NodePath> sites;
    for (const auto& a : acts) sites.insert(a.site.path);
    CHECK(sites.size() == static_cast<size_t>(kRenameVariableLimit));
    CHECK(acts.size() <= 3 * static_cast<size_t>(kRenameVariableLimit));
}

TEST_CASE("T3 and T4 convert between printf and cout") {
    const char* src = "#include <cstdio>\nusing namespace std;\n"
                      "int main() {\n    int x = 5;\n    printf(\"x=%d\\n\", x + 1);\n    return 0;\n}\n";
    Ast ast = parse_source(src);
    auto t3 = enumerate_actions(ast, TransformId::T3);
    REQUIRE(t3.size() == 1);
    Ast c = apply(ast, t3[0]);
    std::string text = print_source(c);
    CHECK(text.find("cout << \"x=\" << x + 1 << endl;") != std::string::npos);
    auto t4 = enumerate_actions(c, TransformId::T4);
    REQUIRE(t4.size() == 1);
    std::string back = print_source(apply(c, t4[0]));
    CHECK(back.find("printf(\"x=%d\\n\", x + 1);") != std::string::npos);
    CHECK(enumerate_actions(parse_source("int main() {\n    printf(\"%5d\", 3);\n}\n"), TransformId::T3).empty());
    CHECK(enumerate_actions(parse_source("#include <iostream>\nusing namespace std;\nint main() {\n"
                                         "    double d = 1.5;\n    cout << d;\n}\n"),
                            TransformId::T4)
              .empty());
}

TEST_CASE("T6 then T7 restores the declaration") {
    Ast ast = parse_source("int main() {\n    int a = 1, b = 2;\n    return a + b;\n}\n");
    auto t6 = enumerate_actions(ast, TransformId::T6);
    REQUIRE(t6.size() == 1);
    Ast split = apply(ast, t6[0]);
    auto t7 = enumerate_actions(split, TransformId::T7);
    REQUIRE(t7.size() == 1);
    CHECK(structurally_equal(apply(split, t7[0]), ast));
}

TEST_CASE("T8 forms") {
    Ast ast = parse_source("int main() {\n    int x = 1;\n    x += 1;\n    x = x - (2 + 1);\n    return x;\n}\n");
    auto acts = enumerate_actions(ast, TransformId::T8);
    std::vector<std::string> payloads;
    for (const auto& a : acts) payloads.push_back(a.site.payload);
    CHECK(payloads == std::vector<std::string>{"assign", "post", "pre", "compound"});
    std::string text = print_source(apply(ast, acts[3]));
    CHECK(text.find("x -= (2 + 1);") != std::string::npos);
}

TEST_CASE("T9 swaps branches") {
    Ast ast = parse_source("int main() {\n    int x = 3;\n    if (x > 2) x = 1;\n    else x = 2;\n    return x;\n}\n");
    auto acts = enumerate_actions(ast, TransformId::T9);
    REQUIRE(acts.size() == 1);
    Ast once = apply(ast, acts[0]);
    CHECK(print_source(once).find("if (!(x > 2))") != std::string::npos);
    CHECK(structurally_equal(apply(once, enumerate_actions(once, TransformId::T9)[0]), ast));
}

TEST_CASE("T11 inserts and removes the long long alias") {
    Ast ast = parse_source("#include <vector>\nusing namespace std;\nint main() {\n"
                           "    vector<long long> v(3);\n    long long s = (long long)2;\n    return (int)s;\n}\n");
    auto ins = enumerate_actions(ast, TransformId::T11);
    REQUIRE(ins.size() == 1);
    CHECK(ins[0].site.payload == "insert");
    Ast with = apply(ast, ins[0]);
    std::string text = print_source(with);
    CHECK(text.find("typedef long long ll;") != std::string::npos);
    CHECK(text.find("vector<ll> v(3);") != std::string::npos);
    CHECK(text.find("ll s = (ll)2;") != std::string::npos);
    auto rem = enumerate_actions(with, TransformId::T11);
    REQUIRE(rem.size() == 1);
    CHECK(rem[0].site.payload == "remove");
    CHECK(structurally_equal(apply(with, rem[0]), ast));
}

TEST_CASE("T12 moves a declaration to its first assignment") {
    Ast ast = parse_source("int main() {\n    int y;\n    int z = 4;\n    y = z * 2;\n    return y;\n}\n");
    auto acts = enumerate_actions(ast, TransformId::T12);
    REQUIRE(acts.size() == 1);
    std::string text = print_source(apply(ast, acts[0]));
    CHECK(text.find("int y = z * 2;") != std::string::npos);
    CHECK(enumerate_actions(parse_source("int main() {\n    int y;\n    y = y + 1;\n    return 0;\n}\n"),
                            TransformId::T12)
              .empty());
    CHECK(enumerate_actions(parse_source("int main() {\n    int y;\n    if (1) y = 2;\n    return y;\n}\n"),
                            TransformId::T12)
              .empty());
}

TEST_CASE("comments survive transforms") {
    Ast ast = parse_source("int main() {\n    // loop\n    for (int i = 0; i < 2; i++) {\n    }\n    return 0;\n}\n");
    auto acts = enumerate_actions(ast, TransformId::T1);
    REQUIRE(acts.size() == 1);
    CHECK(print_source(apply(ast, acts[0])).find("// loop") != std::string::npos);
}

TEST_CASE("action json round trip") {
    TransformAction a{TransformId::T5, {{0, 2, 1}, "fooBar"}};
    CHECK(action_from_json(to_json(a)) == a);
    CHECK(to_string(a) == "T5@0.2.1:fooBar");
}

TEST_CASE("every action on sample programs preserves semantics") {
    for (const auto& p : programs()) check_all_actions(p);
}

TEST_CASE("T1 composed with T2 is a semantic no-op") {
    const auto& p = programs()[0];
    Ast ast = parse_source(p.source);
    Ast w = apply(ast, enumerate_actions(ast, TransformId::T1)[0]);
    auto t2 = enumerate_actions(w, TransformId::T2);
    REQUIRE_FALSE(t2.empty());
    CHECK(check_equivalence(ast, print_source(apply(w, t2[0])), p.tests).equivalent());
}
