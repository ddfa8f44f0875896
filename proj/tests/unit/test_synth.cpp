#include <doctest.h>

#include <set>

#include "stylo/error.hpp"
#include "stylo/parser.hpp"
#include "stylo/synth.hpp"
#include "stylo/verify.hpp"

using namespace stylo;

TEST_CASE("generated programs parse, run and are deterministic") {
    auto a = generate_programs(12, 99);
    auto b = generate_programs(12, 99);
    REQUIRE(a.size() == 12);
    std::set<std::string> distinct;
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].source == b[i].source);
        CHECK(a[i].tests.size() == 3);
        Ast ast = parse_source(a[i].source);
        CHECK(check_equivalence(ast, a[i].source, a[i].tests).equivalent());
        CHECK_FALSE(enumerate_actions(ast).empty());
        distinct.insert(a[i].source);
    }
    CHECK(distinct.size() == a.size());
    CHECK(generate_program(5, 5).tests.size() == 5);
}

TEST_CASE("style signatures differ in token-visible knobs") {
    auto s = style_signatures(20, 3);
    REQUIRE(s.size() == 20);
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j) {
            int d = (s[i].use_printf != s[j].use_printf) + (s[i].use_while != s[j].use_while) +
                    (s[i].long_alias != s[j].long_alias) + (s[i].update_form != s[j].update_form) +
                    (s[i].swap_branches != s[j].swap_branches);
            CHECK(d >= 2);
        }
}

TEST_CASE("styling preserves semantics") {
    auto styles = style_signatures(6, 11);
    for (const auto& p : challenge_programs()) {
        Ast orig = parse_source(p.source);
        for (const auto& st : styles) {
            std::string styled = apply_style(p.source, st);
            CHECK(check_equivalence(orig, styled, p.tests).equivalent());
            if (st.use_printf) CHECK(styled.find("cout") == std::string::npos);
        }
    }
}

TEST_CASE("authored corpus shape") {
    Corpus c = generate_authored_corpus(5, 4, 1);
    CHECK(c.units.size() == 20);
    CHECK(c.authors.size() == 5);
    CHECK(c.authors.front() == "a01");
    CHECK(c == generate_authored_corpus(5, 4, 1));
    for (const auto& u : c.units) CHECK(u.tests.size() >= 3);
    CHECK_THROWS_AS(generate_authored_corpus(1, 4, 1), ConfigError);
    CHECK_THROWS_AS(generate_authored_corpus(3, 9, 1), ConfigError);
}
