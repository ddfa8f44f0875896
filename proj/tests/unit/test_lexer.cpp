#include <doctest.h>

#include "stylo/lexer.hpp"

using namespace stylo;

TEST_CASE("declaration splits into five tokens") {
    auto ts = tokenize("int a=1;");
    REQUIRE(ts.tokens.size() == 5);
    const TokenKind want[] = {TokenKind::Keyword, TokenKind::Identifier, TokenKind::Operator,
                              TokenKind::IntegerLiteral, TokenKind::Punctuation};
    const char* text[] = {"int", "a", "=", "1", ";"};
    for (size_t i = 0; i < 5; ++i) {
        CHECK(ts.tokens[i].kind == want[i]);
        CHECK(ts.tokens[i].text == text[i]);
    }
    CHECK(ts.tokens[3].column == 7);
}

TEST_CASE("empty input has no tokens") {
    auto ts = tokenize("");
    CHECK(ts.tokens.empty());
    CHECK(ts.trailing.empty());
}

TEST_CASE("unterminated string reports its start") {
    try {
        tokenize("\"abc");
        FAIL("expected LexError");
    } catch (const LexError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 1);
    }
    CHECK_THROWS_AS(tokenize("int x = 'a"), LexError);
    CHECK_THROWS_AS(tokenize("/* open"), LexError);
}

TEST_CASE("reconstruct is byte exact") {
    const char* sources[] = {
        "#include <cstdio>\nusing namespace std;\n\n// entry\nint main() {\n\tint x = 0x1F; /* hex */\n  return x>>1;\n}\n",
        "   ",
        "a+++b--//tail",
        "double d = 1.5e-3, e = .5; long long v = 10LL; char c = '\\n'; string s = \"q\\\"x\";",
    };
    for (const char* s : sources) CHECK(reconstruct(tokenize(s)) == s);
}

TEST_CASE("comments attach to the following token") {
    auto ts = tokenize("int a; // note\nint b;");
    REQUIRE(ts.tokens.size() == 6);
    CHECK(ts.tokens[3].leading == " // note\n");
    auto items = trivia_items(ts.tokens[3].leading);
    REQUIRE(items.size() == 1);
    CHECK(items[0] == "// note");
}

TEST_CASE("multi-character operators") {
    auto ts = tokenize("a<<=b&&c!=d->e");
    std::vector<std::string> got;
    for (auto& t : ts.tokens) got.push_back(t.text);
    CHECK(got == std::vector<std::string>{"a", "<<=", "b", "&&", "c", "!=", "d", "->", "e"});
}

TEST_CASE("lexemes fall back to whitespace splitting") {
    CHECK(lexemes("int a; // c") == std::vector<std::string>{"int", "a", ";"});
    CHECK(lexemes("x \"open") == std::vector<std::string>{"x", "\"open"});
}
