/**
 * Lossless lexer for the supported C++ subset.
 *
 * Every token keeps the raw text that precedes it (whitespace, comments and
 * preprocessor lines), so concatenating `leading + text` over the stream and
 * appending `trailing` reproduces the input byte for byte.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stylo/error.hpp"

namespace stylo {

enum class TokenKind {
    Identifier,
    Keyword,
    IntegerLiteral,
    FloatLiteral,
    StringLiteral,
    CharLiteral,
    Operator,
    Punctuation,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::Punctuation;
    std::string text;
    int line = 0;  // 1-based; 0 for tokens synthesized by transforms
    int column = 0;
    std::string leading;  // raw trivia before the token

    bool is(std::string_view s) const { return text == s; }
    bool is_keyword(std::string_view s) const { return kind == TokenKind::Keyword && text == s; }
};

struct TokenStream {
    std::vector<Token> tokens;
    std::string trailing;  // trivia after the last token
};

class LexError : public Error {
public:
    LexError(int line, int column, std::string snippet);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& snippet() const noexcept { return snippet_; }

private:
    int line_;
    int column_;
    std::string snippet_;
};

TokenStream tokenize(std::string_view source);

// Inverse of tokenize.
std::string reconstruct(const TokenStream& stream);

// Comments and preprocessor lines inside a trivia run, in order, trimmed.
std::vector<std::string> trivia_items(std::string_view trivia);

bool is_keyword(std::string_view word);

// Token lexemes with comments dropped; falls back to whitespace splitting when
// the text does not lex.
std::vector<std::string> lexemes(std::string_view source);

}  // namespace stylo
