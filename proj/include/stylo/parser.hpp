// Recursive-descent parser and canonical printer for the C++ subset.
#pragma once

#include <string>
#include <string_view>

#include "stylo/ast.hpp"
#include "stylo/error.hpp"
#include "stylo/lexer.hpp"

namespace stylo {

enum class SyntaxCategory {
    MissingSemicolonOrBrace,
    MalformedReturn,
    Other,
};

std::string_view to_string(SyntaxCategory c);

class SyntaxFailure : public Error {
public:
    SyntaxFailure(SyntaxCategory category, int line, int column, const std::string& what);
    SyntaxCategory category() const noexcept { return category_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    SyntaxCategory category_;
    int line_;
    int column_;
};

Ast parse(const TokenStream& tokens);

// tokenize + parse; lex errors surface as SyntaxFailure{Other}.
Ast parse_source(std::string_view source);

struct PrintOptions {
    std::string indent = "    ";
    bool emit_comments = true;
};

std::string print_source(const Ast& ast, const PrintOptions& options = {});
std::string print_expression(const Node& expr);

}  // namespace stylo
