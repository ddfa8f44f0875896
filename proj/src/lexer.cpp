#include "stylo/lexer.hpp"

#include <array>
#include <cctype>
#include <sstream>

namespace stylo {

namespace {

constexpr std::array kKeywords = {
    "auto",     "bool",   "break",    "case",     "char",   "class",    "const",   "continue",
    "default",  "delete", "do",       "double",   "else",   "enum",     "extern",  "false",
    "float",    "for",    "goto",     "if",       "inline", "int",      "long",    "namespace",
    "new",      "return", "short",    "signed",   "sizeof", "static",   "struct",  "switch",
    "template", "this",   "true",     "typedef",  "typename", "union",  "unsigned", "using",
    "void",     "while",
};

// Longest match first.
constexpr std::array kOperators = {
    "<<=", ">>=", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "==", "!=", "<=",
    ">=",  "&&",  "||", "<<", ">>", "->", "::", "+",  "-",  "*",  "/",  "%",  "=",  "<",  ">",
    "!",   "~",   "&",  "|",  "^",  "?",  ":",  ".",
};

constexpr std::string_view kPunctuation = "(){}[];,";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    TokenStream run() {
        TokenStream out;
        while (true) {
            std::string trivia = scan_trivia();
            if (pos_ >= src_.size()) {
                out.trailing = std::move(trivia);
                return out;
            }
            Token tok = scan_token();
            tok.leading = std::move(trivia);
            out.tokens.push_back(std::move(tok));
        }
    }

private:
    char peek(size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance(size_t n = 1) {
        for (size_t k = 0; k < n && pos_ < src_.size(); ++k) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    bool at_line_start() const {
        for (size_t k = pos_; k > 0; --k) {
            char c = src_[k - 1];
            if (c == '\n') return true;
            if (c != ' ' && c != '\t' && c != '\r') return false;
        }
        return true;
    }

    std::string snippet_at(size_t at) const {
        size_t end = src_.find('\n', at);
        if (end == std::string_view::npos) end = src_.size();
        return std::string(src_.substr(at, std::min<size_t>(end - at, 24)));
    }

    std::string scan_trivia() {
        size_t start = pos_;
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                int l = line_, col = col_;
                size_t at = pos_;
                advance(2);
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) throw LexError(l, col, snippet_at(at));
                advance(2);
            } else if (c == '#' && at_line_start()) {
                while (pos_ < src_.size() && peek() != '\n') {
                    if (peek() == '\\' && peek(1) == '\n') advance();
                    advance();
                }
            } else {
                break;
            }
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    Token scan_token() {
        Token tok;
        tok.line = line_;
        tok.column = col_;
        size_t start = pos_;
        char c = peek();
        if (ident_start(c)) {
            while (ident_char(peek())) advance();
            tok.text = std::string(src_.substr(start, pos_ - start));
            tok.kind = is_keyword(tok.text) ? TokenKind::Keyword : TokenKind::Identifier;
            return tok;
        }
        if (digit(c) || (c == '.' && digit(peek(1)))) {
            tok.kind = scan_number();
            tok.text = std::string(src_.substr(start, pos_ - start));
            return tok;
        }
        if (c == '"' || c == '\'') {
            char quote = c;
            advance();
            while (true) {
                char d = peek();
                if (pos_ >= src_.size() || d == '\n') throw LexError(tok.line, tok.column, snippet_at(start));
                if (d == '\\') {
                    advance(2);
                    continue;
                }
                advance();
                if (d == quote) break;
            }
            tok.kind = quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral;
            tok.text = std::string(src_.substr(start, pos_ - start));
            return tok;
        }
        if (kPunctuation.find(c) != std::string_view::npos) {
            advance();
            tok.kind = TokenKind::Punctuation;
            tok.text = std::string(1, c);
            return tok;
        }
        for (std::string_view op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                advance(op.size());
                tok.kind = TokenKind::Operator;
                tok.text = std::string(op);
                return tok;
            }
        }
        throw LexError(tok.line, tok.column, snippet_at(start));
    }

    TokenKind scan_number() {
        bool is_float = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            advance(2);
            while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
        } else {
            while (digit(peek())) advance();
            if (peek() == '.') {
                is_float = true;
                advance();
                while (digit(peek())) advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                char sign = peek(1);
                if (digit(sign) || ((sign == '+' || sign == '-') && digit(peek(2)))) {
                    is_float = true;
                    advance(2);
                    while (digit(peek())) advance();
                }
            }
        }
        while (std::isalpha(static_cast<unsigned char>(peek()))) advance();  // suffixes: LL, u, f
        return is_float ? TokenKind::FloatLiteral : TokenKind::IntegerLiteral;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::IntegerLiteral: return "integer-literal";
        case TokenKind::FloatLiteral: return "float-literal";
        case TokenKind::StringLiteral: return "string-literal";
        case TokenKind::CharLiteral: return "char-literal";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punctuation: return "punctuation";
    }
    return "unknown";
}

LexError::LexError(int line, int column, std::string snippet)
    : Error("lex error at " + std::to_string(line) + ":" + std::to_string(column) + " near '" +
            snippet + "'"),
      line_(line),
      column_(column),
      snippet_(std::move(snippet)) {}

bool is_keyword(std::string_view word) {
    for (std::string_view k : kKeywords)
        if (k == word) return true;
    return false;
}

TokenStream tokenize(std::string_view source) { return Lexer(source).run(); }

std::string reconstruct(const TokenStream& stream) {
    std::string out;
    for (const Token& t : stream.tokens) {
        out += t.leading;
        out += t.text;
    }
    out += stream.trailing;
    return out;
}

std::vector<std::string> trivia_items(std::string_view trivia) {
    std::vector<std::string> items;
    size_t i = 0;
    auto at_line_start = [&](size_t k) {
        while (k > 0) {
            char c = trivia[k - 1];
            if (c == '\n') return true;
            if (c != ' ' && c != '\t' && c != '\r') return false;
            --k;
        }
        return true;
    };
    while (i < trivia.size()) {
        if (trivia.compare(i, 2, "//") == 0) {
            size_t end = trivia.find('\n', i);
            if (end == std::string_view::npos) end = trivia.size();
            items.emplace_back(trivia.substr(i, end - i));
            i = end;
        } else if (trivia.compare(i, 2, "/*") == 0) {
            size_t end = trivia.find("*/", i + 2);
            end = end == std::string_view::npos ? trivia.size() : end + 2;
            items.emplace_back(trivia.substr(i, end - i));
            i = end;
        } else if (trivia[i] == '#' && at_line_start(i)) {
            size_t end = i;
            while (end < trivia.size() && trivia[end] != '\n') {
                if (trivia[end] == '\\' && end + 1 < trivia.size() && trivia[end + 1] == '\n') ++end;
                ++end;
            }
            items.emplace_back(trivia.substr(i, end - i));
            i = end;
        } else {
            ++i;
        }
    }
    for (auto& item : items)
        while (!item.empty() && (item.back() == '\r' || item.back() == ' ' || item.back() == '\t'))
            item.pop_back();
    return items;
}

std::vector<std::string> lexemes(std::string_view source) {
    std::vector<std::string> out;
    try {
        for (auto& t : tokenize(source).tokens) out.push_back(std::move(t.text));
    } catch (const LexError&) {
        out.clear();
        std::istringstream in{std::string(source)};
        for (std::string w; in >> w;) out.push_back(w);
    }
    return out;
}

}  // namespace stylo
