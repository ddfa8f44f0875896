#include "stylo/parser.hpp"

#include <array>
#include <set>

namespace stylo {

std::string_view to_string(SyntaxCategory c) {
    switch (c) {
        case SyntaxCategory::MissingSemicolonOrBrace: return "missing-semicolon-or-brace";
        case SyntaxCategory::MalformedReturn: return "malformed-return";
        case SyntaxCategory::Other: return "other";
    }
    return "other";
}

SyntaxFailure::SyntaxFailure(SyntaxCategory category, int line, int column, const std::string& what)
    : Error(std::string(to_string(category)) + " at " + std::to_string(line) + ":" +
            std::to_string(column) + ": " + what),
      category_(category),
      line_(line),
      column_(column) {}

namespace {

const std::array<std::array<std::string_view, 4>, 10> kBinaryLevels = {{
    {"||"},
    {"&&"},
    {"|"},
    {"^"},
    {"&"},
    {"==", "!="},
    {"<", "<=", ">", ">="},
    {"<<", ">>"},
    {"+", "-"},
    {"*", "/", "%"},
}};

bool is_assign_op(std::string_view op) {
    static const std::set<std::string_view> ops = {"=",  "+=", "-=", "*=", "/=",  "%=",
                                                   "&=", "|=", "^=", "<<=", ">>="};
    return ops.count(op) > 0;
}

bool is_primitive_type_keyword(std::string_view w) {
    return w == "int" || w == "long" || w == "double" || w == "bool" || w == "char" || w == "void";
}

class Parser {
public:
    explicit Parser(const TokenStream& stream) : toks_(stream.tokens), trailing_(stream.trailing) {
        eof_.text = "";
        if (!toks_.empty()) {
            const Token& last = toks_.back();
            eof_.line = last.line;
            eof_.column = last.column + static_cast<int>(last.text.size());
        } else {
            eof_.line = eof_.column = 1;
        }
    }

    Ast run() {
        Ast ast;
        Node& unit = ast.root;
        while (!at_end()) {
            auto comments = claim_comments();
            Node item = parse_top_level();
            item.comments.insert(item.comments.begin(), comments.begin(), comments.end());
            unit.children.push_back(std::move(item));
        }
        unit.trailing = std::move(pending_);
        for (auto& c : trivia_items(trailing_)) unit.trailing.push_back(std::move(c));
        if (!toks_.empty()) unit.token = toks_.front();
        return ast;
    }

private:
    // --- token plumbing -------------------------------------------------

    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& cur() const { return at_end() ? eof_ : toks_[pos_]; }
    const Token& peek(size_t ahead) const {
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof_;
    }
    bool cur_is(std::string_view s) const { return !at_end() && toks_[pos_].text == s; }

    Token advance() {
        if (at_end()) fail(SyntaxCategory::Other, "unexpected end of input");
        if (pos_ != claimed_) {
            for (auto& c : trivia_items(toks_[pos_].leading)) pending_.push_back(std::move(c));
        }
        return toks_[pos_++];
    }

    std::vector<std::string> claim_comments() {
        std::vector<std::string> out = std::move(pending_);
        pending_.clear();
        if (!at_end() && pos_ != claimed_) {
            for (auto& c : trivia_items(toks_[pos_].leading)) out.push_back(std::move(c));
            claimed_ = pos_;
        }
        return out;
    }

    [[noreturn]] void fail(SyntaxCategory cat, const std::string& what) const {
        const Token& t = cur();
        std::string near = at_end() ? std::string("end of input") : "'" + t.text + "'";
        throw SyntaxFailure(cat, t.line, t.column, what + ", found " + near);
    }

    Token expect(std::string_view text, SyntaxCategory cat = SyntaxCategory::Other) {
        if (!cur_is(text)) fail(cat, "expected '" + std::string(text) + "'");
        return advance();
    }

    void expect_semicolon() { expect(";", SyntaxCategory::MissingSemicolonOrBrace); }

    Token expect_identifier() {
        if (at_end() || cur().kind != TokenKind::Identifier) fail(SyntaxCategory::Other, "expected identifier");
        return advance();
    }

    // --- types ----------------------------------------------------------

    bool is_type_start() const {
        if (at_end()) return false;
        const Token& t = cur();
        if (t.kind == TokenKind::Keyword) return is_primitive_type_keyword(t.text) || t.text == "const";
        if (t.kind != TokenKind::Identifier) return false;
        if (t.text == "std" && peek(1).text == "::")
            return peek(2).text == "string" || peek(2).text == "vector";
        if (t.text == "string") return peek(1).kind == TokenKind::Identifier;
        if (t.text == "vector") return peek(1).text == "<";
        return typedefs_.count(t.text) > 0 && peek(1).kind == TokenKind::Identifier;
    }

    void expect_close_angle() {
        if (cur_is(">>")) {
            // split '>>' closing two template argument lists
            toks_[pos_].text = ">";
            return;
        }
        expect(">");
    }

    std::string parse_type() {
        if (cur_is("const")) {
            advance();
            return "const " + parse_type();
        }
        if (cur_is("std") && peek(1).text == "::") {
            advance();
            advance();
        }
        if (at_end()) fail(SyntaxCategory::Other, "expected type");
        std::string w = cur().text;
        if (w == "long") {
            advance();
            std::string t = "long";
            if (cur_is("long")) {
                advance();
                t = "long long";
            }
            if (cur_is("int")) advance();
            return t;
        }
        if (is_primitive_type_keyword(w) || w == "string" || typedefs_.count(w)) {
            advance();
            return w;
        }
        if (w == "vector") {
            advance();
            expect("<");
            std::string inner = parse_type();
            expect_close_angle();
            return "vector<" + inner + ">";
        }
        fail(SyntaxCategory::Other, "unsupported type");
    }

    // --- top level ------------------------------------------------------

    Node parse_top_level() {
        const Token& t = cur();
        if (t.is_keyword("using")) {
            Node n(NodeKind::Using);
            advance();
            expect("namespace");
            Token name = expect_identifier();
            n.text = name.text;
            n.token = name;
            expect_semicolon();
            return n;
        }
        if (t.is_keyword("typedef")) return parse_typedef();
        if (t.is_keyword("return")) fail(SyntaxCategory::MalformedReturn, "return outside of a function");
        if (t.is("}")) fail(SyntaxCategory::MissingSemicolonOrBrace, "unbalanced '}'");
        if (!is_type_start()) fail(SyntaxCategory::Other, "expected declaration");
        Token first = cur();
        std::string type = parse_type();
        Token name = expect_identifier();
        if (cur_is("(")) return parse_function(type, name);
        Node decl = parse_declarators(type, first, &name);
        return decl;
    }

    Node parse_typedef() {
        Node n(NodeKind::Typedef);
        advance();
        n.type = parse_type();
        Token alias = expect_identifier();
        n.text = alias.text;
        n.token = alias;
        typedefs_.insert(alias.text);
        expect_semicolon();
        return n;
    }

    Node parse_function(const std::string& type, const Token& name) {
        Node fn(NodeKind::Function, name.text);
        fn.type = type;
        fn.token = name;
        expect("(");
        if (cur_is("void") && peek(1).text == ")") advance();
        if (!cur_is(")")) {
            while (true) {
                fn.children.push_back(parse_param());
                if (cur_is(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect(")");
        bool was_in_function = in_function_;
        in_function_ = true;
        fn.children.push_back(parse_block());
        in_function_ = was_in_function;
        return fn;
    }

    Node parse_param() {
        if (!is_type_start()) fail(SyntaxCategory::Other, "expected parameter type");
        Node p(NodeKind::Param);
        p.type = parse_type();
        if (cur_is("&")) {
            advance();
            p.by_ref = true;
        }
        Token name = expect_identifier();
        p.text = name.text;
        p.token = name;
        while (cur_is("[")) {
            Token open = advance();
            if (cur_is("]")) {
                Node e(NodeKind::Empty);
                e.token = open;
                p.children.push_back(std::move(e));
            } else {
                p.children.push_back(parse_expression());
            }
            expect("]");
            ++p.rank;
        }
        return p;
    }

    // --- declarations ---------------------------------------------------

    Node parse_declarators(const std::string& type, const Token& first, const Token* pre_name) {
        Node decl(NodeKind::DeclStmt);
        decl.type = type;
        decl.token = first;
        bool first_declarator = true;
        while (true) {
            Token name = (first_declarator && pre_name) ? *pre_name : expect_identifier();
            first_declarator = false;
            Node d(NodeKind::Declarator, name.text);
            d.token = name;
            while (cur_is("[")) {
                Token open = advance();
                if (cur_is("]")) {
                    Node e(NodeKind::Empty);
                    e.token = open;
                    d.children.push_back(std::move(e));
                } else {
                    d.children.push_back(parse_expression());
                }
                expect("]");
                ++d.rank;
            }
            if (cur_is("=")) {
                Token eq = advance();
                if (cur_is("{")) {
                    Node init(NodeKind::InitBrace);
                    init.token = advance();
                    parse_list(init.children, "}");
                    d.children.push_back(std::move(init));
                } else {
                    Node init(NodeKind::InitAssign);
                    init.token = eq;
                    init.children.push_back(parse_assignment());
                    d.children.push_back(std::move(init));
                }
            } else if (cur_is("(")) {
                Node init(NodeKind::InitCall);
                init.token = advance();
                parse_list(init.children, ")");
                d.children.push_back(std::move(init));
            }
            decl.children.push_back(std::move(d));
            if (cur_is(",")) {
                advance();
                continue;
            }
            if (cur_is(":")) fail(SyntaxCategory::Other, "range-based for is not supported");
            expect_semicolon();
            return decl;
        }
    }

    void parse_list(std::vector<Node>& out, std::string_view close) {
        if (!cur_is(close)) {
            while (true) {
                out.push_back(parse_assignment());
                if (cur_is(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect(close);
    }

    // --- statements -----------------------------------------------------

    Node parse_block() {
        if (!cur_is("{")) fail(SyntaxCategory::MissingSemicolonOrBrace, "expected '{'");
        Node block(NodeKind::Block);
        block.token = advance();
        while (!cur_is("}")) {
            if (at_end()) fail(SyntaxCategory::MissingSemicolonOrBrace, "missing '}'");
            block.children.push_back(parse_statement());
        }
        block.trailing = claim_comments();
        advance();
        return block;
    }

    Node parse_statement() {
        auto comments = claim_comments();
        Node s = parse_statement_inner();
        s.comments.insert(s.comments.begin(), comments.begin(), comments.end());
        return s;
    }

    Node parse_statement_inner() {
        if (at_end()) fail(SyntaxCategory::MissingSemicolonOrBrace, "missing '}'");
        const Token& t = cur();
        if (t.is("{")) return parse_block();
        if (t.is(";")) {
            Node n(NodeKind::Empty);
            n.token = advance();
            return n;
        }
        if (t.kind == TokenKind::Keyword) {
            const std::string& w = t.text;
            if (w == "if") return parse_if();
            if (w == "for") return parse_for();
            if (w == "while") {
                Node n(NodeKind::While);
                n.token = advance();
                expect("(");
                n.children.push_back(parse_expression());
                expect(")");
                n.children.push_back(parse_statement());
                return n;
            }
            if (w == "do") {
                Node n(NodeKind::DoWhile);
                n.token = advance();
                n.children.push_back(parse_statement());
                expect("while");
                expect("(");
                n.children.push_back(parse_expression());
                expect(")");
                expect_semicolon();
                return n;
            }
            if (w == "break" || w == "continue") {
                Node n(w == "break" ? NodeKind::Break : NodeKind::Continue);
                n.token = advance();
                expect_semicolon();
                return n;
            }
            if (w == "return") {
                Node n(NodeKind::Return);
                n.token = advance();
                if (!in_function_) fail(SyntaxCategory::MalformedReturn, "return outside of a function");
                if (!cur_is(";")) {
                    if (cur_is("}")) fail(SyntaxCategory::MissingSemicolonOrBrace, "expected ';'");
                    n.children.push_back(parse_expression());
                }
                expect_semicolon();
                return n;
            }
        }
        if (is_type_start()) {
            Token first = cur();
            std::string type = parse_type();
            return parse_declarators(type, first, nullptr);
        }
        if (t.kind == TokenKind::Keyword && !(t.text == "true" || t.text == "false"))
            fail(SyntaxCategory::Other, "unsupported construct");
        Node n(NodeKind::ExprStmt);
        n.token = t;
        n.children.push_back(parse_expression());
        expect_semicolon();
        return n;
    }

    Node parse_if() {
        Node n(NodeKind::If);
        n.token = advance();
        expect("(");
        n.children.push_back(parse_expression());
        expect(")");
        n.children.push_back(parse_statement());
        if (cur_is("else")) {
            advance();
            n.children.push_back(parse_statement());
        }
        return n;
    }

    Node parse_for() {
        Node n(NodeKind::For);
        n.token = advance();
        expect("(");
        // init
        if (cur_is(";")) {
            Node e(NodeKind::Empty);
            e.token = advance();
            n.children.push_back(std::move(e));
        } else if (is_type_start()) {
            Token first = cur();
            std::string type = parse_type();
            n.children.push_back(parse_declarators(type, first, nullptr));
        } else {
            Node s(NodeKind::ExprStmt);
            s.token = cur();
            s.children.push_back(parse_expression());
            expect_semicolon();
            n.children.push_back(std::move(s));
        }
        // condition
        if (cur_is(";")) {
            Node e(NodeKind::Empty);
            e.token = cur();
            n.children.push_back(std::move(e));
        } else {
            n.children.push_back(parse_expression());
        }
        expect_semicolon();
        // step
        if (cur_is(")")) {
            Node e(NodeKind::Empty);
            e.token = cur();
            n.children.push_back(std::move(e));
        } else {
            n.children.push_back(parse_expression());
        }
        expect(")");
        n.children.push_back(parse_statement());
        return n;
    }

    // --- expressions ----------------------------------------------------

    Node parse_expression() { return parse_assignment(); }

    Node parse_assignment() {
        Node lhs = parse_ternary();
        if (!at_end() && cur().kind == TokenKind::Operator && is_assign_op(cur().text)) {
            Token op = advance();
            Node n(NodeKind::Assign, op.text);
            n.token = op;
            n.children.push_back(std::move(lhs));
            n.children.push_back(parse_assignment());
            return n;
        }
        return lhs;
    }

    Node parse_ternary() {
        Node cond = parse_binary(0);
        if (!cur_is("?")) return cond;
        Node n(NodeKind::Ternary);
        n.token = advance();
        n.children.push_back(std::move(cond));
        n.children.push_back(parse_assignment());
        expect(":");
        n.children.push_back(parse_assignment());
        return n;
    }

    bool at_level_op(size_t level) const {
        if (at_end() || cur().kind != TokenKind::Operator) return false;
        for (std::string_view op : kBinaryLevels[level])
            if (!op.empty() && cur().text == op) return true;
        return false;
    }

    Node parse_binary(size_t level) {
        if (level >= kBinaryLevels.size()) return parse_unary();
        Node lhs = parse_binary(level + 1);
        while (at_level_op(level)) {
            Token op = advance();
            Node n(NodeKind::Binary, op.text);
            n.token = op;
            n.children.push_back(std::move(lhs));
            n.children.push_back(parse_binary(level + 1));
            lhs = std::move(n);
        }
        return lhs;
    }

    Node parse_unary() {
        if (!at_end() && cur().kind == TokenKind::Operator) {
            const std::string& op = cur().text;
            if (op == "+" || op == "-" || op == "!" || op == "~" || op == "++" || op == "--" || op == "&") {
                Token t = advance();
                Node n(NodeKind::Unary, t.text);
                n.token = t;
                n.children.push_back(parse_unary());
                return n;
            }
        }
        if (at_cast()) {
            Node n(NodeKind::Cast);
            n.token = advance();
            n.type = parse_type();
            expect(")");
            n.children.push_back(parse_unary());
            return n;
        }
        return parse_postfix();
    }

    bool at_cast() const {
        if (!cur_is("(")) return false;
        const Token& t = peek(1);
        if (t.kind == TokenKind::Keyword) return is_primitive_type_keyword(t.text) && t.text != "void";
        return t.kind == TokenKind::Identifier && typedefs_.count(t.text) && peek(2).text == ")";
    }

    Node parse_postfix() {
        Node e = parse_primary();
        while (!at_end()) {
            if (cur_is("[")) {
                Node n(NodeKind::Index);
                n.token = advance();
                n.children.push_back(std::move(e));
                n.children.push_back(parse_expression());
                expect("]");
                e = std::move(n);
            } else if (cur_is(".")) {
                advance();
                Token method = expect_identifier();
                Node n(NodeKind::MemberCall, method.text);
                n.token = method;
                n.children.push_back(std::move(e));
                expect("(");
                parse_list(n.children, ")");
                e = std::move(n);
            } else if (cur_is("++") || cur_is("--")) {
                Token t = advance();
                Node n(NodeKind::Postfix, t.text);
                n.token = t;
                n.children.push_back(std::move(e));
                e = std::move(n);
            } else {
                break;
            }
        }
        return e;
    }

    bool at_type_constructor() const {
        if (at_end()) return false;
        const Token& t = cur();
        if (t.kind == TokenKind::Keyword && is_primitive_type_keyword(t.text) && t.text != "void")
            return t.text == "long" ? true : peek(1).text == "(";
        if (t.kind != TokenKind::Identifier) return false;
        if (t.text == "vector") return peek(1).text == "<";
        if (t.text == "std" && peek(1).text == "::")
            return (peek(2).text == "vector" && peek(3).text == "<") ||
                   (peek(2).text == "string" && peek(3).text == "(");
        if (t.text == "string" || typedefs_.count(t.text)) return peek(1).text == "(";
        return false;
    }

    Node parse_primary() {
        if (at_end()) fail(SyntaxCategory::Other, "expected expression");
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::IntegerLiteral: {
                Node n(NodeKind::IntLiteral, t.text);
                n.token = advance();
                return n;
            }
            case TokenKind::FloatLiteral: {
                Node n(NodeKind::FloatLiteral, t.text);
                n.token = advance();
                return n;
            }
            case TokenKind::StringLiteral: {
                Node n(NodeKind::StringLiteral, t.text);
                n.token = advance();
                return n;
            }
            case TokenKind::CharLiteral: {
                Node n(NodeKind::CharLiteral, t.text);
                n.token = advance();
                return n;
            }
            default: break;
        }
        if (t.is_keyword("true") || t.is_keyword("false")) {
            Node n(NodeKind::BoolLiteral, t.text);
            n.token = advance();
            return n;
        }
        if (at_type_constructor()) {
            Token first = cur();
            std::string type = parse_type();
            Node n(NodeKind::Call, type);
            n.type = type;
            n.token = first;
            expect("(");
            parse_list(n.children, ")");
            return n;
        }
        if (t.is("(")) {
            Node n(NodeKind::Paren);
            n.token = advance();
            n.children.push_back(parse_expression());
            expect(")");
            return n;
        }
        if (t.kind == TokenKind::Identifier) {
            Token id = advance();
            std::string name = id.text;
            if (name == "std" && cur_is("::")) {
                advance();
                Token rest = expect_identifier();
                name += "::" + rest.text;
            }
            if (cur_is("(")) {
                Node n(NodeKind::Call, name);
                n.token = id;
                advance();
                parse_list(n.children, ")");
                return n;
            }
            Node n(NodeKind::Identifier, name);
            id.text = name;
            n.token = id;
            return n;
        }
        fail(SyntaxCategory::Other, "expected expression");
    }

    std::vector<Token> toks_;
    std::string trailing_;
    Token eof_;
    size_t pos_ = 0;
    size_t claimed_ = static_cast<size_t>(-1);
    std::vector<std::string> pending_;
    std::set<std::string> typedefs_;
    bool in_function_ = false;
};

}  // namespace

Ast parse(const TokenStream& tokens) { return Parser(tokens).run(); }

Ast parse_source(std::string_view source) {
    TokenStream tokens;
    try {
        tokens = tokenize(source);
    } catch (const LexError& e) {
        throw SyntaxFailure(SyntaxCategory::Other, e.line(), e.column(), e.what());
    }
    return parse(tokens);
}

}  // namespace stylo
