#include "stylo/ast.hpp"

namespace stylo {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::TranslationUnit: return "translation-unit";
        case NodeKind::Using: return "using-directive";
        case NodeKind::Typedef: return "typedef";
        case NodeKind::Function: return "function";
        case NodeKind::Param: return "parameter";
        case NodeKind::Block: return "block";
        case NodeKind::DeclStmt: return "declaration";
        case NodeKind::Declarator: return "declarator";
        case NodeKind::InitAssign: return "init-assign";
        case NodeKind::InitBrace: return "init-brace";
        case NodeKind::InitCall: return "init-call";
        case NodeKind::ExprStmt: return "expression-stmt";
        case NodeKind::If: return "if-stmt";
        case NodeKind::For: return "for-stmt";
        case NodeKind::While: return "while-stmt";
        case NodeKind::DoWhile: return "do-while-stmt";
        case NodeKind::Break: return "break-stmt";
        case NodeKind::Continue: return "continue-stmt";
        case NodeKind::Return: return "return-stmt";
        case NodeKind::Empty: return "empty";
        case NodeKind::Identifier: return "identifier";
        case NodeKind::IntLiteral: return "integer-literal";
        case NodeKind::FloatLiteral: return "float-literal";
        case NodeKind::StringLiteral: return "string-literal";
        case NodeKind::CharLiteral: return "char-literal";
        case NodeKind::BoolLiteral: return "bool-literal";
        case NodeKind::Paren: return "paren-expr";
        case NodeKind::Binary: return "binary-expr";
        case NodeKind::Assign: return "assign-expr";
        case NodeKind::Unary: return "unary-expr";
        case NodeKind::Postfix: return "postfix-expr";
        case NodeKind::Ternary: return "ternary-expr";
        case NodeKind::Index: return "index-expr";
        case NodeKind::Call: return "call-expr";
        case NodeKind::MemberCall: return "member-call-expr";
        case NodeKind::Cast: return "cast-expr";
    }
    return "unknown";
}

bool Node::is_statement() const {
    switch (kind) {
        case NodeKind::Block:
        case NodeKind::DeclStmt:
        case NodeKind::ExprStmt:
        case NodeKind::If:
        case NodeKind::For:
        case NodeKind::While:
        case NodeKind::DoWhile:
        case NodeKind::Break:
        case NodeKind::Continue:
        case NodeKind::Return:
            return true;
        case NodeKind::Empty:
            return token && token->text == ";";
        default:
            return false;
    }
}

bool Node::is_expression() const {
    return kind >= NodeKind::Identifier && kind <= NodeKind::Cast;
}

bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.text != b.text || a.type != b.type || a.rank != b.rank ||
        a.by_ref != b.by_ref || a.children.size() != b.children.size())
        return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    return true;
}

const Node* resolve(const Node& root, const NodePath& path) {
    const Node* n = &root;
    for (int idx : path) {
        if (idx < 0 || idx >= static_cast<int>(n->children.size())) return nullptr;
        n = &n->children[idx];
    }
    return n;
}

Node* resolve(Node& root, const NodePath& path) {
    return const_cast<Node*>(resolve(static_cast<const Node&>(root), path));
}

size_t count_nodes(const Node& node) {
    size_t n = 1;
    for (const auto& c : node.children) n += count_nodes(c);
    return n;
}

Token synth_token(TokenKind kind, std::string text) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    return t;
}

Node make_identifier(std::string name) {
    Node n(NodeKind::Identifier, name);
    n.token = synth_token(TokenKind::Identifier, std::move(name));
    return n;
}

Node make_int(long long value) {
    Node n(NodeKind::IntLiteral, std::to_string(value));
    n.token = synth_token(TokenKind::IntegerLiteral, n.text);
    return n;
}

Node make_string_literal(std::string_view decoded) {
    Node n(NodeKind::StringLiteral, encode_string_literal(decoded));
    n.token = synth_token(TokenKind::StringLiteral, n.text);
    return n;
}

Node make_binary(std::string op, Node lhs, Node rhs) {
    Node n(NodeKind::Binary, op);
    n.token = synth_token(TokenKind::Operator, std::move(op));
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
}

Node make_unary(std::string op, Node operand) {
    Node n(NodeKind::Unary, op);
    n.token = synth_token(TokenKind::Operator, std::move(op));
    n.children.push_back(std::move(operand));
    return n;
}

Node make_paren(Node inner) {
    Node n(NodeKind::Paren);
    n.token = synth_token(TokenKind::Punctuation, "(");
    n.children.push_back(std::move(inner));
    return n;
}

Node make_block(std::vector<Node> stmts) {
    Node n(NodeKind::Block);
    n.token = synth_token(TokenKind::Punctuation, "{");
    n.children = std::move(stmts);
    return n;
}

Node make_expr_stmt(Node expr) {
    Node n(NodeKind::ExprStmt);
    n.token = synth_token(TokenKind::Punctuation, ";");
    n.children.push_back(std::move(expr));
    return n;
}

Node make_empty() {
    Node n(NodeKind::Empty);
    n.token = synth_token(TokenKind::Punctuation, ";");
    return n;
}

std::string decode_literal(std::string_view lexeme) {
    std::string out;
    if (lexeme.size() < 2) return out;
    std::string_view body = lexeme.substr(1, lexeme.size() - 2);
    for (size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c != '\\' || i + 1 >= body.size()) {
            out += c;
            continue;
        }
        char e = body[++i];
        switch (e) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '0': out += '\0'; break;
            case 'a': out += '\a'; break;
            case 'b': out += '\b'; break;
            case 'f': out += '\f'; break;
            case 'v': out += '\v'; break;
            default: out += e; break;  // \\ \" \' \?
        }
    }
    return out;
}

std::string encode_string_literal(std::string_view decoded) {
    std::string out = "\"";
    for (char c : decoded) {
        switch (c) {
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '\0': out += "\\0"; break;
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

}  // namespace stylo
