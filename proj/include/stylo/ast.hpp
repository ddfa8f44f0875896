// Uniform parse tree for the supported C++ subset.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/lexer.hpp"

namespace stylo {

enum class NodeKind {
    TranslationUnit,
    Using,
    Typedef,
    Function,
    Param,
    Block,
    DeclStmt,
    Declarator,
    InitAssign,
    InitBrace,
    InitCall,
    ExprStmt,
    If,
    For,
    While,
    DoWhile,
    Break,
    Continue,
    Return,
    Empty,
    Identifier,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    CharLiteral,
    BoolLiteral,
    Paren,
    Binary,
    Assign,
    Unary,
    Postfix,
    Ternary,
    Index,
    Call,
    MemberCall,
    Cast,
};

inline constexpr int kNodeKindCount = static_cast<int>(NodeKind::Cast) + 1;

std::string_view to_string(NodeKind kind);

/*
 * Child layout per kind:
 *   Function     params..., Block body           text = name, type = return type
 *   Param        dims...                         text = name, rank, by_ref
 *   DeclStmt     Declarator...                   type = declared type
 *   Declarator   dims..., [Init*]                text = name, rank = number of dims
 *   For          init, cond, step, body          missing parts are Empty nodes
 *   If           cond, then, [else]
 *   While        cond, body
 *   DoWhile      body, cond
 *   Return       [expr]
 *   Call         args...                         text = callee or constructed type
 *   MemberCall   object, args...                 text = method name
 *   Cast         operand                         type = target type
 *   Binary, Assign, Unary, Postfix               text = operator
 */
struct Node {
    NodeKind kind = NodeKind::Empty;
    std::string text;
    std::string type;
    int rank = 0;
    bool by_ref = false;
    std::optional<Token> token;
    std::vector<std::string> comments;  // comments/directives printed before the node
    std::vector<std::string> trailing;  // Block/TranslationUnit: comments before the close
    std::vector<Node> children;

    Node() = default;
    Node(NodeKind k, std::string t = {}) : kind(k), text(std::move(t)) {}

    bool is_leaf() const { return children.empty(); }
    bool is_statement() const;
    bool is_expression() const;
    int line() const { return token ? token->line : 0; }
};

using NodePath = std::vector<int>;

struct Ast {
    Node root{NodeKind::TranslationUnit};
};

// Kind, text, type, rank, by_ref and children; tokens and comments are ignored.
bool structurally_equal(const Node& a, const Node& b);
inline bool structurally_equal(const Ast& a, const Ast& b) { return structurally_equal(a.root, b.root); }

const Node* resolve(const Node& root, const NodePath& path);
Node* resolve(Node& root, const NodePath& path);

// Pre-order visit with the path from `root`.
template <typename F>
void walk(const Node& node, F&& visit, NodePath& path) {
    visit(node, path);
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i) {
        path.push_back(i);
        walk(node.children[i], visit, path);
        path.pop_back();
    }
}

template <typename F>
void walk(const Node& node, F&& visit) {
    NodePath path;
    walk(node, visit, path);
}

size_t count_nodes(const Node& node);

// Synthesized helpers used by transforms and generators.
Token synth_token(TokenKind kind, std::string text);
Node make_identifier(std::string name);
Node make_int(long long value);
Node make_string_literal(std::string_view decoded);
Node make_binary(std::string op, Node lhs, Node rhs);
Node make_unary(std::string op, Node operand);
Node make_paren(Node inner);
Node make_block(std::vector<Node> stmts);
Node make_expr_stmt(Node expr);
Node make_empty();

// Escape-sequence handling for string and char literal lexemes.
std::string decode_literal(std::string_view lexeme);
std::string encode_string_literal(std::string_view decoded);

}  // namespace stylo
