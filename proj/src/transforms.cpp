#include "stylo/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "stylo/binder.hpp"
#include "stylo/error.hpp"
#include "stylo/interp.hpp"
#include "stylo/lexer.hpp"

namespace stylo {

// --- catalog ---------------------------------------------------------------------

const std::vector<TransformInfo>& transform_catalog() {
    static const std::vector<TransformInfo> catalog = {
        {TransformId::T1, "T1", "for-to-while", TransformFamily::ControlFlow, "rewrite a for loop as a while loop"},
        {TransformId::T2, "T2", "while-to-for", TransformFamily::ControlFlow, "rewrite a while loop as for(;cond;)"},
        {TransformId::T3, "T3", "printf-to-cout", TransformFamily::Api, "replace printf with a cout chain"},
        {TransformId::T4, "T4", "cout-to-printf", TransformFamily::Api, "replace a cout chain with printf"},
        {TransformId::T5, "T5", "rename-variable", TransformFamily::Layout,
         "rename a variable to camelCase, snake_case or a single letter"},
        {TransformId::T6, "T6", "split-declaration", TransformFamily::Declarations,
         "split a multi-variable declaration"},
        {TransformId::T7, "T7", "merge-declarations", TransformFamily::Declarations,
         "merge two adjacent declarations of one type"},
        {TransformId::T8, "T8", "update-form", TransformFamily::Expressions,
         "switch between x = x + k, x += k and x++"},
        {TransformId::T9, "T9", "swap-branches", TransformFamily::ControlFlow,
         "swap if/else branches under a negated condition"},
        {TransformId::T10, "T10", "toggle-braces", TransformFamily::Layout,
         "add or remove braces around a single-statement body"},
        {TransformId::T11, "T11", "long-long-typedef", TransformFamily::Declarations,
         "introduce or remove typedef long long ll"},
        {TransformId::T12, "T12", "declare-at-first-use", TransformFamily::Declarations,
         "move a declaration down to its first assignment"},
    };
    return catalog;
}

const TransformInfo& info(TransformId id) { return transform_catalog()[static_cast<size_t>(id) - 1]; }

std::string_view to_string(TransformFamily f) {
    switch (f) {
        case TransformFamily::ControlFlow: return "control-flow";
        case TransformFamily::Api: return "api";
        case TransformFamily::Declarations: return "declarations";
        case TransformFamily::Expressions: return "expressions";
        case TransformFamily::Layout: return "layout";
    }
    return "?";
}

TransformId transform_from_string(std::string_view code) {
    for (const auto& t : transform_catalog())
        if (t.code == code || t.name == code) return t.id;
    throw ConfigError("unknown transform: " + std::string(code));
}

std::string to_string(const TransformAction& a) {
    std::string s(info(a.transform).code);
    s += "@";
    for (size_t i = 0; i < a.site.path.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(a.site.path[i]);
    }
    if (!a.site.payload.empty()) s += ":" + a.site.payload;
    return s;
}

nlohmann::json to_json(const TransformAction& a) {
    return {{"transform", std::string(info(a.transform).code)}, {"path", a.site.path}, {"payload", a.site.payload}};
}

TransformAction action_from_json(const nlohmann::json& j) {
    TransformAction a;
    a.transform = transform_from_string(j.at("transform").get<std::string>());
    a.site.path = j.at("path").get<NodePath>();
    a.site.payload = j.value("payload", "");
    return a;
}

// --- naming -------------------------------------------------------------------------

std::vector<std::string> split_words(std::string_view name) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) words.push_back(cur);
        cur.clear();
    };
    for (size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '_') {
            flush();
            continue;
        }
        bool upper = std::isupper(static_cast<unsigned char>(c));
        bool digit = std::isdigit(static_cast<unsigned char>(c));
        if (!cur.empty()) {
            char p = name[i - 1];
            bool p_lower = std::islower(static_cast<unsigned char>(p));
            bool p_digit = std::isdigit(static_cast<unsigned char>(p));
            bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
            bool p_upper = std::isupper(static_cast<unsigned char>(p));
            if ((upper && (p_lower || p_digit)) || (upper && p_upper && next_lower) || (digit != p_digit))
                flush();
        }
        cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    flush();
    return words;
}

std::string apply_scheme(std::string_view name, NamingScheme scheme) {
    auto words = split_words(name);
    if (words.empty()) return std::string(name);
    std::string out;
    if (scheme == NamingScheme::Camel) {
        for (size_t i = 0; i < words.size(); ++i) {
            std::string w = words[i];
            if (i > 0 && !w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            out += w;
        }
        if (out == name) out += "Val";
    } else if (scheme == NamingScheme::Snake) {
        for (size_t i = 0; i < words.size(); ++i) out += (i ? "_" : "") + words[i];
        if (out == name) out += "_val";
    } else {
        out = std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(name[0]))));
    }
    if (!out.empty() && std::isdigit(static_cast<unsigned char>(out[0]))) out = "v" + out;
    return out;
}

namespace {

using NodeList = std::vector<Node>;

bool reserved_name(const std::string& n) {
    static const std::set<std::string> extra = {"main", "std", "string", "vector", "ll", "cin", "cout", "endl"};
    return is_keyword(n) || is_builtin_function(n) || is_builtin_identifier(n) || extra.count(n) > 0;
}

std::string fresh_name(std::string base, const std::set<std::string>& taken) {
    if (!taken.count(base) && !reserved_name(base)) return base;
    for (int k = 2;; ++k) {
        std::string c = base + std::to_string(k);
        if (!taken.count(c) && !reserved_name(c)) return c;
    }
}

std::set<std::string> taken_names(const Ast& ast) {
    auto v = all_names(ast);
    return {v.begin(), v.end()};
}

// --- expression helpers ------------------------------------------------------------

int binary_prec(const std::string& op) {
    static const std::map<std::string, int> p = {
        {"||", 3}, {"&&", 4}, {"|", 5},  {"^", 6},  {"&", 7},  {"==", 8}, {"!=", 8}, {"<", 9},  {"<=", 9},
        {">", 9},  {">=", 9}, {"<<", 10}, {">>", 10}, {"+", 11}, {"-", 11}, {"*", 12}, {"/", 12}, {"%", 12}};
    auto it = p.find(op);
    return it == p.end() ? 0 : it->second;
}

int prec(const Node& e) {
    switch (e.kind) {
        case NodeKind::Assign: return 1;
        case NodeKind::Ternary: return 2;
        case NodeKind::Binary: return binary_prec(e.text);
        case NodeKind::Unary:
        case NodeKind::Cast: return 13;
        case NodeKind::Postfix:
        case NodeKind::Index:
        case NodeKind::Call:
        case NodeKind::MemberCall: return 14;
        default: return 15;
    }
}

Node at_least(Node e, int level) {
    if (prec(e) < level) return make_paren(std::move(e));
    return e;
}

Node make_bool(bool v) {
    Node n(NodeKind::BoolLiteral, v ? "true" : "false");
    n.token = synth_token(TokenKind::Keyword, n.text);
    return n;
}

Node make_assign(std::string op, Node lhs, Node rhs) {
    Node n(NodeKind::Assign, op);
    n.token = synth_token(TokenKind::Operator, std::move(op));
    n.children.push_back(std::move(lhs));
    n.children.push_back(std::move(rhs));
    return n;
}

Node make_postfix(std::string op, Node operand) {
    Node n(NodeKind::Postfix, op);
    n.token = synth_token(TokenKind::Operator, std::move(op));
    n.children.push_back(std::move(operand));
    return n;
}

Node make_call(std::string name, NodeList args) {
    Node n(NodeKind::Call, name);
    n.token = synth_token(TokenKind::Identifier, std::move(name));
    n.children = std::move(args);
    return n;
}

Node make_member_call(Node object, std::string method) {
    Node n(NodeKind::MemberCall, method);
    n.token = synth_token(TokenKind::Identifier, std::move(method));
    n.children.push_back(std::move(object));
    return n;
}

Node make_keyword_stmt(NodeKind kind, const char* word) {
    Node n(kind);
    n.token = synth_token(TokenKind::Keyword, word);
    return n;
}

Node make_decl(const std::string& type, const std::string& name, std::optional<Node> init) {
    Node d(NodeKind::DeclStmt);
    d.type = type;
    d.token = synth_token(TokenKind::Keyword, type);
    Node v(NodeKind::Declarator, name);
    v.token = synth_token(TokenKind::Identifier, name);
    if (init) {
        Node i(NodeKind::InitAssign);
        i.token = synth_token(TokenKind::Operator, "=");
        i.children.push_back(std::move(*init));
        v.children.push_back(std::move(i));
    }
    d.children.push_back(std::move(v));
    return d;
}

bool is_int_one(const Node& e) { return e.kind == NodeKind::IntLiteral && e.text == "1"; }

bool mentions(const Node& n, const std::string& name) {
    if ((n.kind == NodeKind::Identifier || n.kind == NodeKind::Declarator || n.kind == NodeKind::Param) &&
        n.text == name)
        return true;
    for (const auto& c : n.children)
        if (mentions(c, name)) return true;
    return false;
}

bool is_loop(const Node& n) {
    return n.kind == NodeKind::For || n.kind == NodeKind::While || n.kind == NodeKind::DoWhile;
}

// Break/continue nodes that target the loop whose body is `n`.
bool has_loop_level(const Node& n, NodeKind kind) {
    if (n.kind == kind) return true;
    if (is_loop(n)) return false;
    for (const auto& c : n.children)
        if (has_loop_level(c, kind)) return true;
    return false;
}

void replace_loop_level_breaks(Node& n, const std::string& flag) {
    if (is_loop(n)) return;
    for (auto& c : n.children) {
        if (c.kind == NodeKind::Break) {
            auto comments = std::move(c.comments);
            c = make_block({make_expr_stmt(make_assign("=", make_identifier(flag), make_bool(true))),
                            make_keyword_stmt(NodeKind::Break, "break")});
            c.children[0].comments = std::move(comments);
        } else {
            replace_loop_level_breaks(c, flag);
        }
    }
}

bool simple_statement(const Node& n) {
    return n.kind == NodeKind::ExprStmt || n.kind == NodeKind::Return || n.kind == NodeKind::Break ||
           n.kind == NodeKind::Continue;
}

bool statement_container(const Node& n) { return n.kind == NodeKind::Block || n.kind == NodeKind::TranslationUnit; }

NodePath parent_path(const NodePath& p) { return NodePath(p.begin(), p.end() - 1); }

// Replaces the statement at `path` by `stmts`, splicing into a block or
// wrapping when the statement is a lone body.
void replace_statement(Node& root, const NodePath& path, NodeList stmts) {
    Node* parent = resolve(root, parent_path(path));
    size_t idx = static_cast<size_t>(path.back());
    if (statement_container(*parent)) {
        parent->children.erase(parent->children.begin() + static_cast<long>(idx));
        parent->children.insert(parent->children.begin() + static_cast<long>(idx),
                                std::make_move_iterator(stmts.begin()), std::make_move_iterator(stmts.end()));
    } else if (stmts.size() == 1) {
        parent->children[idx] = std::move(stmts[0]);
    } else {
        parent->children[idx] = make_block(std::move(stmts));
    }
}

// --- type strings -----------------------------------------------------------------

std::vector<std::string> type_words(const std::string& t) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : t) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':') {
            cur += c;
        } else {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
            if (c != ' ') out.push_back(std::string(1, c));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join_type(const std::vector<std::string>& words) {
    std::string s;
    for (size_t i = 0; i < words.size(); ++i) {
        bool word = std::isalnum(static_cast<unsigned char>(words[i][0])) || words[i][0] == '_';
        bool prev_word = i > 0 && (std::isalnum(static_cast<unsigned char>(words[i - 1][0])) || words[i - 1][0] == '_');
        if (word && prev_word) s += ' ';
        s += words[i];
    }
    return s;
}

std::string alias_long_long(const std::string& t, const std::string& alias) {
    auto w = type_words(t);
    std::vector<std::string> out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] == "long" && i + 1 < w.size() && w[i + 1] == "long") {
            out.push_back(alias);
            ++i;
        } else {
            out.push_back(w[i]);
        }
    }
    return join_type(out);
}

std::string expand_alias(const std::string& t, const std::string& alias) {
    auto w = type_words(t);
    std::vector<std::string> out;
    for (auto& x : w) {
        if (x == alias) {
            out.push_back("long");
            out.push_back("long");
        } else {
            out.push_back(x);
        }
    }
    return join_type(out);
}

bool has_long_long(const std::string& t) {
    auto w = type_words(t);
    for (size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] == "long" && w[i + 1] == "long") return true;
    return false;
}

bool carries_type(const Node& n) {
    switch (n.kind) {
        case NodeKind::DeclStmt:
        case NodeKind::Param:
        case NodeKind::Function:
        case NodeKind::Typedef:
        case NodeKind::Cast:
            return true;
        case NodeKind::Call:
            return !n.type.empty();
        default:
            return false;
    }
}

template <typename F>
void rewrite_types(Node& n, F&& f) {
    if (carries_type(n)) {
        n.type = f(n.type);
        if (n.kind == NodeKind::Call) n.text = n.type;
    }
    for (auto& c : n.children) rewrite_types(c, f);
}

template <typename F>
bool any_type(const Node& n, F&& pred) {
    if (carries_type(n) && pred(n.type)) return true;
    for (const auto& c : n.children)
        if (any_type(c, pred)) return true;
    return false;
}

// --- printf format handling ----------------------------------------------------------

struct FormatPiece {
    bool spec = false;
    std::string text;  // literal text, or the conversion with length ("d", "lld", "c", "s")
};

std::optional<std::vector<FormatPiece>> parse_format(const std::string& fmt) {
    std::vector<FormatPiece> out;
    std::string text;
    for (size_t i = 0; i < fmt.size(); ++i) {
        if (fmt[i] != '%') {
            text += fmt[i];
            continue;
        }
        if (i + 1 < fmt.size() && fmt[i + 1] == '%') {
            text += '%';
            ++i;
            continue;
        }
        std::string conv;
        size_t k = i + 1;
        while (k < fmt.size() && fmt[k] == 'l') conv += fmt[k++];
        if (k >= fmt.size()) return std::nullopt;
        conv += fmt[k];
        static const std::set<std::string> ok = {"d", "i", "ld", "lld", "li", "lli", "c", "s"};
        if (!ok.count(conv)) return std::nullopt;
        if (!text.empty()) out.push_back({false, text});
        text.clear();
        out.push_back({true, conv});
        i = k;
    }
    if (!text.empty()) out.push_back({false, text});
    return out;
}

std::string escape_percent(const std::string& s) {
    std::string o;
    for (char c : s) {
        o += c;
        if (c == '%') o += '%';
    }
    return o;
}

// Adds `#include <header>` after the last leading directive unless present.
void ensure_include(Node& root, const std::string& header) {
    std::string line = "#include <" + header + ">";
    for (const auto& n : root.children)
        for (const auto& c : n.comments)
            if (c == line) return;
    if (root.children.empty()) return;
    auto& cs = root.children[0].comments;
    size_t at = 0;
    for (size_t i = 0; i < cs.size(); ++i)
        if (!cs[i].empty() && cs[i][0] == '#') at = i + 1;
    cs.insert(cs.begin() + static_cast<long>(at), line);
}

bool has_using_std(const Ast& ast) {
    for (const auto& n : ast.root.children)
        if (n.kind == NodeKind::Using) return true;
    return false;
}

// --- the engine ------------------------------------------------------------------------

class Engine {
public:
    explicit Engine(const Ast& ast) : ast_(ast), b_(bind(ast)), taken_(taken_names(ast)) {}

    std::vector<TransformAction> enumerate() {
        out_.clear();
        rename_targets();
        if (t11_insert_ok()) add(TransformId::T11, {}, "insert");
        NodePath path;
        visit(ast_.root, path);
        return std::move(out_);
    }

    Ast apply(const TransformAction& a) {
        Ast res = ast_;
        const Node* target = resolve(ast_.root, a.site.path);
        if (!target) throw InapplicableAction("site does not resolve: " + to_string(a));
        switch (a.transform) {
            case TransformId::T1: t1(res, a.site.path); break;
            case TransformId::T2: t2(res, a.site.path); break;
            case TransformId::T3: t3(res, a.site.path); break;
            case TransformId::T4: t4(res, a.site.path); break;
            case TransformId::T5: t5(res, a.site.path, a.site.payload); break;
            case TransformId::T6: t6(res, a.site.path); break;
            case TransformId::T7: t7(res, a.site.path); break;
            case TransformId::T8: t8(res, a.site.path, a.site.payload); break;
            case TransformId::T9: t9(res, a.site.path); break;
            case TransformId::T10: t10(res, a.site.path, a.site.payload); break;
            case TransformId::T11: t11(res, a.site.path, a.site.payload); break;
            case TransformId::T12: t12(res, a.site.path); break;
        }
        return res;
    }

private:
    void add(TransformId id, const NodePath& p, std::string payload = {}) {
        out_.push_back({id, {p, std::move(payload)}});
    }

    StaticType type_at(const NodePath& p) const {
        const Node* e = resolve(ast_.root, p);
        return b_.type_of(ast_.root, *e, p);
    }

    // --- enumeration ---------------------------------------------------------------

    void visit(const Node& n, NodePath& p) {
        const Node* parent = p.empty() ? nullptr : resolve(ast_.root, parent_path(p));
        switch (n.kind) {
            case NodeKind::For: add(TransformId::T1, p); break;
            case NodeKind::While: add(TransformId::T2, p); break;
            case NodeKind::ExprStmt:
                if (t3_ok(n, p)) add(TransformId::T3, p);
                if (t4_ok(n, p)) add(TransformId::T4, p);
                break;
            case NodeKind::Declarator:
            case NodeKind::Param:
                if (auto it = rename_payloads_.find(p); it != rename_payloads_.end())
                    for (const auto& name : it->second) add(TransformId::T5, p, name);
                break;
            case NodeKind::DeclStmt:
                if (parent && statement_container(*parent)) {
                    if (n.children.size() >= 2) add(TransformId::T6, p);
                    size_t i = static_cast<size_t>(p.back());
                    if (i + 1 < parent->children.size()) {
                        const Node& next = parent->children[i + 1];
                        if (next.kind == NodeKind::DeclStmt && next.type == n.type) add(TransformId::T7, p);
                    }
                    if (parent->kind == NodeKind::Block && t12_ok(*parent, static_cast<size_t>(p.back())))
                        add(TransformId::T12, p);
                }
                break;
            case NodeKind::If:
                if (n.children.size() == 3) add(TransformId::T9, p);
                break;
            case NodeKind::Typedef:
                if (n.type == "long long" && t11_remove_ok(n)) add(TransformId::T11, p, "remove");
                break;
            default:
                break;
        }
        if (n.is_expression() && parent && update_position(*parent, p)) {
            for (const auto& form : t8_targets(n, p)) add(TransformId::T8, p, form);
        }
        if (parent && is_body_position(*parent, p.back())) {
            if (n.kind != NodeKind::Block)
                add(TransformId::T10, p, "add");
            else if (n.children.size() == 1 && simple_statement(n.children[0]))
                add(TransformId::T10, p, "remove");
        }
        for (int i = 0; i < static_cast<int>(n.children.size()); ++i) {
            p.push_back(i);
            visit(n.children[i], p);
            p.pop_back();
        }
    }

    static bool is_body_position(const Node& parent, int idx) {
        switch (parent.kind) {
            case NodeKind::If: return idx >= 1;
            case NodeKind::For: return idx == 3;
            case NodeKind::While: return idx == 1;
            case NodeKind::DoWhile: return idx == 0;
            default: return false;
        }
    }

    // --- T3 / T4 ---------------------------------------------------------------------

    bool t3_ok(const Node& stmt, const NodePath& p) const {
        const Node& call = stmt.children[0];
        if (call.kind != NodeKind::Call || strip_std(call.text) != "printf" || call.children.empty()) return false;
        if (call.children[0].kind != NodeKind::StringLiteral) return false;
        auto pieces = parse_format(decode_literal(call.children[0].text));
        if (!pieces || pieces->empty()) return false;
        size_t arg = 1;
        for (const auto& piece : *pieces) {
            if (!piece.spec) continue;
            if (arg >= call.children.size()) return false;
            NodePath ap = p;
            ap.push_back(0);
            ap.push_back(static_cast<int>(arg));
            StaticType t = type_at(ap);
            const std::string& c = piece.text;
            bool ok = c == "c"   ? (t.rank == 0 && t.base == "char")
                      : c == "s" ? (t.rank == 0 && t.base == "cstr")
                                 : (t.is_integral() && t.base != "char");
            if (!ok) return false;
            ++arg;
        }
        return arg == call.children.size();
    }

    void t3(Ast& res, const NodePath& p) {
        Node* stmt = resolve(res.root, p);
        const Node& call = stmt->children[0];
        auto pieces = *parse_format(decode_literal(call.children[0].text));
        bool qualified = !has_using_std(ast_);
        Node chain = make_identifier(qualified ? "std::cout" : "cout");
        size_t arg = 1;
        for (const auto& piece : pieces) {
            Node item;
            if (piece.spec)
                item = at_least(call.children[arg++], 11);
            else if (piece.text == "\n")
                item = make_identifier(qualified ? "std::endl" : "endl");
            else
                item = make_string_literal(piece.text);
            chain = make_binary("<<", std::move(chain), std::move(item));
        }
        stmt->children[0] = std::move(chain);
        ensure_include(res.root, "iostream");
    }

    bool t4_format(const Node& stmt, const NodePath& p, std::string* fmt, NodeList* args) const {
        std::vector<const Node*> items;
        if (!stream_chain(stmt.children[0], "cout", &items)) return false;
        // items[k] sits at path p.0 followed by (n-1-k) left steps and one right step
        std::string f;
        NodeList a;
        for (size_t k = 0; k < items.size(); ++k) {
            const Node& it = *items[k];
            if (it.kind == NodeKind::StringLiteral) {
                f += escape_percent(decode_literal(it.text));
                continue;
            }
            if (it.kind == NodeKind::CharLiteral) {
                f += escape_percent(decode_literal(it.text));
                continue;
            }
            if (it.kind == NodeKind::Identifier && strip_std(it.text) == "endl") {
                f += "\n";
                continue;
            }
            NodePath ip = p;
            ip.push_back(0);
            for (size_t s = 0; s + 1 < items.size() - k; ++s) ip.push_back(0);
            ip.push_back(1);
            StaticType t = type_at(ip);
            if (t.rank != 0) return false;
            if (t.base == "int" || t.base == "bool") {
                f += "%d";
                a.push_back(it);
            } else if (t.base == "long" || t.base == "long long") {
                f += "%lld";
                a.push_back(it);
            } else if (t.base == "char") {
                f += "%c";
                a.push_back(it);
            } else if (t.base == "string") {
                f += "%s";
                a.push_back(make_member_call(at_least(it, 14), "c_str"));
            } else if (t.base == "cstr") {
                f += "%s";
                a.push_back(it);
            } else {
                return false;
            }
        }
        if (fmt) *fmt = f;
        if (args) *args = std::move(a);
        return true;
    }

    bool t4_ok(const Node& stmt, const NodePath& p) const { return t4_format(stmt, p, nullptr, nullptr); }

    void t4(Ast& res, const NodePath& p) {
        std::string fmt;
        NodeList args;
        t4_format(*resolve(ast_.root, p), p, &fmt, &args);
        NodeList all;
        all.push_back(make_string_literal(fmt));
        for (auto& a : args) all.push_back(std::move(a));
        resolve(res.root, p)->children[0] = make_call("printf", std::move(all));
        ensure_include(res.root, "cstdio");
    }

    // --- T5 ----------------------------------------------------------------------------

    void rename_targets() {
        rename_payloads_.clear();
        int count = 0;
        for (const auto& d : b_.decls) {
            if (d.role == DeclRole::Function) continue;
            if (count++ >= kRenameVariableLimit) break;
            std::vector<std::string> names;
            for (auto scheme : {NamingScheme::Camel, NamingScheme::Snake, NamingScheme::SingleLetter}) {
                std::string n;
                if (scheme == NamingScheme::SingleLetter) {
                    n = single_letter(d.name);
                } else {
                    n = fresh_name(apply_scheme(d.name, scheme), taken_);
                }
                if (n.empty() || n == d.name) continue;
                if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
            }
            rename_payloads_[d.path] = names;
        }
    }

    std::string single_letter(const std::string& name) const {
        std::string first(1, static_cast<char>(std::tolower(static_cast<unsigned char>(name[0]))));
        if (std::isalpha(static_cast<unsigned char>(first[0])) && first != name && !taken_.count(first) &&
            !reserved_name(first))
            return first;
        for (char c = 'a'; c <= 'z'; ++c) {
            std::string s(1, c);
            if (s != name && !taken_.count(s) && !reserved_name(s)) return s;
        }
        return {};
    }

    void t5(Ast& res, const NodePath& p, const std::string& name) {
        int decl = -1;
        for (const auto& d : b_.decls)
            if (d.path == p) decl = d.id;
        if (decl < 0) throw InapplicableAction("no declaration at rename site");
        Node* dn = resolve(res.root, p);
        dn->text = name;
        if (dn->token) dn->token->text = name;
        for (const auto& use : b_.decls[static_cast<size_t>(decl)].uses) {
            Node* u = resolve(res.root, use);
            u->text = name;
            if (u->token) u->token->text = name;
        }
    }

    // --- T1 / T2 -------------------------------------------------------------------------

    void t1(Ast& res, const NodePath& p) {
        Node f = *resolve(res.root, p);
        Node& init = f.children[0];
        Node cond = f.children[1].kind == NodeKind::Empty ? make_bool(true) : f.children[1];
        Node& step = f.children[2];
        Node body = f.children[3];
        bool has_step = step.kind != NodeKind::Empty;

        NodeList stmts;
        if (has_step && has_loop_level(body, NodeKind::Continue)) {
            bool has_break = has_loop_level(body, NodeKind::Break);
            std::string flag;
            Node inner = body.kind == NodeKind::Block ? body : make_block({body});
            if (has_break) {
                flag = fresh_name("stop", taken_);
                replace_loop_level_breaks(inner, flag);
                stmts.push_back(make_decl("bool", flag, make_bool(false)));
            }
            Node d(NodeKind::DoWhile);
            d.token = synth_token(TokenKind::Keyword, "do");
            d.children.push_back(std::move(inner));
            d.children.push_back(make_bool(false));
            stmts.push_back(std::move(d));
            if (has_break) {
                Node test(NodeKind::If);
                test.token = synth_token(TokenKind::Keyword, "if");
                test.children.push_back(make_identifier(flag));
                test.children.push_back(make_keyword_stmt(NodeKind::Break, "break"));
                stmts.push_back(std::move(test));
            }
        } else if (body.kind == NodeKind::Block) {
            bool nest = false;
            if (has_step)
                for (const auto& s : body.children)
                    if (s.kind == NodeKind::DeclStmt)
                        for (const auto& d : s.children) nest |= mentions(step, d.text);
            if (nest)
                stmts.push_back(body);
            else
                stmts = body.children;
        } else {
            stmts.push_back(body);
        }
        if (has_step) stmts.push_back(make_expr_stmt(step));

        Node loop_body = make_block(std::move(stmts));
        if (body.kind == NodeKind::Block && !has_loop_level(body, NodeKind::Continue)) {
            loop_body.comments = body.comments;
            loop_body.trailing = body.trailing;
        }
        Node w(NodeKind::While);
        w.token = synth_token(TokenKind::Keyword, "while");
        w.children.push_back(std::move(cond));
        w.children.push_back(std::move(loop_body));

        NodeList out;
        if (init.kind == NodeKind::Empty) {
            out.push_back(std::move(w));
        } else if (init.kind == NodeKind::ExprStmt) {
            out.push_back(std::move(init));
            out.push_back(std::move(w));
        } else {
            out.push_back(make_block({std::move(init), std::move(w)}));
        }
        out.front().comments.insert(out.front().comments.begin(), f.comments.begin(), f.comments.end());
        replace_statement(res.root, p, std::move(out));
    }

    void t2(Ast& res, const NodePath& p) {
        Node* w = resolve(res.root, p);
        Node f(NodeKind::For);
        f.token = synth_token(TokenKind::Keyword, "for");
        f.comments = w->comments;
        Node init = make_empty();
        Node step(NodeKind::Empty);
        step.token = synth_token(TokenKind::Punctuation, ")");
        f.children.push_back(std::move(init));
        f.children.push_back(std::move(w->children[0]));
        f.children.push_back(std::move(step));
        f.children.push_back(std::move(w->children[1]));
        *w = std::move(f);
    }

    // --- T6 / T7 -------------------------------------------------------------------------

    void t6(Ast& res, const NodePath& p) {
        Node d = *resolve(res.root, p);
        NodeList out;
        for (auto& v : d.children) {
            Node one(NodeKind::DeclStmt);
            one.type = d.type;
            one.token = d.token;
            one.children.push_back(std::move(v));
            out.push_back(std::move(one));
        }
        out.front().comments = d.comments;
        replace_statement(res.root, p, std::move(out));
    }

    void t7(Ast& res, const NodePath& p) {
        Node* parent = resolve(res.root, parent_path(p));
        auto i = static_cast<size_t>(p.back());
        Node next = std::move(parent->children[i + 1]);
        parent->children.erase(parent->children.begin() + static_cast<long>(i + 1));
        Node& first = parent->children[i];
        first.comments.insert(first.comments.end(), next.comments.begin(), next.comments.end());
        for (auto& v : next.children) first.children.push_back(std::move(v));
    }

    // --- T8 ------------------------------------------------------------------------------

    static bool update_position(const Node& parent, const NodePath& p) {
        if (parent.kind == NodeKind::ExprStmt) return true;
        return parent.kind == NodeKind::For && p.back() == 2;
    }

    struct Update {
        std::string var;
        char op = '+';  // '+' or '-'
        const Node* amount = nullptr;  // null for ++/--
        std::string form;              // assign, compound, post, pre
    };

    static std::optional<Update> read_update(const Node& e) {
        Update u;
        if (e.kind == NodeKind::Assign && e.children[0].kind == NodeKind::Identifier) {
            u.var = e.children[0].text;
            if (e.text == "+=" || e.text == "-=") {
                u.op = e.text[0];
                u.amount = &e.children[1];
                u.form = "compound";
                return u;
            }
            const Node& rhs = e.children[1];
            if (e.text == "=" && rhs.kind == NodeKind::Binary && (rhs.text == "+" || rhs.text == "-") &&
                rhs.children[0].kind == NodeKind::Identifier && rhs.children[0].text == u.var) {
                u.op = rhs.text[0];
                u.amount = &rhs.children[1];
                u.form = "assign";
                return u;
            }
            return std::nullopt;
        }
        if ((e.kind == NodeKind::Postfix || e.kind == NodeKind::Unary) && (e.text == "++" || e.text == "--") &&
            e.children[0].kind == NodeKind::Identifier) {
            u.var = e.children[0].text;
            u.op = e.text[0];
            u.form = e.kind == NodeKind::Postfix ? "post" : "pre";
            return u;
        }
        return std::nullopt;
    }

    std::vector<std::string> t8_targets(const Node& e, const NodePath& p) const {
        auto u = read_update(e);
        if (!u) return {};
        NodePath vp = p;
        vp.push_back(0);
        StaticType t = type_at(vp);
        if (t.rank != 0 || !(t.base == "int" || t.base == "long" || t.base == "long long" || t.base == "char" ||
                             t.base == "double"))
            return {};
        if (u->form == "assign") {
            // the amount must not read the variable being updated after the rewrite changes evaluation order
            NodePath ap = p;
            ap.push_back(1);
            ap.push_back(1);
            StaticType at = type_at(ap);
            if (at.rank != 0 || !(at.is_integral() || at.is_floating())) return {};
        }
        if (u->form == "compound") {
            NodePath ap = p;
            ap.push_back(1);
            StaticType at = type_at(ap);
            if (at.rank != 0 || !(at.is_integral() || at.is_floating())) return {};
        }
        bool unit = !u->amount || is_int_one(*u->amount);
        std::vector<std::string> out;
        for (const char* f : {"assign", "compound", "post", "pre"}) {
            if (u->form == f) continue;
            if ((std::string(f) == "post" || std::string(f) == "pre") && !unit) continue;
            out.push_back(f);
        }
        return out;
    }

    void t8(Ast& res, const NodePath& p, const std::string& form) {
        Node* e = resolve(res.root, p);
        auto u = *read_update(*e);
        Node amount = u.amount ? *u.amount : make_int(1);
        std::string sop(1, u.op);
        Node repl;
        if (form == "assign") {
            repl = make_assign("=", make_identifier(u.var),
                               make_binary(sop, make_identifier(u.var), at_least(std::move(amount), 12)));
        } else if (form == "compound") {
            repl = make_assign(sop + "=", make_identifier(u.var), std::move(amount));
        } else if (form == "post") {
            repl = make_postfix(sop + sop, make_identifier(u.var));
        } else {
            repl = make_unary(sop + sop, make_identifier(u.var));
        }
        *e = std::move(repl);
    }

    // --- T9 ------------------------------------------------------------------------------

    void t9(Ast& res, const NodePath& p) {
        Node* n = resolve(res.root, p);
        Node cond = std::move(n->children[0]);
        Node neg;
        if (cond.kind == NodeKind::Unary && cond.text == "!") {
            neg = std::move(cond.children[0]);
            if (neg.kind == NodeKind::Paren) neg = Node(neg.children[0]);
        } else {
            neg = make_unary("!", at_least(std::move(cond), 14));
        }
        Node then_branch = std::move(n->children[1]);
        Node else_branch = std::move(n->children[2]);
        if (else_branch.kind != NodeKind::Block && !simple_statement(else_branch) &&
            else_branch.kind != NodeKind::Empty) {
            auto c = std::move(else_branch.comments);
            else_branch = make_block({std::move(else_branch)});
            else_branch.comments = std::move(c);
        }
        n->children[0] = std::move(neg);
        n->children[1] = std::move(else_branch);
        n->children[2] = std::move(then_branch);
    }

    // --- T10 -----------------------------------------------------------------------------

    void t10(Ast& res, const NodePath& p, const std::string& mode) {
        Node* body = resolve(res.root, p);
        if (mode == "add") {
            auto c = std::move(body->comments);
            Node b = make_block({std::move(*body)});
            b.comments = std::move(c);
            *body = std::move(b);
        } else {
            Node inner = std::move(body->children[0]);
            inner.comments.insert(inner.comments.begin(), body->comments.begin(), body->comments.end());
            inner.comments.insert(inner.comments.end(), body->trailing.begin(), body->trailing.end());
            *body = std::move(inner);
        }
    }

    // --- T11 -----------------------------------------------------------------------------

    bool t11_insert_ok() const {
        for (const auto& n : ast_.root.children)
            if (n.kind == NodeKind::Typedef && n.type == "long long") return false;
        if (taken_.count("ll")) return false;
        return any_type(ast_.root, [](const std::string& t) { return has_long_long(t); });
    }

    bool t11_remove_ok(const Node& td) const {
        // the alias must not appear in a type other typedefs could shadow; plain aliases only
        return !td.text.empty();
    }

    void t11(Ast& res, const NodePath& p, const std::string& mode) {
        Node& root = res.root;
        if (mode == "insert") {
            rewrite_types(root, [](const std::string& t) { return alias_long_long(t, "ll"); });
            Node td(NodeKind::Typedef, "ll");
            td.type = "long long";
            td.token = synth_token(TokenKind::Keyword, "typedef");
            size_t at = 0;
            while (at < root.children.size() && root.children[at].kind == NodeKind::Using) ++at;
            if (at == 0 && !root.children.empty()) {
                auto& cs = root.children[0].comments;
                size_t last = 0;
                for (size_t i = 0; i < cs.size(); ++i)
                    if (!cs[i].empty() && cs[i][0] == '#') last = i + 1;
                td.comments.assign(cs.begin(), cs.begin() + static_cast<long>(last));
                cs.erase(cs.begin(), cs.begin() + static_cast<long>(last));
            }
            root.children.insert(root.children.begin() + static_cast<long>(at), std::move(td));
        } else {
            auto idx = static_cast<size_t>(p.back());
            Node td = std::move(root.children[idx]);
            root.children.erase(root.children.begin() + static_cast<long>(idx));
            if (idx < root.children.size()) {
                auto& cs = root.children[idx].comments;
                cs.insert(cs.begin(), td.comments.begin(), td.comments.end());
            } else {
                root.trailing.insert(root.trailing.begin(), td.comments.begin(), td.comments.end());
            }
            std::string alias = td.text;
            rewrite_types(root, [&](const std::string& t) { return expand_alias(t, alias); });
        }
    }

    // --- T12 -----------------------------------------------------------------------------

    std::optional<size_t> t12_target(const Node& block, size_t i) const {
        const Node& d = block.children[i];
        if (d.children.size() != 1) return std::nullopt;
        const Node& v = d.children[0];
        if (v.rank != 0 || !v.children.empty()) return std::nullopt;
        for (size_t j = i + 1; j < block.children.size(); ++j) {
            const Node& s = block.children[j];
            if (!mentions(s, v.text)) continue;
            if (s.kind != NodeKind::ExprStmt) return std::nullopt;
            const Node& e = s.children[0];
            if (e.kind != NodeKind::Assign || e.text != "=" || e.children[0].kind != NodeKind::Identifier ||
                e.children[0].text != v.text || mentions(e.children[1], v.text))
                return std::nullopt;
            if (j == i + 1) return j;
            return j;
        }
        return std::nullopt;
    }

    bool t12_ok(const Node& block, size_t i) const { return t12_target(block, i).has_value(); }

    void t12(Ast& res, const NodePath& p) {
        Node* block = resolve(res.root, parent_path(p));
        auto i = static_cast<size_t>(p.back());
        size_t j = *t12_target(*block, i);
        Node decl = std::move(block->children[i]);
        Node& assign_stmt = block->children[j];
        Node moved = make_decl(decl.type, decl.children[0].text, assign_stmt.children[0].children[1]);
        moved.token = decl.token;
        moved.children[0].token = decl.children[0].token;
        moved.comments = decl.comments;
        moved.comments.insert(moved.comments.end(), assign_stmt.comments.begin(), assign_stmt.comments.end());
        assign_stmt = std::move(moved);
        block->children.erase(block->children.begin() + static_cast<long>(i));
    }

    const Ast& ast_;
    Bindings b_;
    std::set<std::string> taken_;
    std::map<NodePath, std::vector<std::string>> rename_payloads_;
    std::vector<TransformAction> out_;
};

}  // namespace

std::vector<TransformAction> enumerate_actions(const Ast& ast) { return Engine(ast).enumerate(); }

std::vector<TransformAction> enumerate_actions(const Ast& ast, TransformId only) {
    auto all = enumerate_actions(ast);
    std::vector<TransformAction> out;
    for (auto& a : all)
        if (a.transform == only) out.push_back(std::move(a));
    return out;
}

Ast apply(const Ast& ast, const TransformAction& action) {
    Engine e(ast);
    auto actions = e.enumerate();
    if (std::find(actions.begin(), actions.end(), action) == actions.end())
        throw InapplicableAction("action not applicable: " + to_string(action));
    return e.apply(action);
}

Ast apply_unchecked(const Ast& ast, const TransformAction& action) { return Engine(ast).apply(action); }

}  // namespace stylo
