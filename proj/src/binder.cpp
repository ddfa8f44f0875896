#include "stylo/binder.hpp"

#include <set>

namespace stylo {

std::string_view to_string(BindErrorKind kind) {
    switch (kind) {
        case BindErrorKind::UndeclaredVariable: return "undeclared-variable";
        case BindErrorKind::RedeclaredVariable: return "redeclared-variable";
        case BindErrorKind::ReturnStatement: return "return-statement";
        case BindErrorKind::Other: return "other";
    }
    return "other";
}

BindError::BindError(BindErrorKind kind, std::string name, int line, int column, const std::string& what)
    : Error(std::string(to_string(kind)) + " at " + std::to_string(line) + ":" + std::to_string(column) +
            ": " + what),
      kind_(kind),
      name_(std::move(name)),
      line_(line),
      column_(column) {}

bool StaticType::is_integral() const {
    return rank == 0 && (base == "int" || base == "long" || base == "long long" || base == "bool" ||
                         base == "char");
}

std::string strip_std(std::string_view name) {
    if (name.substr(0, 5) == "std::") name.remove_prefix(5);
    return std::string(name);
}

bool is_builtin_function(std::string_view name) {
    static const std::set<std::string, std::less<>> fns = {"min", "max",    "abs",   "swap",
                                                           "sqrt", "printf", "scanf"};
    return fns.count(strip_std(name)) > 0;
}

bool is_builtin_identifier(std::string_view name) {
    std::string n = strip_std(name);
    return n == "cin" || n == "cout" || n == "endl";
}

namespace {

const std::set<std::string> kMethods = {"push_back", "pop_back", "size",  "length",
                                        "substr",    "c_str",    "empty", "back"};

bool is_known_base(const std::string& t) {
    return t == "int" || t == "long" || t == "long long" || t == "double" || t == "bool" ||
           t == "char" || t == "string" || t == "void";
}

StaticType promote(const StaticType& a, const StaticType& b) {
    if (a.is_floating() || b.is_floating()) return {"double", 0};
    if (a.base == "string" || b.base == "string") return {"string", 0};
    if (a.base == "long long" || b.base == "long long") return {"long long", 0};
    if (a.base == "long" || b.base == "long") return {"long", 0};
    if (a.is_integral() && b.is_integral()) return {"int", 0};
    return {"unknown", 0};
}

StaticType promote1(const StaticType& a) {
    if (a.base == "bool" || a.base == "char") return {"int", 0};
    return a;
}

class Binder {
public:
    explicit Binder(const Ast& ast) : ast_(ast) {}

    Bindings run() {
        push_scope();
        NodePath path;
        const Node& root = ast_.root;
        for (int i = 0; i < static_cast<int>(root.children.size()); ++i) {
            path.push_back(i);
            top_level(root.children[i], path);
            path.pop_back();
        }
        pop_scope();
        return std::move(out_);
    }

private:
    [[noreturn]] void error(BindErrorKind kind, const Node& at, const std::string& name,
                            const std::string& what) {
        int line = at.token ? at.token->line : 0;
        int col = at.token ? at.token->column : 0;
        throw BindError(kind, name, line, col, what);
    }

    void push_scope() {
        scopes_.push_back({});
        scope_ids_.push_back(next_scope_++);
    }
    void pop_scope() {
        scopes_.pop_back();
        scope_ids_.pop_back();
    }

    std::optional<int> lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        return std::nullopt;
    }

    std::string resolve_type(const Node& at, const std::string& written) {
        std::string t = out_.resolve_type(written);
        std::string inner = t;
        while (inner.rfind("vector<", 0) == 0) inner = inner.substr(7, inner.size() - 8);
        if (!is_known_base(inner)) error(BindErrorKind::Other, at, written, "unknown type '" + written + "'");
        return t;
    }

    int declare(const Node& node, const NodePath& path, const std::string& name,
                const std::string& written_type, int rank, DeclRole role) {
        auto& scope = scopes_.back();
        if (scope.count(name)) error(BindErrorKind::RedeclaredVariable, node, name, "redeclaration of '" + name + "'");
        if (is_builtin_function(name) || is_builtin_identifier(name) || (name == "main" && role != DeclRole::Function))
            error(BindErrorKind::RedeclaredVariable, node, name, "'" + name + "' shadows a builtin");
        Declaration d;
        d.id = static_cast<int>(out_.decls.size());
        d.name = name;
        d.written_type = written_type;
        d.type = {role == DeclRole::Function ? written_type : resolve_type(node, written_type), rank};
        if (role == DeclRole::Function) d.type.base = out_.resolve_type(written_type);
        d.role = role;
        d.by_ref = node.by_ref;
        d.path = path;
        d.scope = scope_ids_.back();
        d.function = current_function_;
        scope[name] = d.id;
        out_.decls.push_back(std::move(d));
        return out_.decls.back().id;
    }

    void top_level(const Node& n, NodePath& path) {
        switch (n.kind) {
            case NodeKind::Using:
                break;
            case NodeKind::Typedef: {
                if (scopes_.front().count(n.text) || out_.typedefs.count(n.text))
                    error(BindErrorKind::RedeclaredVariable, n, n.text, "redeclaration of '" + n.text + "'");
                out_.typedefs[n.text] = resolve_type(n, n.type);
                break;
            }
            case NodeKind::DeclStmt:
                declaration(n, path, DeclRole::Global);
                break;
            case NodeKind::Function:
                function(n, path);
                break;
            default:
                error(BindErrorKind::Other, n, "", "unexpected top-level construct");
        }
    }

    void function(const Node& fn, NodePath& path) {
        resolve_type(fn, fn.type);
        int id = declare(fn, path, fn.text, fn.type, 0, DeclRole::Function);
        out_.functions[fn.text] = id;
        int saved = current_function_;
        current_function_ = id;
        return_type_ = out_.resolve_type(fn.type);
        push_scope();
        int nparams = static_cast<int>(fn.children.size()) - 1;
        for (int i = 0; i < nparams; ++i) {
            const Node& p = fn.children[i];
            path.push_back(i);
            for (int k = 0; k < static_cast<int>(p.children.size()); ++k) {
                path.push_back(k);
                expression(p.children[k], path);
                path.pop_back();
            }
            declare(p, path, p.text, p.type, p.rank, DeclRole::Param);
            path.pop_back();
        }
        path.push_back(nparams);
        statements(fn.children.back(), path);  // body shares the parameter scope
        path.pop_back();
        pop_scope();
        current_function_ = saved;
    }

    void declaration(const Node& decl, NodePath& path, DeclRole role) {
        for (int i = 0; i < static_cast<int>(decl.children.size()); ++i) {
            const Node& d = decl.children[i];
            path.push_back(i);
            for (int k = 0; k < d.rank; ++k) {
                path.push_back(k);
                expression(d.children[k], path);
                path.pop_back();
            }
            declare(d, path, d.text, decl.type, d.rank, role);
            if (static_cast<int>(d.children.size()) > d.rank) {
                int k = static_cast<int>(d.children.size()) - 1;
                path.push_back(k);
                const Node& init = d.children[k];
                for (int j = 0; j < static_cast<int>(init.children.size()); ++j) {
                    path.push_back(j);
                    expression(init.children[j], path);
                    path.pop_back();
                }
                path.pop_back();
            }
            path.pop_back();
        }
    }

    void statements(const Node& block, NodePath& path) {
        for (int i = 0; i < static_cast<int>(block.children.size()); ++i) {
            path.push_back(i);
            statement(block.children[i], path);
            path.pop_back();
        }
    }

    void child_statement(const Node& n, int index, NodePath& path) {
        path.push_back(index);
        push_scope();
        if (n.children[index].kind == NodeKind::Block)
            statements(n.children[index], path);
        else
            statement(n.children[index], path);
        pop_scope();
        path.pop_back();
    }

    void child_expression(const Node& n, int index, NodePath& path) {
        path.push_back(index);
        expression(n.children[index], path);
        path.pop_back();
    }

    void statement(const Node& n, NodePath& path) {
        switch (n.kind) {
            case NodeKind::Block:
                push_scope();
                statements(n, path);
                pop_scope();
                break;
            case NodeKind::DeclStmt:
                declaration(n, path, DeclRole::Local);
                break;
            case NodeKind::ExprStmt:
                child_expression(n, 0, path);
                break;
            case NodeKind::If:
                child_expression(n, 0, path);
                child_statement(n, 1, path);
                if (n.children.size() > 2) child_statement(n, 2, path);
                break;
            case NodeKind::For:
                push_scope();
                path.push_back(0);
                if (n.children[0].kind != NodeKind::Empty) statement(n.children[0], path);
                path.pop_back();
                if (n.children[1].kind != NodeKind::Empty) child_expression(n, 1, path);
                if (n.children[2].kind != NodeKind::Empty) child_expression(n, 2, path);
                ++loop_depth_;
                child_statement(n, 3, path);
                --loop_depth_;
                pop_scope();
                break;
            case NodeKind::While:
                child_expression(n, 0, path);
                ++loop_depth_;
                child_statement(n, 1, path);
                --loop_depth_;
                break;
            case NodeKind::DoWhile:
                ++loop_depth_;
                child_statement(n, 0, path);
                --loop_depth_;
                child_expression(n, 1, path);
                break;
            case NodeKind::Break:
            case NodeKind::Continue:
                if (loop_depth_ == 0) error(BindErrorKind::Other, n, "", "break/continue outside of a loop");
                break;
            case NodeKind::Return:
                if (return_type_ == "void" && !n.children.empty())
                    error(BindErrorKind::ReturnStatement, n, "", "void function returns a value");
                if (return_type_ != "void" && n.children.empty())
                    error(BindErrorKind::ReturnStatement, n, "", "non-void function returns no value");
                if (!n.children.empty()) child_expression(n, 0, path);
                break;
            case NodeKind::Empty:
                break;
            default:
                error(BindErrorKind::Other, n, "", "unexpected statement");
        }
    }

    void expression(const Node& n, NodePath& path) {
        switch (n.kind) {
            case NodeKind::Identifier: {
                std::string name = strip_std(n.text);
                if (auto id = lookup(n.text)) {
                    if (out_.decls[*id].role == DeclRole::Function)
                        error(BindErrorKind::Other, n, n.text, "function used as a value");
                    out_.decls[*id].uses.push_back(path);
                    out_.use_decl[path] = *id;
                    return;
                }
                if (is_builtin_identifier(name)) return;
                error(BindErrorKind::UndeclaredVariable, n, n.text, "'" + n.text + "' was not declared");
            }
            case NodeKind::Call: {
                if (!n.type.empty()) {
                    resolve_type(n, n.type);
                } else if (auto id = lookup(n.text)) {
                    const Declaration& d = out_.decls[*id];
                    if (d.role != DeclRole::Function)
                        error(BindErrorKind::Other, n, n.text, "'" + n.text + "' is not a function");
                    const Node* fn = resolve(ast_.root, d.path);
                    if (fn->children.size() - 1 != n.children.size())
                        error(BindErrorKind::Other, n, n.text, "wrong number of arguments");
                } else if (is_builtin_function(n.text)) {
                    std::string name = strip_std(n.text);
                    size_t argc = n.children.size();
                    bool ok = (name == "min" || name == "max" || name == "swap") ? argc == 2
                              : (name == "abs" || name == "sqrt")                  ? argc == 1
                                                                                   : argc >= 1;
                    if (!ok) error(BindErrorKind::Other, n, n.text, "wrong number of arguments");
                    if (name == "scanf" || name == "printf") {
                        if (n.children[0].kind != NodeKind::StringLiteral)
                            error(BindErrorKind::Other, n, n.text, "format must be a string literal");
                    }
                    if (name == "scanf") {
                        for (size_t i = 1; i < argc; ++i) {
                            const Node& a = n.children[i];
                            if (!(a.kind == NodeKind::Unary && a.text == "&"))
                                error(BindErrorKind::Other, a, "", "scanf argument must be &lvalue");
                            path.push_back(static_cast<int>(i));
                            child_expression(a, 0, path);
                            path.pop_back();
                        }
                        child_expression(n, 0, path);
                        return;
                    }
                } else {
                    error(BindErrorKind::UndeclaredVariable, n, n.text, "'" + n.text + "' was not declared");
                }
                break;
            }
            case NodeKind::MemberCall:
                if (!kMethods.count(n.text)) error(BindErrorKind::Other, n, n.text, "unsupported method");
                break;
            case NodeKind::Cast:
                resolve_type(n, n.type);
                break;
            case NodeKind::Unary:
                if (n.text == "&") error(BindErrorKind::Other, n, "", "address-of outside scanf");
                break;
            default:
                break;
        }
        for (int i = 0; i < static_cast<int>(n.children.size()); ++i) child_expression(n, i, path);
    }

    const Ast& ast_;
    Bindings out_;
    std::vector<std::map<std::string, int>> scopes_;
    std::vector<int> scope_ids_;
    int next_scope_ = 0;
    int current_function_ = -1;
    int loop_depth_ = 0;
    std::string return_type_ = "void";
};

}  // namespace

std::optional<int> Bindings::decl_of(const NodePath& identifier_path) const {
    auto it = use_decl.find(identifier_path);
    if (it == use_decl.end()) return std::nullopt;
    return it->second;
}

std::vector<const Declaration*> Bindings::variables() const {
    std::vector<const Declaration*> out;
    for (const auto& d : decls)
        if (d.role != DeclRole::Function) out.push_back(&d);
    return out;
}

std::string Bindings::resolve_type(const std::string& written) const {
    if (written.rfind("const ", 0) == 0) return resolve_type(written.substr(6));
    if (written.rfind("vector<", 0) == 0 && written.back() == '>')
        return "vector<" + resolve_type(written.substr(7, written.size() - 8)) + ">";
    auto it = typedefs.find(written);
    return it == typedefs.end() ? written : it->second;
}

StaticType Bindings::type_of(const Node& root, const Node& e, const NodePath& path) const {
    auto child = [&](int i) {
        NodePath p = path;
        p.push_back(i);
        return type_of(root, e.children[i], p);
    };
    switch (e.kind) {
        case NodeKind::IntLiteral: {
            bool ll = e.text.find("ll") != std::string::npos || e.text.find("LL") != std::string::npos;
            return {ll ? "long long" : "int", 0};
        }
        case NodeKind::FloatLiteral: return {"double", 0};
        case NodeKind::StringLiteral: return {"cstr", 0};
        case NodeKind::CharLiteral: return {"char", 0};
        case NodeKind::BoolLiteral: return {"bool", 0};
        case NodeKind::Identifier: {
            if (auto id = decl_of(path)) return decls[*id].type;
            std::string n = strip_std(e.text);
            if (n == "cin" || n == "cout") return {"stream", 0};
            if (n == "endl") return {"endl", 0};
            return {};
        }
        case NodeKind::Paren: return child(0);
        case NodeKind::Binary: {
            const std::string& op = e.text;
            if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" ||
                op == "&&" || op == "||")
                return {"bool", 0};
            StaticType l = child(0);
            if (l.base == "stream") return l;
            StaticType r = child(1);
            if (op == "<<" || op == ">>") return promote1(l);
            if (op == "+" && (l.is_stringlike() || r.is_stringlike())) return {"string", 0};
            return promote(l, r);
        }
        case NodeKind::Assign: return child(0);
        case NodeKind::Cast: return {resolve_type(e.type), 0};
        case NodeKind::Unary: {
            StaticType t = child(0);
            if (e.text == "!") return {"bool", 0};
            if (e.text == "++" || e.text == "--" || e.text == "&") return t;
            return promote1(t);
        }
        case NodeKind::Postfix: return child(0);
        case NodeKind::Ternary: {
            StaticType a = child(1), b = child(2);
            if (a == b) return a;
            return promote(a, b);
        }
        case NodeKind::Index: {
            StaticType t = child(0);
            if (t.rank > 0) return {t.base, t.rank - 1};
            if (t.base.rfind("vector<", 0) == 0) return {t.base.substr(7, t.base.size() - 8), 0};
            if (t.base == "string") return {"char", 0};
            return {};
        }
        case NodeKind::Call: {
            if (!e.type.empty()) return {resolve_type(e.type), 0};
            auto f = functions.find(e.text);
            if (f != functions.end()) return decls[f->second].type;
            std::string n = strip_std(e.text);
            if (n == "sqrt") return {"double", 0};
            if (n == "printf" || n == "scanf") return {"int", 0};
            if (n == "abs") return promote1(child(0));
            if (n == "min" || n == "max") {
                StaticType a = child(0), b = child(1);
                return a == b ? a : promote(a, b);
            }
            if (n == "swap") return {"void", 0};
            return {};
        }
        case NodeKind::MemberCall: {
            const std::string& m = e.text;
            if (m == "size" || m == "length") return {"long long", 0};
            if (m == "substr") return {"string", 0};
            if (m == "c_str") return {"cstr", 0};
            if (m == "empty") return {"bool", 0};
            if (m == "back") {
                StaticType t = child(0);
                if (t.base.rfind("vector<", 0) == 0) return {t.base.substr(7, t.base.size() - 8), 0};
                if (t.base == "string") return {"char", 0};
                return {};
            }
            return {"void", 0};
        }
        default: return {};
    }
}

Bindings bind(const Ast& ast) { return Binder(ast).run(); }

std::vector<std::string> all_names(const Ast& ast) {
    std::set<std::string> names;
    walk(ast.root, [&](const Node& n, const NodePath&) {
        switch (n.kind) {
            case NodeKind::Identifier:
            case NodeKind::Declarator:
            case NodeKind::Param:
            case NodeKind::Function:
            case NodeKind::Typedef:
            case NodeKind::Call:
                names.insert(n.text);
                break;
            default:
                break;
        }
    });
    return {names.begin(), names.end()};
}

}  // namespace stylo
