#include "stylo/structure.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stylo/parser.hpp"

namespace stylo {

size_t count_leaves(const Node& node) {
    if (node.children.empty()) return 1;
    size_t n = 0;
    for (const auto& c : node.children) n += count_leaves(c);
    return n;
}

std::vector<LeafPath> extract_leaf_paths(const Ast& ast, int max_depth, int max_count) {
    std::vector<LeafPath> out;
    if (max_count <= 0) return out;
    std::vector<NodeKind> stack;
    auto visit = [&](auto&& self, const Node& n) -> bool {
        stack.push_back(n.kind);
        if (n.children.empty()) {
            LeafPath lp;
            lp.leaf = n.token.value_or(Token{});
            size_t keep = std::min<size_t>(stack.size(), static_cast<size_t>(std::max(max_depth, 0)));
            lp.path.assign(stack.end() - static_cast<std::ptrdiff_t>(keep), stack.end());
            lp.depth = static_cast<int>(lp.path.size());
            out.push_back(std::move(lp));
            if (static_cast<int>(out.size()) >= max_count) return false;
        } else {
            for (const auto& c : n.children)
                if (!self(self, c)) return false;
        }
        stack.pop_back();
        return true;
    };
    visit(visit, ast.root);
    return out;
}

namespace {

using DefState = std::map<int, std::set<int>>;  // decl -> reaching def nodes

void join_into(DefState& into, const DefState& other) {
    for (const auto& [decl, defs] : other) into[decl].insert(defs.begin(), defs.end());
}

class DfgBuilder {
public:
    DfgBuilder(const Ast& ast, const Bindings& b) : ast_(ast), b_(b) {}

    Dfg run(int max_nodes) {
        collect_nodes();
        const Node& root = ast_.root;
        DefState globals;
        NodePath path;
        for (int i = 0; i < static_cast<int>(root.children.size()); ++i) {
            if (root.children[i].kind != NodeKind::DeclStmt) continue;
            path = {i};
            statement(root.children[i], path, globals);
        }
        for (int i = 0; i < static_cast<int>(root.children.size()); ++i) {
            const Node& fn = root.children[i];
            if (fn.kind != NodeKind::Function) continue;
            DefState state = globals;
            int nparams = static_cast<int>(fn.children.size()) - 1;
            for (int p = 0; p < nparams; ++p) define({i, p}, state, true);
            path = {i, nparams};
            block(fn.children.back(), path, state);
        }
        Dfg out;
        out.nodes = std::move(nodes_);
        out.edges.assign(edges_.begin(), edges_.end());
        if (max_nodes >= 0 && static_cast<int>(out.nodes.size()) > max_nodes) {
            out.nodes.resize(static_cast<size_t>(max_nodes));
            std::erase_if(out.edges, [&](const DfgEdge& e) { return e.from >= max_nodes || e.to >= max_nodes; });
        }
        return out;
    }

private:
    void collect_nodes() {
        walk(ast_.root, [&](const Node& n, const NodePath& p) {
            int decl = -1;
            OccurrenceRole role = OccurrenceRole::Use;
            if (n.kind == NodeKind::Declarator || n.kind == NodeKind::Param) {
                for (const auto& d : b_.decls)
                    if (d.path == p) decl = d.id;
                role = OccurrenceRole::Def;
            } else if (n.kind == NodeKind::Identifier) {
                if (auto d = b_.decl_of(p)) decl = *d;
            }
            if (decl < 0) return;
            DfgNode node;
            node.id = static_cast<int>(nodes_.size());
            node.name = n.text;
            node.decl = decl;
            node.line = n.line();
            node.column = n.token ? n.token->column : 0;
            node.path = p;
            node.role = role;
            by_path_[p] = node.id;
            nodes_.push_back(std::move(node));
        });
    }

    void use(const NodePath& p, DefState& s) {
        auto it = by_path_.find(p);
        if (it == by_path_.end()) return;
        int node = it->second;
        for (int def : s[nodes_[node].decl]) edges_.insert({def, node});
    }

    void define(const NodePath& p, DefState& s, bool strong, bool pure = false) {
        auto it = by_path_.find(p);
        if (it == by_path_.end()) return;
        int node = it->second;
        auto& defs = s[nodes_[node].decl];
        if (strong) defs.clear();
        defs.insert(node);
        if (nodes_[node].role == OccurrenceRole::Use) nodes_[node].role = pure ? OccurrenceRole::Def : OccurrenceRole::UseDef;
    }

    static NodePath with(const NodePath& p, int i) {
        NodePath q = p;
        q.push_back(i);
        return q;
    }

    // Writes through an lvalue expression: identifiers get a strong def,
    // indexed/element writes a weak one.
    void write_target(const Node& e, const NodePath& p, DefState& s, bool also_use) {
        if (e.kind == NodeKind::Identifier) {
            if (also_use) use(p, s);
            define(p, s, true, !also_use);
        } else if (e.kind == NodeKind::Index) {
            expr(e.children[1], with(p, 1), s);
            const Node* base = &e.children[0];
            NodePath bp = with(p, 0);
            while (base->kind == NodeKind::Index) {
                expr(base->children[1], with(bp, 1), s);
                base = &base->children[0];
                bp = with(bp, 0);
            }
            if (base->kind == NodeKind::Identifier) {
                use(bp, s);
                define(bp, s, false);
            } else {
                expr(*base, bp, s);
            }
        } else if (e.kind == NodeKind::Paren) {
            write_target(e.children[0], with(p, 0), s, also_use);
        } else {
            expr(e, p, s);
        }
    }

    static bool rooted_at(const Node& e, std::string_view stream) {
        const Node* n = &e;
        while (n->kind == NodeKind::Binary) n = &n->children[0];
        return n->kind == NodeKind::Identifier && strip_std(n->text) == stream;
    }

    void expr(const Node& e, const NodePath& p, DefState& s) {
        switch (e.kind) {
            case NodeKind::Identifier:
                use(p, s);
                return;
            case NodeKind::Assign:
                expr(e.children[1], with(p, 1), s);
                write_target(e.children[0], with(p, 0), s, e.text != "=");
                return;
            case NodeKind::Unary:
            case NodeKind::Postfix:
                if (e.text == "++" || e.text == "--") {
                    write_target(e.children[0], with(p, 0), s, true);
                    return;
                }
                break;
            case NodeKind::Binary:
                if (e.text == ">>" && rooted_at(e, "cin")) {
                    expr(e.children[0], with(p, 0), s);
                    write_target(e.children[1], with(p, 1), s, false);
                    return;
                }
                break;
            case NodeKind::Call: {
                std::string n = strip_std(e.text);
                if (n == "scanf") {
                    for (int i = 1; i < static_cast<int>(e.children.size()); ++i)
                        write_target(e.children[i].children[0], with(with(p, i), 0), s, false);
                    return;
                }
                if (n == "swap") {
                    for (int i = 0; i < 2; ++i) write_target(e.children[i], with(p, i), s, true);
                    return;
                }
                break;
            }
            case NodeKind::MemberCall:
                if (e.text == "push_back" || e.text == "pop_back") {
                    for (int i = 1; i < static_cast<int>(e.children.size()); ++i)
                        expr(e.children[i], with(p, i), s);
                    write_target(e.children[0], with(p, 0), s, true);
                    if (e.children[0].kind == NodeKind::Identifier) {
                        // element append keeps earlier contents alive
                        auto it = by_path_.find(with(p, 0));
                        if (it != by_path_.end()) s[nodes_[it->second].decl].insert(it->second);
                    }
                    return;
                }
                break;
            case NodeKind::Ternary: {
                expr(e.children[0], with(p, 0), s);
                DefState a = s, b = s;
                expr(e.children[1], with(p, 1), a);
                expr(e.children[2], with(p, 2), b);
                s = std::move(a);
                join_into(s, b);
                return;
            }
            default:
                break;
        }
        for (int i = 0; i < static_cast<int>(e.children.size()); ++i) expr(e.children[i], with(p, i), s);
    }

    void block(const Node& b, const NodePath& p, DefState& s) {
        for (int i = 0; i < static_cast<int>(b.children.size()); ++i) statement(b.children[i], with(p, i), s);
    }

    void loop(const Node* init, const NodePath& init_p, const Node* cond, const NodePath& cond_p,
              const Node* step, const NodePath& step_p, const Node& body, const NodePath& body_p,
              bool body_first, DefState& s) {
        if (init) statement(*init, init_p, s);
        auto pass = [&](DefState& st) {
            if (!body_first && cond) expr(*cond, cond_p, st);
            statement(body, body_p, st);
            if (step) expr(*step, step_p, st);
            if (body_first && cond) expr(*cond, cond_p, st);
        };
        DefState entry = s;
        DefState first = s;
        pass(first);
        // merge back-edge defs into the header and take one more pass
        DefState header = entry;
        join_into(header, first);
        DefState second = header;
        pass(second);
        s = std::move(header);
        join_into(s, second);
    }

    void statement(const Node& n, const NodePath& p, DefState& s) {
        switch (n.kind) {
            case NodeKind::Block:
                block(n, p, s);
                break;
            case NodeKind::DeclStmt:
                for (int i = 0; i < static_cast<int>(n.children.size()); ++i) {
                    const Node& d = n.children[i];
                    NodePath dp = with(p, i);
                    for (int k = 0; k < static_cast<int>(d.children.size()); ++k) expr(d.children[k], with(dp, k), s);
                    define(dp, s, true);
                }
                break;
            case NodeKind::ExprStmt:
                expr(n.children[0], with(p, 0), s);
                break;
            case NodeKind::If: {
                expr(n.children[0], with(p, 0), s);
                DefState a = s;
                statement(n.children[1], with(p, 1), a);
                if (n.children.size() > 2) statement(n.children[2], with(p, 2), s);
                join_into(s, a);
                break;
            }
            case NodeKind::For: {
                const Node* init = n.children[0].kind == NodeKind::Empty ? nullptr : &n.children[0];
                const Node* cond = n.children[1].kind == NodeKind::Empty ? nullptr : &n.children[1];
                const Node* step = n.children[2].kind == NodeKind::Empty ? nullptr : &n.children[2];
                loop(init, with(p, 0), cond, with(p, 1), step, with(p, 2), n.children[3], with(p, 3), false, s);
                break;
            }
            case NodeKind::While:
                loop(nullptr, {}, &n.children[0], with(p, 0), nullptr, {}, n.children[1], with(p, 1), false, s);
                break;
            case NodeKind::DoWhile:
                loop(nullptr, {}, &n.children[1], with(p, 1), nullptr, {}, n.children[0], with(p, 0), true, s);
                break;
            case NodeKind::Return:
                if (!n.children.empty()) expr(n.children[0], with(p, 0), s);
                break;
            default:
                break;
        }
    }

    const Ast& ast_;
    const Bindings& b_;
    std::vector<DfgNode> nodes_;
    std::map<NodePath, int> by_path_;
    std::set<DfgEdge> edges_;
};

}  // namespace

Dfg build_dfg(const Ast& ast, const Bindings& bindings, int max_nodes) {
    return DfgBuilder(ast, bindings).run(max_nodes);
}

Dfg build_dfg(const Ast& ast, int max_nodes) {
    Bindings b;
    try {
        b = bind(ast);
    } catch (const BindError& e) {
        if (e.kind() == BindErrorKind::UndeclaredVariable)
            throw UnresolvedIdentifier(e.kind(), e.name(), e.line(), e.column(),
                                       "unresolved identifier '" + e.name() + "'");
        throw;
    }
    return build_dfg(ast, b, max_nodes);
}

nlohmann::json to_json(const Node& node) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(node.kind));
    if (!node.text.empty()) j["text"] = node.text;
    if (!node.type.empty()) j["type"] = node.type;
    if (node.rank) j["rank"] = node.rank;
    if (node.by_ref) j["by_ref"] = true;
    if (node.token && node.token->line) j["pos"] = {node.token->line, node.token->column};
    auto children = nlohmann::json::array();
    for (const auto& c : node.children) children.push_back(to_json(c));
    j["children"] = std::move(children);
    return j;
}

nlohmann::json to_json(const Dfg& dfg) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : dfg.nodes) {
        const char* role = n.role == OccurrenceRole::Def ? "def" : n.role == OccurrenceRole::Use ? "use" : "use-def";
        nodes.push_back({{"id", n.id}, {"name", n.name}, {"decl", n.decl}, {"line", n.line},
                         {"column", n.column}, {"role", role}});
    }
    auto edges = nlohmann::json::array();
    for (const auto& e : dfg.edges) edges.push_back({e.from, e.to});
    return {{"nodes", nodes}, {"edges", edges}};
}

nlohmann::json to_json(const std::vector<LeafPath>& paths) {
    auto out = nlohmann::json::array();
    for (const auto& lp : paths) {
        auto kinds = nlohmann::json::array();
        for (NodeKind k : lp.path) kinds.push_back(std::string(to_string(k)));
        out.push_back({{"leaf", lp.leaf.text}, {"line", lp.leaf.line}, {"column", lp.leaf.column},
                       {"depth", lp.depth}, {"path", kinds}});
    }
    return out;
}

nlohmann::json encode_program(std::string_view source, const EncodeLimits& limits) {
    TokenStream stream = tokenize(source);
    Ast ast = parse(stream);
    std::map<std::pair<int, int>, int> token_index;
    auto tokens = nlohmann::json::array();
    bool truncated = static_cast<int>(stream.tokens.size()) > limits.max_tokens;
    for (int i = 0; i < static_cast<int>(stream.tokens.size()); ++i) {
        const Token& t = stream.tokens[i];
        token_index[{t.line, t.column}] = i;
        if (i < limits.max_tokens)
            tokens.push_back({{"kind", std::string(to_string(t.kind))}, {"text", t.text}, {"line", t.line},
                              {"column", t.column}});
    }
    auto paths = extract_leaf_paths(ast, limits.max_ast_depth, limits.max_leaf_paths);
    auto leaf_json = to_json(paths);
    for (size_t i = 0; i < paths.size(); ++i) {
        auto it = token_index.find({paths[i].leaf.line, paths[i].leaf.column});
        leaf_json[i]["token_index"] = it == token_index.end() ? -1 : it->second;
    }
    nlohmann::json dfg_json = nullptr;
    try {
        Dfg dfg = build_dfg(ast, limits.max_dfg_nodes);
        dfg_json = to_json(dfg);
        for (size_t i = 0; i < dfg.nodes.size(); ++i) {
            auto it = token_index.find({dfg.nodes[i].line, dfg.nodes[i].column});
            dfg_json["nodes"][i]["token_index"] = it == token_index.end() ? -1 : it->second;
        }
    } catch (const BindError&) {
        dfg_json = {{"nodes", nlohmann::json::array()}, {"edges", nlohmann::json::array()}, {"error", "unbound"}};
    }
    return {{"tokens", tokens},
            {"token_count", stream.tokens.size()},
            {"truncated", truncated},
            {"leaf_paths", leaf_json},
            {"dfg", dfg_json}};
}

}  // namespace stylo
