#include "stylo/parser.hpp"

namespace stylo {

namespace {

class Printer {
public:
    explicit Printer(const PrintOptions& opt) : opt_(opt) {}

    std::string unit(const Node& root) {
        const Node* prev = nullptr;
        for (const Node& item : root.children) {
            if (prev && (prev->kind == NodeKind::Function || item.kind == NodeKind::Function)) out_ += "\n";
            comments(item.comments, 0);
            top_level(item);
            prev = &item;
        }
        if (!root.trailing.empty() && !root.children.empty()) out_ += "\n";
        comments(root.trailing, 0);
        return std::move(out_);
    }

    static std::string expr(const Node& n) {
        switch (n.kind) {
            case NodeKind::Identifier:
            case NodeKind::IntLiteral:
            case NodeKind::FloatLiteral:
            case NodeKind::StringLiteral:
            case NodeKind::CharLiteral:
            case NodeKind::BoolLiteral:
                return n.text;
            case NodeKind::Paren:
                return "(" + expr(n.children[0]) + ")";
            case NodeKind::Binary:
            case NodeKind::Assign:
                return expr(n.children[0]) + " " + n.text + " " + expr(n.children[1]);
            case NodeKind::Unary: {
                std::string operand = expr(n.children[0]);
                bool clash = !operand.empty() && (n.text == "-" || n.text == "+" || n.text == "&") &&
                             operand[0] == n.text[0];
                return n.text + (clash ? " " : "") + operand;
            }
            case NodeKind::Postfix:
                return expr(n.children[0]) + n.text;
            case NodeKind::Ternary:
                return expr(n.children[0]) + " ? " + expr(n.children[1]) + " : " + expr(n.children[2]);
            case NodeKind::Index:
                return expr(n.children[0]) + "[" + expr(n.children[1]) + "]";
            case NodeKind::Call:
                return n.text + "(" + list(n.children, 0) + ")";
            case NodeKind::MemberCall:
                return expr(n.children[0]) + "." + n.text + "(" + list(n.children, 1) + ")";
            case NodeKind::Cast:
                return "(" + n.type + ")" + expr(n.children[0]);
            case NodeKind::Empty:
                return "";
            default:
                return "/*?*/";
        }
    }

private:
    static std::string list(const std::vector<Node>& items, size_t from) {
        std::string s;
        for (size_t i = from; i < items.size(); ++i) {
            if (i > from) s += ", ";
            s += expr(items[i]);
        }
        return s;
    }

    std::string ind(int level) const {
        std::string s;
        for (int i = 0; i < level; ++i) s += opt_.indent;
        return s;
    }

    void comments(const std::vector<std::string>& items, int level) {
        if (!opt_.emit_comments) return;
        for (const auto& c : items) {
            if (!c.empty() && c[0] == '#')
                out_ += c + "\n";
            else
                out_ += ind(level) + c + "\n";
        }
    }

    void top_level(const Node& n) {
        switch (n.kind) {
            case NodeKind::Using:
                out_ += "using namespace " + n.text + ";\n";
                break;
            case NodeKind::Typedef:
                out_ += "typedef " + n.type + " " + n.text + ";\n";
                break;
            case NodeKind::Function: {
                std::string params;
                for (size_t i = 0; i + 1 < n.children.size(); ++i) {
                    if (i) params += ", ";
                    params += param(n.children[i]);
                }
                out_ += n.type + " " + n.text + "(" + params + ") {\n";
                block_contents(n.children.back(), 1);
                out_ += "}\n";
                break;
            }
            default:
                statement(n, 0);
        }
    }

    static std::string dims(const Node& n) {
        std::string s;
        for (int i = 0; i < n.rank; ++i) s += "[" + expr(n.children[i]) + "]";
        return s;
    }

    static std::string param(const Node& p) {
        return p.type + (p.by_ref ? "& " : " ") + p.text + dims(p);
    }

    static std::string declaration(const Node& d) {
        std::string s = d.type + " ";
        for (size_t i = 0; i < d.children.size(); ++i) {
            const Node& dc = d.children[i];
            if (i) s += ", ";
            s += dc.text + dims(dc);
            if (static_cast<int>(dc.children.size()) > dc.rank) {
                const Node& init = dc.children.back();
                switch (init.kind) {
                    case NodeKind::InitAssign: s += " = " + expr(init.children[0]); break;
                    case NodeKind::InitBrace: s += " = {" + list(init.children, 0) + "}"; break;
                    case NodeKind::InitCall: s += "(" + list(init.children, 0) + ")"; break;
                    default: break;
                }
            }
        }
        return s;
    }

    void block_contents(const Node& block, int level) {
        comments(block.comments, level);
        for (const Node& s : block.children) statement(s, level);
        comments(block.trailing, level);
    }

    // Writes `header` and the body. Returns true when the output ends with a
    // closing brace still on the current line.
    bool headed(const std::string& header, const Node& body, int level) {
        out_ += header;
        if (body.kind == NodeKind::Block) {
            out_ += " {\n";
            block_contents(body, level + 1);
            out_ += ind(level) + "}";
            return true;
        }
        out_ += "\n";
        statement(body, level + 1);
        return false;
    }

    void if_statement(const Node& n, int level, const std::string& lead) {
        bool brace = headed(lead + "if (" + expr(n.children[0]) + ")", n.children[1], level);
        if (n.children.size() < 3) {
            if (brace) out_ += "\n";
            return;
        }
        const Node& other = n.children[2];
        if (other.kind == NodeKind::If && other.comments.empty()) {
            if (brace)
                if_statement(other, level, " else ");
            else
                if_statement(other, level, ind(level) + "else ");
            return;
        }
        if (headed(brace ? std::string(" else") : ind(level) + "else", other, level)) out_ += "\n";
    }

    void statement(const Node& n, int level) {
        if (n.kind != NodeKind::Block) comments(n.comments, level);
        switch (n.kind) {
            case NodeKind::Block:
                out_ += ind(level) + "{\n";
                block_contents(n, level + 1);
                out_ += ind(level) + "}\n";
                break;
            case NodeKind::DeclStmt:
                out_ += ind(level) + declaration(n) + ";\n";
                break;
            case NodeKind::ExprStmt:
                out_ += ind(level) + expr(n.children[0]) + ";\n";
                break;
            case NodeKind::If:
                if_statement(n, level, ind(level));
                break;
            case NodeKind::For: {
                const Node& init = n.children[0];
                std::string head = "for (";
                if (init.kind == NodeKind::DeclStmt)
                    head += declaration(init);
                else if (init.kind == NodeKind::ExprStmt)
                    head += expr(init.children[0]);
                head += ";";
                if (n.children[1].kind != NodeKind::Empty) head += " " + expr(n.children[1]);
                head += ";";
                if (n.children[2].kind != NodeKind::Empty) head += " " + expr(n.children[2]);
                head += ")";
                if (headed(ind(level) + head, n.children[3], level)) out_ += "\n";
                break;
            }
            case NodeKind::While:
                if (headed(ind(level) + "while (" + expr(n.children[0]) + ")", n.children[1], level))
                    out_ += "\n";
                break;
            case NodeKind::DoWhile: {
                bool brace = headed(ind(level) + "do", n.children[0], level);
                out_ += (brace ? " " : ind(level)) + std::string("while (") + expr(n.children[1]) + ");\n";
                break;
            }
            case NodeKind::Break:
                out_ += ind(level) + "break;\n";
                break;
            case NodeKind::Continue:
                out_ += ind(level) + "continue;\n";
                break;
            case NodeKind::Return:
                out_ += ind(level) + (n.children.empty() ? std::string("return;\n")
                                                         : "return " + expr(n.children[0]) + ";\n");
                break;
            case NodeKind::Empty:
                out_ += ind(level) + ";\n";
                break;
            default:
                out_ += ind(level) + expr(n) + ";\n";
        }
    }

    const PrintOptions& opt_;
    std::string out_;
};

}  // namespace

std::string print_source(const Ast& ast, const PrintOptions& options) {
    return Printer(options).unit(ast.root);
}

std::string print_expression(const Node& expr) { return Printer::expr(expr); }

}  // namespace stylo
