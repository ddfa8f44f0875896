#include "stylo/interp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cctype>
#include <deque>
#include <map>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "stylo/binder.hpp"

namespace stylo {

std::string_view to_string(ExecStatus s) {
    switch (s) {
        case ExecStatus::Ok: return "ok";
        case ExecStatus::RuntimeError: return "runtime-error";
        case ExecStatus::Timeout: return "timeout";
        case ExecStatus::ResourceLimit: return "resource-limit";
    }
    return "?";
}

std::string_view to_string(RuntimeFault f) {
    switch (f) {
        case RuntimeFault::None: return "none";
        case RuntimeFault::DivZero: return "div-zero";
        case RuntimeFault::IndexOutOfBounds: return "index-out-of-bounds";
        case RuntimeFault::InputExhausted: return "input-exhausted";
        case RuntimeFault::Unresolved: return "unresolved";
    }
    return "?";
}

bool stream_chain(const Node& expr, std::string_view stream, std::vector<const Node*>* items) {
    std::string_view op = stream == "cout" ? "<<" : ">>";
    std::vector<const Node*> rev;
    const Node* n = &expr;
    while (n->kind == NodeKind::Binary && n->text == op) {
        rev.push_back(&n->children[1]);
        n = &n->children[0];
    }
    if (n->kind != NodeKind::Identifier || strip_std(n->text) != stream || rev.empty()) return false;
    if (items) items->assign(rev.rbegin(), rev.rend());
    return true;
}

bool is_output_statement(const Node& stmt) {
    if (stmt.kind != NodeKind::ExprStmt) return false;
    const Node& e = stmt.children[0];
    if (e.kind == NodeKind::Call && strip_std(e.text) == "printf") return true;
    return stream_chain(e, "cout", nullptr);
}

bool is_input_statement(const Node& stmt) {
    if (stmt.kind != NodeKind::ExprStmt) return false;
    const Node& e = stmt.children[0];
    if (e.kind == NodeKind::Call && strip_std(e.text) == "scanf") return true;
    return stream_chain(e, "cin", nullptr);
}

namespace {

struct Value;
using Elements = std::vector<Value>;

struct Value {
    enum class Tag : uint8_t { Void, Int, Bool, Char, Double, String, Array, Vector, Stream, Endl };
    Tag tag = Tag::Void;
    int64_t i = 0;
    double d = 0;
    std::string s;  // String payload, or element type for Array/Vector
    std::shared_ptr<Elements> elems;

    static Value make_int(int64_t v) { Value x; x.tag = Tag::Int; x.i = v; return x; }
    static Value make_bool(bool v) { Value x; x.tag = Tag::Bool; x.i = v ? 1 : 0; return x; }
    static Value make_char(int64_t v) { Value x; x.tag = Tag::Char; x.i = static_cast<signed char>(v); return x; }
    static Value make_double(double v) { Value x; x.tag = Tag::Double; x.d = v; return x; }
    static Value make_string(std::string v) { Value x; x.tag = Tag::String; x.s = std::move(v); return x; }

    bool numeric() const { return tag == Tag::Int || tag == Tag::Bool || tag == Tag::Char || tag == Tag::Double; }
    bool integral() const { return tag == Tag::Int || tag == Tag::Bool || tag == Tag::Char; }
    double as_double() const { return tag == Tag::Double ? d : static_cast<double>(i); }
};

struct Trap {
    ExecStatus status;
    RuntimeFault fault;
    std::string message;
};

[[noreturn]] void trap(RuntimeFault f, std::string msg) { throw Trap{ExecStatus::RuntimeError, f, std::move(msg)}; }

int64_t wrap_add(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b)); }
int64_t wrap_sub(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b)); }
int64_t wrap_mul(int64_t a, int64_t b) { return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b)); }

Value deep_copy(const Value& v) {
    if (v.tag != Value::Tag::Vector) return v;
    Value out = v;
    out.elems = std::make_shared<Elements>();
    out.elems->reserve(v.elems->size());
    for (const auto& e : *v.elems) out.elems->push_back(deep_copy(e));
    return out;
}

bool is_vector_type(std::string_view t) { return t.rfind("vector<", 0) == 0; }
std::string vector_elem(std::string_view t) { return std::string(t.substr(7, t.size() - 8)); }

Value default_value(const std::string& type) {
    if (type == "double") return Value::make_double(0);
    if (type == "bool") return Value::make_bool(false);
    if (type == "char") return Value::make_char(0);
    if (type == "string") return Value::make_string("");
    if (is_vector_type(type)) {
        Value v;
        v.tag = Value::Tag::Vector;
        v.s = vector_elem(type);
        v.elems = std::make_shared<Elements>();
        return v;
    }
    return Value::make_int(0);
}

Value convert(const Value& v, const std::string& type) {
    using T = Value::Tag;
    if (type == "int" || type == "long" || type == "long long") {
        if (v.tag == T::Double) {
            if (!std::isfinite(v.d) || std::fabs(v.d) >= 9.2e18) return Value::make_int(std::numeric_limits<int64_t>::min());
            return Value::make_int(static_cast<int64_t>(v.d));
        }
        if (v.integral()) return Value::make_int(v.i);
    } else if (type == "double") {
        if (v.numeric()) return Value::make_double(v.as_double());
    } else if (type == "bool") {
        if (v.numeric()) return Value::make_bool(v.tag == T::Double ? v.d != 0 : v.i != 0);
    } else if (type == "char") {
        if (v.numeric()) return Value::make_char(v.tag == T::Double ? static_cast<int64_t>(v.d) : v.i);
    } else if (type == "string") {
        if (v.tag == T::String) return v;
    } else if (is_vector_type(type)) {
        if (v.tag == T::Vector) return deep_copy(v);
    }
    trap(RuntimeFault::Unresolved, "cannot convert value to " + type);
}

std::string type_of_value(const Value& v) {
    switch (v.tag) {
        case Value::Tag::Int: return "long long";
        case Value::Tag::Bool: return "bool";
        case Value::Tag::Char: return "char";
        case Value::Tag::Double: return "double";
        case Value::Tag::String: return "string";
        case Value::Tag::Vector: return "vector<" + v.s + ">";
        default: return "void";
    }
}

std::string format_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
}

struct LRef {
    Value* v = nullptr;
    std::string* str = nullptr;
    size_t idx = 0;

    Value get() const { return v ? *v : Value::make_char((*str)[idx]); }
    void set(const Value& x) const {
        if (v) {
            if (v->tag == Value::Tag::Array) trap(RuntimeFault::Unresolved, "array assignment");
            *v = v->tag == Value::Tag::Void ? x : convert(x, type_of_value(*v));
        } else {
            (*str)[idx] = static_cast<char>(convert(x, "char").i);
        }
    }
};

struct Var {
    std::string name;
    Value value;
    Value* ref = nullptr;
    Value* get() { return ref ? ref : &value; }
};

struct Scope {
    std::deque<Var> vars;
    Var* find(std::string_view name) {
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }
};

struct Frame {
    std::deque<Scope> scopes;
};

enum class Flow { Normal, Break, Continue, Return };

class Interpreter {
public:
    Interpreter(const Ast& ast, std::string_view input, const ExecLimits& limits)
        : ast_(ast), input_(input), limits_(limits) {}

    ExecutionResult run() {
        try {
            typedefs_ = collect_typedefs();
            Frame global_frame;
            global_frame.scopes.emplace_back();
            frames_.push_back(&global_frame);
            const Node* main_fn = nullptr;
            for (const Node& item : ast_.root.children) {
                if (item.kind == NodeKind::DeclStmt) exec(item);
                if (item.kind == NodeKind::Function) {
                    functions_[item.text] = &item;
                    if (item.text == "main") main_fn = &item;
                }
            }
            globals_ = &global_frame.scopes.front();
            if (!main_fn) trap(RuntimeFault::Unresolved, "no main function");
            call(*main_fn, {});
            frames_.clear();
        } catch (const Trap& t) {
            result_.status = t.status;
            result_.fault = t.fault;
            result_.message = t.message;
            frames_.clear();
        }
        result_.stdout_text = std::move(out_);
        return std::move(result_);
    }

private:
    std::map<std::string, std::string> collect_typedefs() const {
        std::map<std::string, std::string> m;
        for (const Node& item : ast_.root.children)
            if (item.kind == NodeKind::Typedef) m[item.text] = resolve_type(item.type, m);
        return m;
    }

    static std::string resolve_type(const std::string& t, const std::map<std::string, std::string>& m) {
        if (t.rfind("const ", 0) == 0) return resolve_type(t.substr(6), m);
        if (is_vector_type(t)) return "vector<" + resolve_type(vector_elem(t), m) + ">";
        auto it = m.find(t);
        return it == m.end() ? t : it->second;
    }
    std::string resolve(const std::string& t) const { return resolve_type(t, typedefs_); }

    void step() {
        if (++result_.steps > limits_.step_limit) {
            result_.steps = limits_.step_limit;
            throw Trap{ExecStatus::Timeout, RuntimeFault::None, "step limit exceeded"};
        }
    }

    void emit(std::string_view text) {
        out_ += text;
        if (out_.size() > limits_.output_limit) {
            out_.resize(limits_.output_limit);
            throw Trap{ExecStatus::ResourceLimit, RuntimeFault::None, "output limit exceeded"};
        }
    }

    // --- variables ---------------------------------------------------------

    Var* lookup(std::string_view raw) {
        std::string name = strip_std(raw);
        Frame* f = frames_.back();
        for (auto it = f->scopes.rbegin(); it != f->scopes.rend(); ++it)
            if (Var* v = it->find(name)) return v;
        if (globals_ && f != frames_.front())
            if (Var* v = globals_->find(name)) return v;
        return nullptr;
    }

    Var& declare(const std::string& name, Value v) {
        Scope& s = frames_.back()->scopes.back();
        s.vars.push_back(Var{name, std::move(v), nullptr});
        return s.vars.back();
    }

    struct ScopeGuard {
        Interpreter& in;
        explicit ScopeGuard(Interpreter& i) : in(i) { in.frames_.back()->scopes.emplace_back(); }
        ~ScopeGuard() { in.frames_.back()->scopes.pop_back(); }
    };

    // --- statements ----------------------------------------------------------

    Value make_array(const std::string& base, const std::vector<int64_t>& dims, size_t level) {
        Value v;
        v.tag = Value::Tag::Array;
        v.s = base;
        int64_t n = dims[level];
        if (n < 0 || n > 50'000'000) throw Trap{ExecStatus::ResourceLimit, RuntimeFault::None, "array too large"};
        v.elems = std::make_shared<Elements>();
        v.elems->reserve(static_cast<size_t>(n));
        for (int64_t k = 0; k < n; ++k)
            v.elems->push_back(level + 1 < dims.size() ? make_array(base, dims, level + 1) : default_value(base));
        return v;
    }

    Value construct(const std::string& type, const std::vector<Node>& args, size_t from) {
        size_t argc = args.size() - from;
        if (is_vector_type(type)) {
            Value v = default_value(type);
            if (argc == 0) return v;
            int64_t n = convert(eval(args[from]), "long long").i;
            if (n < 0 || n > 50'000'000) throw Trap{ExecStatus::ResourceLimit, RuntimeFault::None, "vector too large"};
            Value fill = argc > 1 ? convert(eval(args[from + 1]), v.s) : default_value(v.s);
            v.elems->reserve(static_cast<size_t>(n));
            for (int64_t k = 0; k < n; ++k) v.elems->push_back(deep_copy(fill));
            return v;
        }
        if (type == "string") {
            if (argc == 0) return Value::make_string("");
            if (argc == 1) return convert(eval(args[from]), "string");
            int64_t n = convert(eval(args[from]), "long long").i;
            char c = static_cast<char>(convert(eval(args[from + 1]), "char").i);
            if (n < 0 || n > 50'000'000) throw Trap{ExecStatus::ResourceLimit, RuntimeFault::None, "string too large"};
            return Value::make_string(std::string(static_cast<size_t>(n), c));
        }
        if (argc == 0) return default_value(type);
        return convert(eval(args[from]), type);
    }

    void declare_one(const std::string& type, const Node& d) {
        bool has_init = static_cast<int>(d.children.size()) > d.rank;
        const Node* init = has_init ? &d.children.back() : nullptr;
        if (d.rank > 0) {
            std::vector<int64_t> dims;
            for (int k = 0; k < d.rank; ++k) {
                if (d.children[k].kind == NodeKind::Empty) {
                    dims.push_back(init && init->kind == NodeKind::InitBrace ? static_cast<int64_t>(init->children.size()) : 0);
                } else {
                    dims.push_back(convert(eval(d.children[k]), "long long").i);
                }
            }
            Value arr = make_array(type, dims, 0);
            if (init && init->kind == NodeKind::InitBrace) {
                if (d.rank != 1 || init->children.size() > arr.elems->size())
                    trap(RuntimeFault::IndexOutOfBounds, "too many initializers");
                for (size_t k = 0; k < init->children.size(); ++k)
                    (*arr.elems)[k] = convert(eval(init->children[k]), type);
            }
            declare(d.text, std::move(arr));
            return;
        }
        Var& var = declare(d.text, default_value(type));
        if (!init) return;
        Value v;
        switch (init->kind) {
            case NodeKind::InitAssign: v = convert(eval(init->children[0]), type); break;
            case NodeKind::InitCall: v = construct(type, init->children, 0); break;
            case NodeKind::InitBrace:
                if (is_vector_type(type)) {
                    v = default_value(type);
                    for (const auto& e : init->children) v.elems->push_back(convert(eval(e), v.s));
                } else if (init->children.size() == 1) {
                    v = convert(eval(init->children[0]), type);
                } else {
                    v = default_value(type);
                }
                break;
            default: break;
        }
        var.get()->operator=(std::move(v));
    }

    bool truthy(const Value& v) {
        if (v.tag == Value::Tag::Double) return v.d != 0;
        if (v.integral()) return v.i != 0;
        trap(RuntimeFault::Unresolved, "non-scalar condition");
    }

    Flow exec(const Node& n) {
        step();
        switch (n.kind) {
            case NodeKind::Block: {
                ScopeGuard g(*this);
                for (const auto& s : n.children) {
                    Flow f = exec(s);
                    if (f != Flow::Normal) return f;
                }
                return Flow::Normal;
            }
            case NodeKind::DeclStmt: {
                std::string type = resolve(n.type);
                for (const auto& d : n.children) declare_one(type, d);
                return Flow::Normal;
            }
            case NodeKind::ExprStmt:
                if (is_output_statement(n)) ++result_.output_statements;
                if (is_input_statement(n)) ++result_.input_statements;
                eval(n.children[0]);
                return Flow::Normal;
            case NodeKind::If: {
                bool c = truthy(eval(n.children[0]));
                if (c) return exec_scoped(n.children[1]);
                if (n.children.size() > 2) return exec_scoped(n.children[2]);
                return Flow::Normal;
            }
            case NodeKind::For: {
                ScopeGuard g(*this);
                if (n.children[0].kind != NodeKind::Empty) exec(n.children[0]);
                while (true) {
                    step();
                    if (n.children[1].kind != NodeKind::Empty && !truthy(eval(n.children[1]))) break;
                    Flow f = exec_scoped(n.children[3]);
                    if (f == Flow::Break) break;
                    if (f == Flow::Return) return f;
                    if (n.children[2].kind != NodeKind::Empty) eval(n.children[2]);
                }
                return Flow::Normal;
            }
            case NodeKind::While:
                while (true) {
                    step();
                    if (!truthy(eval(n.children[0]))) break;
                    Flow f = exec_scoped(n.children[1]);
                    if (f == Flow::Break) break;
                    if (f == Flow::Return) return f;
                }
                return Flow::Normal;
            case NodeKind::DoWhile:
                while (true) {
                    step();
                    Flow f = exec_scoped(n.children[0]);
                    if (f == Flow::Break) break;
                    if (f == Flow::Return) return f;
                    if (!truthy(eval(n.children[1]))) break;
                }
                return Flow::Normal;
            case NodeKind::Break: return Flow::Break;
            case NodeKind::Continue: return Flow::Continue;
            case NodeKind::Return:
                ret_ = n.children.empty() ? Value{} : eval(n.children[0]);
                return Flow::Return;
            default:
                return Flow::Normal;
        }
    }

    Flow exec_scoped(const Node& body) {
        if (body.kind == NodeKind::Block) return exec(body);
        ScopeGuard g(*this);
        return exec(body);
    }

    // --- calls ---------------------------------------------------------------

    Value call(const Node& fn, const std::vector<const Node*>& args) {
        if (static_cast<int>(frames_.size()) > limits_.call_depth_limit)
            throw Trap{ExecStatus::ResourceLimit, RuntimeFault::None, "call depth limit exceeded"};
        size_t nparams = fn.children.size() - 1;
        if (args.size() != nparams) trap(RuntimeFault::Unresolved, "argument count mismatch");
        // evaluate arguments in the caller's frame
        std::vector<Value> values(nparams);
        std::vector<Value*> refs(nparams, nullptr);
        for (size_t k = 0; k < nparams; ++k) {
            const Node& p = fn.children[k];
            if (p.by_ref) {
                LRef r = lvalue(*args[k]);
                if (!r.v) trap(RuntimeFault::Unresolved, "reference to string element");
                refs[k] = r.v;
            } else if (p.rank > 0) {
                values[k] = eval(*args[k]);
            } else {
                values[k] = convert(eval(*args[k]), resolve(p.type));
            }
        }
        Frame frame;
        frame.scopes.emplace_back();
        frames_.push_back(&frame);
        struct Pop {
            std::vector<Frame*>& f;
            ~Pop() { f.pop_back(); }
        } pop{frames_};
        for (size_t k = 0; k < nparams; ++k) {
            Var& v = declare(fn.children[k].text, std::move(values[k]));
            v.ref = refs[k];
        }
        ret_ = Value{};
        const Node& body = fn.children.back();
        for (const auto& s : body.children) {
            Flow f = exec(s);
            if (f == Flow::Return) break;
        }
        Value r = std::move(ret_);
        ret_ = Value{};
        std::string rt = resolve(fn.type);
        if (rt == "void" || r.tag == Value::Tag::Void) return rt == "void" ? Value{} : default_value(rt);
        return convert(r, rt);
    }

    // --- expressions ---------------------------------------------------------

    LRef lvalue(const Node& e) {
        switch (e.kind) {
            case NodeKind::Identifier: {
                Var* v = lookup(e.text);
                if (!v) trap(RuntimeFault::Unresolved, "unresolved identifier " + e.text);
                return {v->get()};
            }
            case NodeKind::Paren:
                return lvalue(e.children[0]);
            case NodeKind::Index: {
                LRef base = lvalue(e.children[0]);
                int64_t idx = convert(eval(e.children[1]), "long long").i;
                if (!base.v) trap(RuntimeFault::Unresolved, "indexing a character");
                Value& b = *base.v;
                if (b.tag == Value::Tag::String) {
                    if (idx < 0 || static_cast<size_t>(idx) >= b.s.size())
                        trap(RuntimeFault::IndexOutOfBounds, "string index out of range");
                    return {nullptr, &b.s, static_cast<size_t>(idx)};
                }
                if (b.tag != Value::Tag::Array && b.tag != Value::Tag::Vector)
                    trap(RuntimeFault::Unresolved, "indexing a scalar");
                if (idx < 0 || static_cast<size_t>(idx) >= b.elems->size())
                    trap(RuntimeFault::IndexOutOfBounds, "index out of range");
                return {&(*b.elems)[static_cast<size_t>(idx)]};
            }
            case NodeKind::Unary:
                if (e.text == "++" || e.text == "--") {
                    eval(e);
                    return lvalue(e.children[0]);
                }
                break;
            case NodeKind::Assign: {
                eval(e);
                return lvalue(e.children[0]);
            }
            default:
                break;
        }
        trap(RuntimeFault::Unresolved, "expression is not assignable");
    }

    Value arith(const std::string& op, const Value& a, const Value& b) {
        using T = Value::Tag;
        if (op == "+" && (a.tag == T::String || b.tag == T::String)) {
            auto piece = [&](const Value& v) -> std::string {
                if (v.tag == T::String) return v.s;
                if (v.tag == T::Char) return std::string(1, static_cast<char>(v.i));
                trap(RuntimeFault::Unresolved, "bad string concatenation");
            };
            return Value::make_string(piece(a) + piece(b));
        }
        if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") {
            int cmp;
            if (a.tag == T::String && b.tag == T::String) {
                cmp = a.s.compare(b.s);
            } else if (a.numeric() && b.numeric()) {
                if (a.tag == T::Double || b.tag == T::Double) {
                    double x = a.as_double(), y = b.as_double();
                    if (op == "==") return Value::make_bool(x == y);
                    if (op == "!=") return Value::make_bool(x != y);
                    if (op == "<") return Value::make_bool(x < y);
                    if (op == "<=") return Value::make_bool(x <= y);
                    if (op == ">") return Value::make_bool(x > y);
                    return Value::make_bool(x >= y);
                }
                cmp = a.i < b.i ? -1 : a.i > b.i ? 1 : 0;
            } else {
                trap(RuntimeFault::Unresolved, "incomparable operands");
            }
            if (op == "==") return Value::make_bool(cmp == 0);
            if (op == "!=") return Value::make_bool(cmp != 0);
            if (op == "<") return Value::make_bool(cmp < 0);
            if (op == "<=") return Value::make_bool(cmp <= 0);
            if (op == ">") return Value::make_bool(cmp > 0);
            return Value::make_bool(cmp >= 0);
        }
        if (!a.numeric() || !b.numeric()) trap(RuntimeFault::Unresolved, "non-numeric operand to " + op);
        if ((a.tag == T::Double || b.tag == T::Double) && (op == "+" || op == "-" || op == "*" || op == "/")) {
            double x = a.as_double(), y = b.as_double();
            if (op == "+") return Value::make_double(x + y);
            if (op == "-") return Value::make_double(x - y);
            if (op == "*") return Value::make_double(x * y);
            return Value::make_double(x / y);
        }
        if (a.tag == T::Double || b.tag == T::Double) trap(RuntimeFault::Unresolved, "invalid operands to " + op);
        int64_t x = a.i, y = b.i;
        if (op == "+") return Value::make_int(wrap_add(x, y));
        if (op == "-") return Value::make_int(wrap_sub(x, y));
        if (op == "*") return Value::make_int(wrap_mul(x, y));
        if (op == "/" || op == "%") {
            if (y == 0) trap(RuntimeFault::DivZero, "division by zero");
            if (y == -1) return Value::make_int(op == "/" ? wrap_sub(0, x) : 0);
            return Value::make_int(op == "/" ? x / y : x % y);
        }
        if (op == "&") return Value::make_int(x & y);
        if (op == "|") return Value::make_int(x | y);
        if (op == "^") return Value::make_int(x ^ y);
        if (op == "<<") return Value::make_int(static_cast<int64_t>(static_cast<uint64_t>(x) << (y & 63)));
        if (op == ">>") return Value::make_int(x >> (y & 63));
        trap(RuntimeFault::Unresolved, "unknown operator " + op);
    }

    void print_value(const Value& v) {
        switch (v.tag) {
            case Value::Tag::Int: emit(std::to_string(v.i)); break;
            case Value::Tag::Bool: emit(v.i ? "1" : "0"); break;
            case Value::Tag::Char: emit(std::string(1, static_cast<char>(v.i))); break;
            case Value::Tag::Double: emit(format_double(v.d)); break;
            case Value::Tag::String: emit(v.s); break;
            case Value::Tag::Endl: emit("\n"); break;
            default: trap(RuntimeFault::Unresolved, "value cannot be printed");
        }
    }

    // --- input ---------------------------------------------------------------

    void skip_ws() {
        while (in_pos_ < input_.size() && std::isspace(static_cast<unsigned char>(input_[in_pos_]))) ++in_pos_;
    }

    // Reads one value shaped like `like` (its tag). Returns nullopt at end of input.
    std::optional<Value> read_value(Value::Tag like) {
        skip_ws();
        if (in_pos_ >= input_.size()) return std::nullopt;
        const char* start = input_.data() + in_pos_;
        switch (like) {
            case Value::Tag::Char: {
                ++in_pos_;
                return Value::make_char(*start);
            }
            case Value::Tag::String: {
                size_t b = in_pos_;
                while (in_pos_ < input_.size() && !std::isspace(static_cast<unsigned char>(input_[in_pos_]))) ++in_pos_;
                return Value::make_string(std::string(input_.substr(b, in_pos_ - b)));
            }
            case Value::Tag::Double: {
                std::string tok = token_at();
                char* end = nullptr;
                double d = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str()) return std::nullopt;
                in_pos_ += static_cast<size_t>(end - tok.c_str());
                return Value::make_double(d);
            }
            default: {
                std::string tok = token_at();
                char* end = nullptr;
                long long v = std::strtoll(tok.c_str(), &end, 10);
                if (end == tok.c_str()) return std::nullopt;
                in_pos_ += static_cast<size_t>(end - tok.c_str());
                if (like == Value::Tag::Bool) return Value::make_bool(v != 0);
                return Value::make_int(v);
            }
        }
    }

    std::string token_at() const {
        size_t e = in_pos_;
        while (e < input_.size() && !std::isspace(static_cast<unsigned char>(input_[e]))) ++e;
        return std::string(input_.substr(in_pos_, e - in_pos_));
    }

    void read_into(const LRef& target) {
        Value::Tag like = target.v ? target.v->tag : Value::Tag::Char;
        auto v = read_value(like);
        if (!v) trap(RuntimeFault::InputExhausted, "input exhausted");
        ++result_.input_values;
        target.set(*v);
    }

    // --- printf / scanf --------------------------------------------------------

    Value do_printf(const Node& call) {
        std::string fmt = decode_literal(call.children[0].text);
        size_t arg = 1;
        std::string out;
        auto next_arg = [&]() -> Value {
            if (arg >= call.children.size()) trap(RuntimeFault::Unresolved, "printf: missing argument");
            return eval(call.children[arg++]);
        };
        for (size_t k = 0; k < fmt.size(); ++k) {
            if (fmt[k] != '%') {
                out += fmt[k];
                continue;
            }
            size_t start = k++;
            while (k < fmt.size() && std::string_view("-+ 0#").find(fmt[k]) != std::string_view::npos) ++k;
            while (k < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[k]))) ++k;
            if (k < fmt.size() && fmt[k] == '.') {
                ++k;
                while (k < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[k]))) ++k;
            }
            std::string flags = fmt.substr(start, k - start);
            while (k < fmt.size() && std::string_view("hlLzjt").find(fmt[k]) != std::string_view::npos) ++k;
            if (k >= fmt.size()) trap(RuntimeFault::Unresolved, "printf: bad format");
            char conv = fmt[k];
            char buf[512];
            switch (conv) {
                case '%': out += '%'; break;
                case 'd': case 'i': case 'u': case 'x': case 'X': case 'o': {
                    Value v = next_arg();
                    int64_t x = v.tag == Value::Tag::Double ? static_cast<int64_t>(v.d) : v.i;
                    std::snprintf(buf, sizeof buf, (flags + "ll" + conv).c_str(), static_cast<long long>(x));
                    out += buf;
                    break;
                }
                case 'f': case 'F': case 'e': case 'E': case 'g': case 'G': {
                    Value v = next_arg();
                    std::snprintf(buf, sizeof buf, (flags + conv).c_str(), v.as_double());
                    out += buf;
                    break;
                }
                case 'c': {
                    Value v = next_arg();
                    std::snprintf(buf, sizeof buf, (flags + 'c').c_str(), static_cast<int>(static_cast<char>(v.i)));
                    out += buf;
                    break;
                }
                case 's': {
                    Value v = next_arg();
                    if (v.tag != Value::Tag::String) trap(RuntimeFault::Unresolved, "printf: %s needs a string");
                    if (flags == "%")
                        out += v.s;
                    else {
                        std::snprintf(buf, sizeof buf, (flags + 's').c_str(), v.s.c_str());
                        out += buf;
                    }
                    break;
                }
                default:
                    trap(RuntimeFault::Unresolved, "printf: unsupported conversion");
            }
        }
        emit(out);
        return Value::make_int(static_cast<int64_t>(out.size()));
    }

    Value do_scanf(const Node& call) {
        std::string fmt = decode_literal(call.children[0].text);
        size_t arg = 1;
        int64_t assigned = 0;
        for (size_t k = 0; k < fmt.size(); ++k) {
            char c = fmt[k];
            if (std::isspace(static_cast<unsigned char>(c))) {
                skip_ws();
                continue;
            }
            if (c != '%') {
                if (in_pos_ < input_.size() && input_[in_pos_] == c) {
                    ++in_pos_;
                    continue;
                }
                break;
            }
            ++k;
            while (k < fmt.size() && std::string_view("hlLzjt").find(fmt[k]) != std::string_view::npos) ++k;
            if (k >= fmt.size()) break;
            char conv = fmt[k];
            if (conv == '%') continue;
            if (arg >= call.children.size()) trap(RuntimeFault::Unresolved, "scanf: missing argument");
            LRef target = lvalue(call.children[arg++].children[0]);
            Value::Tag like = conv == 'c' ? Value::Tag::Char
                              : conv == 's' ? Value::Tag::String
                              : (conv == 'f' || conv == 'e' || conv == 'g') ? Value::Tag::Double
                                                                            : Value::Tag::Int;
            std::optional<Value> v;
            if (like == Value::Tag::Char) {
                if (in_pos_ < input_.size()) v = Value::make_char(input_[in_pos_++]);
            } else {
                v = read_value(like);
            }
            if (!v) return Value::make_int(assigned == 0 ? -1 : assigned);
            ++result_.input_values;
            target.set(*v);
            ++assigned;
        }
        return Value::make_int(assigned);
    }

    // --- builtins ------------------------------------------------------------

    Value builtin(const std::string& name, const Node& call) {
        const auto& a = call.children;
        if (name == "printf") return do_printf(call);
        if (name == "scanf") return do_scanf(call);
        if (name == "swap") {
            LRef x = lvalue(a[0]), y = lvalue(a[1]);
            Value vx = x.get(), vy = y.get();
            if (x.v && y.v && x.v->tag == y.v->tag) {
                std::swap(*x.v, *y.v);
            } else {
                x.set(vy);
                y.set(vx);
            }
            return {};
        }
        if (name == "sqrt") {
            Value v = eval(a[0]);
            if (!v.numeric()) trap(RuntimeFault::Unresolved, "sqrt of non-number");
            return Value::make_double(std::sqrt(v.as_double()));
        }
        if (name == "abs") {
            Value v = eval(a[0]);
            if (v.tag == Value::Tag::Double) return Value::make_double(std::fabs(v.d));
            if (!v.integral()) trap(RuntimeFault::Unresolved, "abs of non-number");
            return Value::make_int(v.i < 0 ? wrap_sub(0, v.i) : v.i);
        }
        if (name == "min" || name == "max") {
            Value x = eval(a[0]), y = eval(a[1]);
            bool less = truthy(arith("<", y, x));  // y < x
            bool pick_y = name == "min" ? less : truthy(arith("<", x, y));
            Value r = pick_y ? y : x;
            if (x.tag == Value::Tag::Double || y.tag == Value::Tag::Double) return Value::make_double(r.as_double());
            return r;
        }
        trap(RuntimeFault::Unresolved, "unknown function " + name);
    }

    Value member(const Node& e) {
        const std::string& m = e.text;
        if (m == "push_back" || m == "pop_back") {
            LRef obj = lvalue(e.children[0]);
            if (!obj.v) trap(RuntimeFault::Unresolved, "method on character");
            Value& o = *obj.v;
            if (m == "push_back") {
                if (e.children.size() != 2) trap(RuntimeFault::Unresolved, "push_back arity");
                Value x = eval(e.children[1]);
                if (o.tag == Value::Tag::Vector)
                    o.elems->push_back(convert(x, o.s));
                else if (o.tag == Value::Tag::String)
                    o.s.push_back(static_cast<char>(convert(x, "char").i));
                else
                    trap(RuntimeFault::Unresolved, "push_back on scalar");
            } else {
                if (o.tag == Value::Tag::Vector && !o.elems->empty())
                    o.elems->pop_back();
                else if (o.tag == Value::Tag::String && !o.s.empty())
                    o.s.pop_back();
                else
                    trap(RuntimeFault::IndexOutOfBounds, "pop_back on empty container");
            }
            return {};
        }
        Value o = eval(e.children[0]);
        auto size_of = [&]() -> int64_t {
            if (o.tag == Value::Tag::String) return static_cast<int64_t>(o.s.size());
            if (o.tag == Value::Tag::Vector) return static_cast<int64_t>(o.elems->size());
            trap(RuntimeFault::Unresolved, m + " on non-container");
        };
        if (m == "size" || m == "length") return Value::make_int(size_of());
        if (m == "empty") return Value::make_bool(size_of() == 0);
        if (m == "c_str") {
            if (o.tag != Value::Tag::String) trap(RuntimeFault::Unresolved, "c_str on non-string");
            return o;
        }
        if (m == "back") {
            if (size_of() == 0) trap(RuntimeFault::IndexOutOfBounds, "back on empty container");
            if (o.tag == Value::Tag::String) return Value::make_char(o.s.back());
            return o.elems->back();
        }
        if (m == "substr") {
            if (o.tag != Value::Tag::String) trap(RuntimeFault::Unresolved, "substr on non-string");
            int64_t pos = e.children.size() > 1 ? convert(eval(e.children[1]), "long long").i : 0;
            int64_t len = e.children.size() > 2 ? convert(eval(e.children[2]), "long long").i
                                                : static_cast<int64_t>(o.s.size());
            if (pos < 0 || static_cast<size_t>(pos) > o.s.size()) trap(RuntimeFault::IndexOutOfBounds, "substr out of range");
            if (len < 0) len = static_cast<int64_t>(o.s.size());
            return Value::make_string(o.s.substr(static_cast<size_t>(pos), static_cast<size_t>(len)));
        }
        trap(RuntimeFault::Unresolved, "unknown method " + m);
    }

    Value eval(const Node& e) {
        using T = Value::Tag;
        switch (e.kind) {
            case NodeKind::IntLiteral: {
                const std::string& t = e.text;
                int base = 10;
                if (t.size() > 1 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) base = 16;
                else if (t.size() > 1 && t[0] == '0') base = 8;
                return Value::make_int(static_cast<int64_t>(std::strtoull(t.c_str(), nullptr, base)));
            }
            case NodeKind::FloatLiteral: return Value::make_double(std::strtod(e.text.c_str(), nullptr));
            case NodeKind::StringLiteral: return Value::make_string(decode_literal(e.text));
            case NodeKind::CharLiteral: {
                std::string d = decode_literal(e.text);
                return Value::make_char(d.empty() ? 0 : d[0]);
            }
            case NodeKind::BoolLiteral: return Value::make_bool(e.text == "true");
            case NodeKind::Identifier: {
                if (Var* v = lookup(e.text)) return *v->get();
                std::string n = strip_std(e.text);
                if (n == "cout" || n == "cin") {
                    Value s;
                    s.tag = T::Stream;
                    s.i = n == "cout" ? 1 : 0;
                    return s;
                }
                if (n == "endl") {
                    Value s;
                    s.tag = T::Endl;
                    return s;
                }
                trap(RuntimeFault::Unresolved, "unresolved identifier " + e.text);
            }
            case NodeKind::Paren: return eval(e.children[0]);
            case NodeKind::Binary: {
                const std::string& op = e.text;
                if (op == "&&") return Value::make_bool(truthy(eval(e.children[0])) && truthy(eval(e.children[1])));
                if (op == "||") return Value::make_bool(truthy(eval(e.children[0])) || truthy(eval(e.children[1])));
                Value l = eval(e.children[0]);
                if (l.tag == T::Stream) {
                    if (op == "<<" && l.i == 1) {
                        print_value(eval(e.children[1]));
                        return l;
                    }
                    if (op == ">>" && l.i == 0) {
                        read_into(lvalue(e.children[1]));
                        return l;
                    }
                    trap(RuntimeFault::Unresolved, "bad stream operation");
                }
                return arith(op, l, eval(e.children[1]));
            }
            case NodeKind::Assign: {
                LRef target = lvalue(e.children[0]);
                Value rhs = eval(e.children[1]);
                if (e.text == "=") {
                    target.set(rhs);
                } else {
                    std::string op = e.text.substr(0, e.text.size() - 1);
                    target.set(arith(op, target.get(), rhs));
                }
                return target.get();
            }
            case NodeKind::Unary: {
                const std::string& op = e.text;
                if (op == "++" || op == "--") {
                    LRef t = lvalue(e.children[0]);
                    t.set(arith(op == "++" ? "+" : "-", t.get(), Value::make_int(1)));
                    return t.get();
                }
                Value v = eval(e.children[0]);
                if (op == "!") return Value::make_bool(!truthy(v));
                if (!v.numeric()) trap(RuntimeFault::Unresolved, "bad unary operand");
                if (op == "-") return v.tag == T::Double ? Value::make_double(-v.d) : Value::make_int(wrap_sub(0, v.i));
                if (op == "+") return v.tag == T::Double ? v : Value::make_int(v.i);
                if (op == "~") {
                    if (v.tag == T::Double) trap(RuntimeFault::Unresolved, "~ on double");
                    return Value::make_int(~v.i);
                }
                trap(RuntimeFault::Unresolved, "unsupported unary " + op);
            }
            case NodeKind::Postfix: {
                LRef t = lvalue(e.children[0]);
                Value old = t.get();
                t.set(arith(e.text == "++" ? "+" : "-", old, Value::make_int(1)));
                return old;
            }
            case NodeKind::Ternary:
                return truthy(eval(e.children[0])) ? eval(e.children[1]) : eval(e.children[2]);
            case NodeKind::Index: {
                Value base = eval(e.children[0]);
                int64_t idx = convert(eval(e.children[1]), "long long").i;
                if (base.tag == T::String) {
                    if (idx < 0 || static_cast<size_t>(idx) >= base.s.size())
                        trap(RuntimeFault::IndexOutOfBounds, "string index out of range");
                    return Value::make_char(base.s[static_cast<size_t>(idx)]);
                }
                if (base.tag != T::Array && base.tag != T::Vector) trap(RuntimeFault::Unresolved, "indexing a scalar");
                if (idx < 0 || static_cast<size_t>(idx) >= base.elems->size())
                    trap(RuntimeFault::IndexOutOfBounds, "index out of range");
                return (*base.elems)[static_cast<size_t>(idx)];
            }
            case NodeKind::Call: {
                if (!e.type.empty()) return construct(resolve(e.type), e.children, 0);
                auto f = functions_.find(e.text);
                if (f != functions_.end()) {
                    std::vector<const Node*> args;
                    for (const auto& a : e.children) args.push_back(&a);
                    return call(*f->second, args);
                }
                return builtin(strip_std(e.text), e);
            }
            case NodeKind::MemberCall: return member(e);
            case NodeKind::Cast: return convert(eval(e.children[0]), resolve(e.type));
            default:
                trap(RuntimeFault::Unresolved, "cannot evaluate " + std::string(to_string(e.kind)));
        }
    }

    const Ast& ast_;
    std::string_view input_;
    size_t in_pos_ = 0;
    ExecLimits limits_;
    ExecutionResult result_;
    std::string out_;
    std::map<std::string, std::string> typedefs_;
    std::map<std::string, const Node*> functions_;
    std::vector<Frame*> frames_;
    Scope* globals_ = nullptr;
    Value ret_;
};

}  // namespace

ExecutionResult execute(const Ast& ast, std::string_view stdin_text, const ExecLimits& limits) {
    return Interpreter(ast, stdin_text, limits).run();
}

}  // namespace stylo
