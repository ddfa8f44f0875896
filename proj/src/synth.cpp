#include "stylo/synth.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "stylo/binder.hpp"
#include "stylo/error.hpp"
#include "stylo/interp.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"

namespace stylo {

namespace {

// --- random programs ------------------------------------------------------------------

enum class VarType { Int, LongLong, Char, Double, String };

struct Var {
    std::string name;
    VarType type;
    bool assignable = true;
};

class ProgramGen {
public:
    explicit ProgramGen(uint64_t seed) : rng_(seed) {}

    std::string build() {
        std::ostringstream out;
        typedef_ = rng_.chance(0.3);
        helper_ = rng_.chance(0.5);
        out << "#include <cstdio>\n#include <iostream>\n#include <string>\n#include <vector>\nusing namespace std;\n";
        if (typedef_) out << "typedef long long ll;\n";
        if (rng_.chance(0.4)) {
            std::string g1 = fresh("global"), g2 = fresh("limit");
            out << ll() << " " << g1 << " = 0, " << g2 << " = " << 1 + rng_.below(9) << ";\n";
            globals_.push_back({g1, VarType::LongLong});
            globals_.push_back({g2, VarType::LongLong});
        }
        if (helper_) {
            out << "int helper(int x, int y) {\n    int r = x * 3 - y;\n    if (r < 0)\n        r = -r;\n"
                   "    return r % 97;\n}\n";
        }
        out << "int main() {\n";
        scopes_.push_back(globals_);
        line("int a, b;");
        scopes_.back().push_back({"a", VarType::Int});
        scopes_.back().push_back({"b", VarType::Int});
        if (rng_.chance(0.5))
            line("cin >> a >> b;");
        else
            line("scanf(\"%d %d\", &a, &b);");
        int n = 4 + static_cast<int>(rng_.below(6));
        for (int i = 0; i < n; ++i) statement(0, false);
        final_output();
        line("return 0;");
        out << body_.str() << "}\n";
        return out.str();
    }

private:
    std::string ll() const { return typedef_ ? "ll" : "long long"; }

    std::string fresh(const std::string& base) {
        std::string n = base;
        for (int k = 2; used_.count(n); ++k) n = base + std::to_string(k);
        used_.insert(n);
        return n;
    }

    void line(const std::string& s) { body_ << std::string(4 * (indent_ + 1), ' ') << s << "\n"; }

    std::vector<Var> visible(std::initializer_list<VarType> types, bool need_assignable) const {
        std::vector<Var> out;
        for (const auto& sc : scopes_)
            for (const auto& v : sc)
                if (std::find(types.begin(), types.end(), v.type) != types.end() &&
                    (!need_assignable || v.assignable))
                    out.push_back(v);
        return out;
    }

    std::string numeric_leaf() {
        auto vars = visible({VarType::Int, VarType::LongLong, VarType::Char}, false);
        if (vars.empty() || rng_.chance(0.3)) return std::to_string(rng_.below(10));
        return rng_.pick(vars).name;
    }

    std::string expr(int depth) {
        if (depth >= 2 || rng_.chance(0.35)) return numeric_leaf();
        switch (rng_.below(7)) {
            case 0: return expr(depth + 1) + " + " + expr(depth + 1);
            case 1: return expr(depth + 1) + " - " + expr(depth + 1);
            case 2: return "(" + expr(depth + 1) + " + " + numeric_leaf() + ") * " + std::to_string(1 + rng_.below(4));
            case 3: return "(" + expr(depth + 1) + ") % " + std::to_string(2 + rng_.below(8));
            case 4:
                if (helper_) return "helper(" + expr(depth + 1) + ", " + numeric_leaf() + ")";
                return "max(" + as_ll(expr(depth + 1)) + ", " + as_ll(numeric_leaf()) + ")";
            case 5: return "min(" + as_ll(numeric_leaf()) + ", " + as_ll(expr(depth + 1)) + ")";
            default: return "abs((int)(" + expr(depth + 1) + "))";
        }
    }

    std::string as_ll(const std::string& e) const { return "(" + ll() + ")(" + e + ")"; }

    std::string cond() {
        switch (rng_.below(4)) {
            case 0: return numeric_leaf() + " < " + expr(1);
            case 1: return "(" + expr(1) + ") % 2 == 0";
            case 2: return numeric_leaf() + " > " + numeric_leaf() + " && " + numeric_leaf() + " != 0";
            default: return "!(" + numeric_leaf() + " >= " + numeric_leaf() + ")";
        }
    }

    void declare(VarType t, const std::string& name) {
        scopes_.back().push_back({name, t});
    }

    void block_open(const std::string& head) {
        line(head + " {");
        ++indent_;
        scopes_.emplace_back();
    }

    void block_close() {
        scopes_.pop_back();
        --indent_;
        line("}");
    }

    void body(int depth, bool in_loop, int n) {
        for (int i = 0; i < n; ++i) statement(depth, in_loop);
    }

    // A single statement after an unbraced head.
    void simple_after(const std::string& head, bool in_loop) {
        line(head);
        ++indent_;
        scopes_.emplace_back();
        simple(in_loop);
        scopes_.pop_back();
        --indent_;
    }

    void simple(bool in_loop) {
        auto targets = visible({VarType::Int, VarType::LongLong}, true);
        if (in_loop && rng_.chance(0.15)) {
            line(rng_.chance(0.5) ? "continue;" : "break;");
        } else if (!targets.empty() && rng_.chance(0.8)) {
            update(rng_.pick(targets).name);
        } else {
            output_one();
        }
    }

    void update(const std::string& x) {
        switch (rng_.below(6)) {
            case 0: line(x + " = " + x + " + " + expr(1) + ";"); break;
            case 1: line(x + " += " + expr(1) + ";"); break;
            case 2: line(x + "++;"); break;
            case 3: line(x + " -= 1;"); break;
            case 4: line(x + " = " + x + " - 1;"); break;
            default: line(x + " = " + expr(0) + ";"); break;
        }
    }

    void output_one() {
        auto vars = visible({VarType::Int, VarType::LongLong, VarType::Char}, false);
        if (vars.empty()) return;
        const Var& v = rng_.pick(vars);
        if (rng_.chance(0.5)) {
            const char* spec = v.type == VarType::Int ? "%d" : v.type == VarType::Char ? "%c" : "%lld";
            line("printf(\"" + v.name + "=" + spec + "\\n\", " + v.name + ");");
        } else {
            line("cout << \"" + v.name + " \" << " + v.name + " << endl;");
        }
    }

    void statement(int depth, bool in_loop) {
        int kind = static_cast<int>(rng_.below(depth >= 2 ? 4 : 9));
        switch (kind) {
            case 0: {
                std::string n = fresh(rng_.pick(words_));
                bool is_ll = rng_.chance(0.4);
                line((is_ll ? ll() : std::string("int")) + " " + n + " = " + expr(0) + ";");
                declare(is_ll ? VarType::LongLong : VarType::Int, n);
                break;
            }
            case 1: {
                std::string p = fresh(rng_.pick(words_)), q = fresh(rng_.pick(words_));
                line("int " + p + " = " + expr(1) + ", " + q + " = " + expr(1) + ";");
                declare(VarType::Int, p);
                declare(VarType::Int, q);
                break;
            }
            case 2: simple(in_loop); break;
            case 3: {
                std::string n = fresh(rng_.pick(words_));
                line("int " + n + ";");
                if (rng_.chance(0.5)) output_one();
                line(n + " = " + expr(0) + ";");
                declare(VarType::Int, n);
                break;
            }
            case 4: {
                std::string c = cond();
                bool has_else = rng_.chance(0.6);
                if (rng_.chance(0.4)) {
                    simple_after("if (" + c + ")", in_loop);
                } else {
                    block_open("if (" + c + ")");
                    body(depth + 1, in_loop, 1 + static_cast<int>(rng_.below(2)));
                    block_close();
                }
                if (has_else) {
                    if (rng_.chance(0.5)) {
                        simple_after("else", in_loop);
                    } else {
                        block_open("else");
                        body(depth + 1, in_loop, 1 + static_cast<int>(rng_.below(2)));
                        block_close();
                    }
                }
                break;
            }
            case 5: {
                std::string i = fresh(depth == 0 ? "i" : depth == 1 ? "j" : "k");
                std::string bound = rng_.chance(0.5) ? std::to_string(1 + rng_.below(6)) : "a % 5 + 1";
                std::string step = rng_.chance(0.5) ? i + "++" : rng_.chance(0.5) ? "++" + i : i + " += 1";
                block_open("for (int " + i + " = 0; " + i + " < " + bound + "; " + step + ")");
                scopes_.back().push_back({i, VarType::Int, false});
                if (rng_.chance(0.4)) line("if (" + i + " % 3 == " + std::to_string(rng_.below(3)) + ") continue;");
                body(depth + 1, true, 1 + static_cast<int>(rng_.below(3)));
                if (rng_.chance(0.2)) line("if (" + i + " == 3) break;");
                block_close();
                break;
            }
            case 6: {
                std::string w = fresh("w");
                line("int " + w + " = 0;");
                declare(VarType::Int, w);
                scopes_.back().back().assignable = false;
                block_open("while (" + w + " < " + std::to_string(1 + rng_.below(5)) + ")");
                body(depth + 1, false, 1 + static_cast<int>(rng_.below(2)));
                line(w + "++;");
                block_close();
                break;
            }
            case 7: {
                std::string v = fresh("vec");
                line("vector<" + ll() + "> " + v + "(6, 0);");
                std::string k = fresh("p");
                block_open("for (int " + k + " = 0; " + k + " < 6; " + k + "++)");
                scopes_.back().push_back({k, VarType::Int, false});
                line(v + "[" + k + "] = " + expr(1) + ";");
                block_close();
                std::string s = fresh("acc");
                line(ll() + " " + s + " = " + v + "[" + std::to_string(rng_.below(6)) + "] + " + v + "[5];");
                declare(VarType::LongLong, s);
                break;
            }
            default: {
                switch (rng_.below(3)) {
                    case 0: {
                        std::string c = fresh("ch");
                        line("char " + c + " = 'a' + a % 26;");
                        declare(VarType::Char, c);
                        scopes_.back().back().assignable = false;
                        break;
                    }
                    case 1: {
                        std::string d = fresh("ratio");
                        line("double " + d + " = (" + expr(1) + ") / 4.0;");
                        line(rng_.chance(0.5) ? "printf(\"%.3f\\n\", " + d + ");" : "cout << " + d + " << endl;");
                        break;
                    }
                    default: {
                        std::string s = fresh("label");
                        line("string " + s + " = \"x\";");
                        line(s + " += \"y\";");
                        line(rng_.chance(0.5) ? "printf(\"%s\\n\", " + s + ".c_str());"
                                              : "cout << " + s + " << endl;");
                        break;
                    }
                }
                break;
            }
        }
    }

    void final_output() {
        auto vars = visible({VarType::Int, VarType::LongLong, VarType::Char}, false);
        std::vector<Var> picked;
        for (const auto& v : vars)
            if (rng_.chance(0.6) && picked.size() < 4) picked.push_back(v);
        if (picked.empty()) picked.push_back(vars.front());
        if (rng_.chance(0.5)) {
            std::string fmt, args;
            for (const auto& v : picked) {
                fmt += (fmt.empty() ? "" : " ") +
                       std::string(v.type == VarType::Int ? "%d" : v.type == VarType::Char ? "%c" : "%lld");
                args += ", " + v.name;
            }
            line("printf(\"" + fmt + "\\n\"" + args + ");");
        } else {
            std::string chain = "cout";
            for (size_t i = 0; i < picked.size(); ++i)
                chain += (i ? " << \" \" << " : " << ") + picked[i].name;
            line(chain + " << endl;");
        }
    }

    Rng rng_;
    bool typedef_ = false;
    bool helper_ = false;
    int indent_ = 0;
    std::ostringstream body_;
    std::vector<Var> globals_;
    std::vector<std::vector<Var>> scopes_;
    std::set<std::string> used_{"a", "b", "main", "helper", "x", "y", "r", "ll"};
    std::vector<std::string> words_{"total", "count", "value", "maxVal", "min_val", "result", "tmp",
                                    "sumAll", "best_score", "cur", "prev", "stepSize", "offset"};
};

std::vector<TestCase> make_tests(const Ast& ast, const std::vector<std::string>& inputs) {
    std::vector<TestCase> tests;
    for (const auto& in : inputs) {
        auto r = execute(ast, in);
        if (!r.ok()) throw Error("generated program failed: " + r.message);
        tests.push_back({in, r.stdout_text, {}});
    }
    return tests;
}

}  // namespace

GeneratedProgram generate_program(uint64_t seed, int n_tests) {
    for (uint64_t attempt = 0;; ++attempt) {
        ProgramGen g(mix_seed(seed, attempt));
        GeneratedProgram p;
        p.source = g.build();
        Ast ast = parse_source(p.source);
        Rng in(mix_seed(seed ^ 0x5eedULL, attempt));
        std::vector<std::string> inputs;
        for (int t = 0; t < n_tests; ++t)
            inputs.push_back(std::to_string(in.below(40)) + " " + std::to_string(in.below(40)) + "\n");
        try {
            p.tests = make_tests(ast, inputs);
        } catch (const Error&) {
            continue;
        }
        return p;
    }
}

std::vector<GeneratedProgram> generate_programs(size_t count, uint64_t seed, int n_tests) {
    std::vector<GeneratedProgram> out;
    for (size_t i = 0; i < count; ++i) out.push_back(generate_program(mix_seed(seed, i), n_tests));
    return out;
}

// --- authored corpus ------------------------------------------------------------------

namespace {

struct Challenge {
    const char* source;
    std::vector<std::string> (*inputs)(Rng&);
};

std::vector<std::string> cases_of(Rng& r, int n_cases, const std::function<std::string(Rng&)>& one) {
    std::string in = std::to_string(n_cases) + "\n";
    for (int i = 0; i < n_cases; ++i) in += one(r);
    return {in};
}

const std::vector<Challenge>& challenges() {
    static const std::vector<Challenge> c = {
        {"#include <iostream>\nusing namespace std;\n"
         "int main() {\n    int t;\n    cin >> t;\n    for (int tc = 1; tc <= t; tc++) {\n        long long n;\n"
         "        cin >> n;\n        long long sum = 0;\n        for (long long i = 1; i <= n; i++) {\n"
         "            if (i % 3 == 0) continue;\n            sum += i;\n        }\n"
         "        cout << \"Case #\" << tc << \": \" << sum << endl;\n    }\n    return 0;\n}\n",
         [](Rng& r) { return cases_of(r, 3, [](Rng& q) { return std::to_string(q.below(50)) + "\n"; }); }},
        {"#include <iostream>\n#include <vector>\nusing namespace std;\n"
         "int main() {\n    int n;\n    cin >> n;\n    vector<long long> a(n);\n"
         "    for (int i = 0; i < n; i++) cin >> a[i];\n    long long best = a[0];\n    int pos = 0;\n"
         "    for (int i = 1; i < n; i++) {\n        if (a[i] > best) {\n            best = a[i];\n"
         "            pos = i;\n        }\n    }\n    cout << best << \" \" << pos << endl;\n    return 0;\n}\n",
         [](Rng& r) {
             int n = 1 + static_cast<int>(r.below(8));
             std::string in = std::to_string(n) + "\n";
             for (int i = 0; i < n; ++i) in += std::to_string(static_cast<int>(r.below(200)) - 100) + " ";
             return std::vector<std::string>{in + "\n"};
         }},
        {"#include <cstdio>\nusing namespace std;\n"
         "int main() {\n    int t;\n    scanf(\"%d\", &t);\n    for (int tc = 1; tc <= t; tc++) {\n"
         "        long long x;\n        scanf(\"%lld\", &x);\n        int digits = 0;\n        int odd = 0;\n"
         "        while (x > 0) {\n            if (x % 2 == 1) odd++;\n            digits++;\n"
         "            x = x / 10;\n        }\n        printf(\"Case #%d: %d %d\\n\", tc, digits, odd);\n    }\n"
         "    return 0;\n}\n",
         [](Rng& r) { return cases_of(r, 3, [](Rng& q) { return std::to_string(q.below(1000000)) + "\n"; }); }},
        {"#include <iostream>\nusing namespace std;\n"
         "int main() {\n    int n;\n    cin >> n;\n    long long prev = 0, cur = 1;\n"
         "    for (int i = 0; i < n; i++) {\n        long long next = (prev + cur) % 1000000007;\n"
         "        prev = cur;\n        cur = next;\n    }\n    cout << prev << endl;\n    return 0;\n}\n",
         [](Rng& r) { return std::vector<std::string>{std::to_string(r.below(90)) + "\n"}; }},
        {"#include <iostream>\n#include <string>\nusing namespace std;\n"
         "int main() {\n    string s;\n    cin >> s;\n    int vowels = 0;\n    string rev = \"\";\n"
         "    for (int i = 0; i < s.size(); i++) {\n        char c = s[i];\n"
         "        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') vowels++;\n"
         "        rev = c + rev;\n    }\n    cout << rev << \" \" << vowels << endl;\n    return 0;\n}\n",
         [](Rng& r) {
             std::string s;
             int n = 1 + static_cast<int>(r.below(10));
             for (int i = 0; i < n; ++i) s += static_cast<char>('a' + r.below(26));
             return std::vector<std::string>{s + "\n"};
         }},
        {"#include <cstdio>\nusing namespace std;\n"
         "int main() {\n    int t;\n    scanf(\"%d\", &t);\n    for (int tc = 1; tc <= t; tc++) {\n        int n;\n"
         "        scanf(\"%d\", &n);\n        bool prime = n >= 2;\n        for (int d = 2; d * d <= n; d++) {\n"
         "            if (n % d == 0) {\n                prime = false;\n                break;\n            }\n"
         "        }\n        if (prime) printf(\"Case #%d: YES\\n\", tc);\n"
         "        else printf(\"Case #%d: NO\\n\", tc);\n    }\n    return 0;\n}\n",
         [](Rng& r) { return cases_of(r, 4, [](Rng& q) { return std::to_string(q.below(500)) + "\n"; }); }},
        {"#include <iostream>\nusing namespace std;\n"
         "long long gcd(long long a, long long b) {\n    if (b == 0) return a;\n    return gcd(b, a % b);\n}\n"
         "int main() {\n    int t;\n    cin >> t;\n    for (int tc = 1; tc <= t; tc++) {\n        long long x, y;\n"
         "        cin >> x >> y;\n        long long g = gcd(x, y);\n        long long l = x / g * y;\n"
         "        cout << \"Case #\" << tc << \": \" << g << \" \" << l << endl;\n    }\n    return 0;\n}\n",
         [](Rng& r) {
             return cases_of(r, 3, [](Rng& q) {
                 return std::to_string(1 + q.below(300)) + " " + std::to_string(1 + q.below(300)) + "\n";
             });
         }},
        {"#include <iostream>\nusing namespace std;\n"
         "int main() {\n    int n, m;\n    cin >> n >> m;\n    long long total = 0;\n    int count = 0;\n"
         "    for (int i = 0; i < n; i++) {\n        for (int j = 0; j < m; j++) {\n"
         "            if ((i + j) % 3 == 0) continue;\n            total = total + i * j;\n"
         "            count++;\n        }\n    }\n    if (count > 0) cout << total << \" \" << count << endl;\n"
         "    else cout << \"none\" << endl;\n    return 0;\n}\n",
         [](Rng& r) {
             return std::vector<std::string>{std::to_string(r.below(7)) + " " + std::to_string(r.below(7)) + "\n"};
         }},
    };
    return c;
}

// Canonical identifiers grouped by role; an author names every member of a
// role with one personal word.
const std::map<std::string, std::string>& role_of() {
    static const std::map<std::string, std::string> m = {
        {"t", "tests"},  {"tc", "case"},    {"n", "size"},     {"m", "size"},   {"i", "loop"},   {"j", "loop"},
        {"d", "loop"},   {"sum", "acc"},    {"total", "acc"},  {"count", "acc"}, {"best", "acc"}, {"digits", "acc"},
        {"odd", "acc"},  {"vowels", "acc"}, {"g", "acc"},      {"l", "acc"},    {"rev", "acc"},  {"prime", "acc"},
        {"x", "input"},  {"y", "input"},    {"s", "input"},    {"a", "input"},  {"c", "temp"},   {"prev", "temp"},
        {"cur", "temp"}, {"next", "temp"},  {"pos", "temp"},
    };
    return m;
}

const std::map<std::string, std::vector<std::string>>& role_words() {
    static const std::map<std::string, std::vector<std::string>> m = {
        {"tests", {"t", "T", "tests", "cases", "q", "nt", "num_tests", "testCount"}},
        {"case", {"tc", "cs", "kase", "case_no", "ti", "test_id", "caseNum", "cas"}},
        {"size", {"n", "N", "len", "sz", "num", "cnt", "lim", "size_n"}},
        {"loop", {"i", "idx", "k", "it", "p", "ii", "pos_i", "r"}},
        {"acc", {"ans", "res", "result", "acc", "answer", "ret", "out", "tot"}},
        {"input", {"x", "val", "v", "in_val", "inp", "num_in", "item", "input_val"}},
        {"temp", {"tmp", "temp", "aux", "cur_val", "w", "z", "buf", "hold"}},
    };
    return m;
}

std::string cased(const std::string& word, NamingScheme scheme) {
    auto parts = split_words(word);
    if (parts.size() < 2 || scheme == NamingScheme::SingleLetter) return word;
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        std::string w = parts[i];
        if (scheme == NamingScheme::Camel && i > 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        out += (scheme == NamingScheme::Snake && i > 0 ? "_" : "") + w;
    }
    return out;
}

Ast rename_with_lexicon(const Ast& ast, const StyleSignature& style) {
    Bindings b = bind(ast);
    Ast out = ast;
    std::set<std::string> used;
    for (const auto& n : all_names(ast))
        if (!role_of().count(n)) used.insert(n);
    std::map<std::string, std::string> chosen;
    for (const auto& d : b.decls) {
        if (d.role == DeclRole::Function) continue;
        auto role = role_of().find(d.name);
        if (role == role_of().end()) continue;
        if (!chosen.count(d.name)) {
            Rng r(mix_seed(style.lexicon_seed, stable_hash(role->second)));
            std::string base = cased(r.pick(role_words().at(role->second)), style.naming);
            std::string name = base;
            for (int k = 2; used.count(name); ++k) name = base + std::to_string(k);
            used.insert(name);
            chosen[d.name] = name;
        }
        const std::string& name = chosen[d.name];
        Node* dn = resolve(out.root, d.path);
        dn->text = name;
        for (const auto& u : d.uses) resolve(out.root, u)->text = name;
    }
    return out;
}

Ast apply_all(Ast ast, TransformId id, const std::string& payload = {}) {
    for (int guard = 0; guard < 200; ++guard) {
        auto acts = enumerate_actions(ast, id);
        auto it = std::find_if(acts.begin(), acts.end(),
                               [&](const TransformAction& a) { return payload.empty() || a.site.payload == payload; });
        if (it == acts.end()) break;
        ast = apply(ast, *it);
    }
    return ast;
}

void rename_alias(Node& n, const std::string& alias) {
    static const std::regex word("\\bll\\b");
    if (n.kind == NodeKind::Typedef && n.text == "ll") n.text = alias;
    if (!n.type.empty()) n.type = std::regex_replace(n.type, word, alias);
    if (n.kind == NodeKind::Call && !n.type.empty()) n.text = n.type;
    for (auto& c : n.children) rename_alias(c, alias);
}

}  // namespace

namespace {

StyleSignature draw_style(Rng& r) {
    StyleSignature s;
    s.naming = static_cast<NamingScheme>(r.below(2));
    s.lexicon_seed = r.next();
    s.use_printf = r.chance(0.5);
    s.use_while = r.chance(0.5);
    static const std::vector<std::string> aliases = {"", "ll", "LL", "i64", "lint"};
    s.long_alias = r.pick(aliases);
    s.braces = r.chance(0.5);
    static const std::vector<std::string> forms = {"assign", "compound", "post", "pre"};
    s.update_form = r.pick(forms);
    s.merge_declarations = r.chance(0.5);
    s.declare_late = r.chance(0.5);
    s.swap_branches = r.chance(0.5);
    static const std::vector<std::string> indents = {"    ", "  ", "\t"};
    s.indent = r.pick(indents);
    static const std::vector<std::string> names = {"MOD", "INF", "MAXN", "LIM", "BIG", "SZ", "MX", "OO",
                                                   "base_val", "maxSize", "inf_val", "mod_p", "CAP", "N_MAX"};
    static const std::vector<std::string> values = {"1000000007", "100005", "1000000000", "200005", "998244353"};
    std::vector<std::string> pool = names;
    r.shuffle(pool);
    size_t k = 1 + r.below(3);
    for (size_t i = 0; i < k; ++i)
        s.template_lines.push_back(std::string(r.chance(0.5) ? "const int " : "const long long ") + pool[i] + " = " +
                                   r.pick(values) + ";");
    return s;
}

// Differences in the knobs that change the token stream.
int token_distance(const StyleSignature& a, const StyleSignature& b) {
    return (a.use_printf != b.use_printf) + (a.use_while != b.use_while) + (a.long_alias != b.long_alias) +
           (a.update_form != b.update_form) + (a.swap_branches != b.swap_branches);
}

}  // namespace

std::vector<StyleSignature> style_signatures(int n, uint64_t seed) {
    Rng r(mix_seed(seed, 0x5717e5ULL));
    std::vector<StyleSignature> out;
    for (int k = 0; k < n; ++k) {
        StyleSignature best = draw_style(r);
        int best_gap = -1;
        for (int attempt = 0; attempt < 200; ++attempt) {
            StyleSignature cand = attempt == 0 ? best : draw_style(r);
            int gap = 1 << 20;
            for (const auto& o : out) gap = std::min(gap, token_distance(cand, o));
            if (gap > best_gap) {
                best = cand;
                best_gap = gap;
            }
            if (gap >= 2) break;
        }
        out.push_back(best);
    }
    return out;
}

std::string apply_style(const std::string& source, const StyleSignature& style) {
    std::string text = source;
    if (!style.template_lines.empty()) {
        std::string block;
        for (const auto& l : style.template_lines) block += l + "\n";
        auto at = text.find("using namespace std;\n");
        if (at == std::string::npos) throw ConfigError("style template needs a using directive");
        text.insert(at + 21, block);
    }
    Ast ast = rename_with_lexicon(parse_source(text), style);
    if (!style.long_alias.empty()) {
        ast = apply_all(ast, TransformId::T11, "insert");
        if (style.long_alias != "ll") rename_alias(ast.root, style.long_alias);
    }
    if (style.use_while) ast = apply_all(ast, TransformId::T1);
    ast = apply_all(ast, style.use_printf ? TransformId::T4 : TransformId::T3);
    ast = apply_all(ast, TransformId::T8, style.update_form);
    if (style.declare_late) ast = apply_all(ast, TransformId::T12);
    ast = apply_all(ast, style.merge_declarations ? TransformId::T7 : TransformId::T6);
    if (style.swap_branches)
        for (const auto& a : enumerate_actions(ast, TransformId::T9)) ast = apply(ast, a);
    ast = apply_all(ast, TransformId::T10, style.braces ? "add" : "remove");
    PrintOptions opts;
    opts.indent = style.indent;
    return print_source(ast, opts);
}

const std::vector<GeneratedProgram>& challenge_programs() {
    static const std::vector<GeneratedProgram> programs = [] {
        std::vector<GeneratedProgram> out;
        for (size_t i = 0; i < challenges().size(); ++i) {
            const auto& c = challenges()[i];
            Ast ast = parse_source(c.source);
            Rng r(mix_seed(0xc4a11e9eULL, i));
            std::vector<std::string> inputs;
            for (int t = 0; t < 3; ++t)
                for (auto& in : c.inputs(r)) inputs.push_back(in);
            out.push_back({c.source, make_tests(ast, inputs)});
        }
        return out;
    }();
    return programs;
}

Corpus generate_authored_corpus(int authors, int challenges_n, uint64_t seed) {
    const auto& progs = challenge_programs();
    if (challenges_n < 1 || challenges_n > static_cast<int>(progs.size()))
        throw ConfigError("challenge count must lie in [1, " + std::to_string(progs.size()) + "]");
    if (authors < 2) throw ConfigError("at least 2 authors are needed");
    std::vector<SourceUnit> units;
    auto styles = style_signatures(authors, seed);
    for (int a = 0; a < authors; ++a) {
        std::string author = (a + 1 < 10 ? "a0" : "a") + std::to_string(a + 1);
        const StyleSignature& style = styles[static_cast<size_t>(a)];
        for (int c = 0; c < challenges_n; ++c) {
            const auto& p = progs[static_cast<size_t>(c)];
            units.push_back({author, "c" + std::to_string(c + 1), apply_style(p.source, style), p.tests});
        }
    }
    return Corpus::from_units(std::move(units));
}

}  // namespace stylo
