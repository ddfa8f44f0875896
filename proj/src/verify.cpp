#include "stylo/verify.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "stylo/binder.hpp"
#include "stylo/parser.hpp"

namespace stylo {

namespace fs = std::filesystem;

std::string normalize_output(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        size_t end = line.find_last_not_of(" \t\r\f\v");
        out.append(line.substr(0, end == std::string_view::npos ? 0 : end + 1));
        if (nl == std::string_view::npos) break;
        out += '\n';
        start = nl + 1;
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

bool parse_number(const std::string& s, double& v) {
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !s.empty();
}

}  // namespace

bool outputs_match(std::string_view actual, const TestCase& test) {
    std::string a = normalize_output(actual);
    std::string e = normalize_output(test.expected_output);
    if (a == e) return true;
    if (!test.abs_tolerance) return false;
    auto wa = split_ws(a), we = split_ws(e);
    if (wa.size() != we.size()) return false;
    for (size_t i = 0; i < wa.size(); ++i) {
        if (wa[i] == we[i]) continue;
        double x, y;
        if (!parse_number(wa[i], x) || !parse_number(we[i], y)) return false;
        if (!(std::fabs(x - y) <= *test.abs_tolerance)) return false;
    }
    return true;
}

std::string_view to_string(ErrorFamily f) { return f == ErrorFamily::Syntax ? "syntax" : "semantic"; }

std::string_view to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::UndeclaredVariable: return "undeclared-variable";
        case ErrorCategory::RedeclaredVariable: return "redeclared-variable";
        case ErrorCategory::MissingSemicolonOrBrace: return "missing-semicolon-or-brace";
        case ErrorCategory::ReturnStatement: return "return-statement";
        case ErrorCategory::SyntaxOther: return "other";
        case ErrorCategory::MisusedVariable: return "misused-variable";
        case ErrorCategory::OutputStatement: return "output-statement";
        case ErrorCategory::InputStatement: return "input-statement";
    }
    return "?";
}

ErrorFamily family_of(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::MisusedVariable:
        case ErrorCategory::OutputStatement:
        case ErrorCategory::InputStatement:
            return ErrorFamily::Semantic;
        default:
            return ErrorFamily::Syntax;
    }
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Equivalent: return "equivalent";
        case Verdict::SyntaxFail: return "syntax-fail";
        case Verdict::SemanticFail: return "semantic-fail";
    }
    return "?";
}

namespace {

ErrorClass syntax_class(ErrorCategory c) { return {ErrorFamily::Syntax, c}; }

struct Checked {
    std::optional<Ast> ast;
    std::optional<ErrorClass> error;
    std::string detail;
};

Checked check_source(std::string_view source) {
    Checked out;
    try {
        Ast ast = parse_source(source);
        bind(ast);
        out.ast = std::move(ast);
    } catch (const SyntaxFailure& e) {
        switch (e.category()) {
            case SyntaxCategory::MissingSemicolonOrBrace:
                out.error = syntax_class(ErrorCategory::MissingSemicolonOrBrace);
                break;
            case SyntaxCategory::MalformedReturn: out.error = syntax_class(ErrorCategory::ReturnStatement); break;
            case SyntaxCategory::Other: out.error = syntax_class(ErrorCategory::SyntaxOther); break;
        }
        out.detail = e.what();
    } catch (const BindError& e) {
        switch (e.kind()) {
            case BindErrorKind::UndeclaredVariable: out.error = syntax_class(ErrorCategory::UndeclaredVariable); break;
            case BindErrorKind::RedeclaredVariable: out.error = syntax_class(ErrorCategory::RedeclaredVariable); break;
            case BindErrorKind::ReturnStatement: out.error = syntax_class(ErrorCategory::ReturnStatement); break;
            case BindErrorKind::Other: out.error = syntax_class(ErrorCategory::SyntaxOther); break;
        }
        out.detail = e.what();
    }
    return out;
}

ErrorClass semantic_class(const Ast& original, const Ast& candidate, const TestCase* failing,
                          const ExecLimits& limits) {
    if (!failing) return {ErrorFamily::Semantic, ErrorCategory::MisusedVariable};
    ExecutionResult a = execute(original, failing->input, limits);
    ExecutionResult b = execute(candidate, failing->input, limits);
    if (a.input_values != b.input_values || a.input_statements != b.input_statements)
        return {ErrorFamily::Semantic, ErrorCategory::InputStatement};
    if (a.output_statements != b.output_statements) return {ErrorFamily::Semantic, ErrorCategory::OutputStatement};
    return {ErrorFamily::Semantic, ErrorCategory::MisusedVariable};
}

}  // namespace

std::optional<ErrorClass> syntax_error_of(std::string_view source) { return check_source(source).error; }

EquivalenceVerdict check_equivalence(const Ast& original, std::string_view candidate,
                                     const std::vector<TestCase>& tests, const ExecLimits& limits) {
    if (tests.empty()) throw NoTests("no test cases to verify against");
    EquivalenceVerdict v;
    Checked c = check_source(candidate);
    if (!c.ast) {
        v.verdict = Verdict::SyntaxFail;
        v.failure = c.error;
        v.detail = c.detail;
        return v;
    }
    for (size_t i = 0; i < tests.size(); ++i) {
        ExecutionResult r = execute(*c.ast, tests[i].input, limits);
        if (r.ok() && outputs_match(r.stdout_text, tests[i])) continue;
        v.verdict = Verdict::SemanticFail;
        v.failed_case = i;
        v.failure = semantic_class(original, *c.ast, &tests[i], limits);
        v.detail = r.ok() ? "output differs" : std::string(to_string(r.status)) + ": " + r.message;
        return v;
    }
    return v;
}

ErrorClass classify_failure(const Ast& original, std::string_view candidate, const TestCase* failing,
                            const ExecLimits& limits) {
    Checked c = check_source(candidate);
    if (!c.ast) return *c.error;
    return semantic_class(original, *c.ast, failing, limits);
}

namespace {

std::string substitute(std::string cmd, const fs::path& dir, const fs::path& src, const fs::path& exe) {
    auto replace_all = [&](const std::string& key, const std::string& value) {
        for (size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size()))
            cmd.replace(pos, key.size(), value);
    };
    replace_all("{dir}", dir.string());
    replace_all("{src}", src.string());
    replace_all("{exe}", exe.string());
    return cmd;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw IoError("cannot write " + p.string());
}

std::string quoted(const std::string& cmd) {
    std::string q = "'";
    for (char c : cmd) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

}  // namespace

EquivalenceVerdict check_equivalence_external(std::string_view candidate, const std::vector<TestCase>& tests,
                                              const ExternalBackend& backend) {
    if (tests.empty()) throw NoTests("no test cases to verify against");
    static std::atomic<int> counter{0};
    fs::path dir = fs::temp_directory_path() /
                   ("stylo-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(dir);
    struct Cleanup {
        fs::path d;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(d, ec);
        }
    } cleanup{dir};
    fs::path src = dir / "candidate.cpp", exe = dir / "candidate";
    write_file(src, candidate);
    std::string timeout = "timeout " + std::to_string(backend.timeout_secs) + " ";
    EquivalenceVerdict v;
    std::string compile = timeout + "sh -c " + quoted(substitute(backend.compile_cmd, dir, src, exe)) + " >" +
                          (dir / "compile.log").string() + " 2>&1";
    if (std::system(compile.c_str()) != 0) {
        v.verdict = Verdict::SyntaxFail;
        v.failure = syntax_class(ErrorCategory::SyntaxOther);
        v.detail = read_file(dir / "compile.log");
        return v;
    }
    for (size_t i = 0; i < tests.size(); ++i) {
        fs::path in = dir / "input.txt", out = dir / "output.txt";
        write_file(in, tests[i].input);
        std::string run = timeout + "sh -c " + quoted(substitute(backend.run_cmd, dir, src, exe)) + " <" +
                          in.string() + " >" + out.string() + " 2>/dev/null";
        int rc = std::system(run.c_str());
        std::string got = read_file(out);
        if (rc == 0 && outputs_match(got, tests[i])) continue;
        v.verdict = Verdict::SemanticFail;
        v.failed_case = i;
        v.failure = ErrorClass{ErrorFamily::Semantic, ErrorCategory::MisusedVariable};
        v.detail = rc == 0 ? "output differs" : "exit status " + std::to_string(rc);
        return v;
    }
    return v;
}

}  // namespace stylo
