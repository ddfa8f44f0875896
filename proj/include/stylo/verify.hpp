/**
 * Semantic-equivalence oracle and failure taxonomy.
 *
 * A candidate is equivalent to its original when it parses, binds and
 * produces the expected output on every test case. Failures are sorted into
 * five syntax categories and three semantic ones.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/ast.hpp"
#include "stylo/interp.hpp"

namespace stylo {

struct TestCase {
    std::string input;
    std::string expected_output;
    std::optional<double> abs_tolerance;  // numeric tokens may differ by at most this much

    bool operator==(const TestCase&) const = default;
};

// Strips trailing whitespace on every line and trailing newlines.
std::string normalize_output(std::string_view text);
bool outputs_match(std::string_view actual, const TestCase& test);

enum class ErrorFamily { Syntax, Semantic };

enum class ErrorCategory {
    UndeclaredVariable,
    RedeclaredVariable,
    MissingSemicolonOrBrace,
    ReturnStatement,
    SyntaxOther,
    MisusedVariable,
    OutputStatement,
    InputStatement,
};

inline constexpr ErrorCategory kAllErrorCategories[] = {
    ErrorCategory::UndeclaredVariable, ErrorCategory::RedeclaredVariable, ErrorCategory::MissingSemicolonOrBrace,
    ErrorCategory::ReturnStatement,    ErrorCategory::SyntaxOther,        ErrorCategory::MisusedVariable,
    ErrorCategory::OutputStatement,    ErrorCategory::InputStatement,
};

std::string_view to_string(ErrorFamily f);
std::string_view to_string(ErrorCategory c);
ErrorFamily family_of(ErrorCategory c);

struct ErrorClass {
    ErrorFamily family = ErrorFamily::Syntax;
    ErrorCategory category = ErrorCategory::SyntaxOther;
    bool operator==(const ErrorClass&) const = default;
};

enum class Verdict { Equivalent, SyntaxFail, SemanticFail };
std::string_view to_string(Verdict v);

struct EquivalenceVerdict {
    Verdict verdict = Verdict::Equivalent;
    std::optional<ErrorClass> failure;
    std::optional<size_t> failed_case;
    std::string detail;

    bool equivalent() const { return verdict == Verdict::Equivalent; }
};

// Parse and bind `source`; returns the syntax class of the first problem, or
// nullopt when the program is well formed.
std::optional<ErrorClass> syntax_error_of(std::string_view source);

EquivalenceVerdict check_equivalence(const Ast& original, std::string_view candidate,
                                     const std::vector<TestCase>& tests, const ExecLimits& limits = {});

// `failing` is the test case on which the candidate diverged; it is ignored
// for syntax failures.
ErrorClass classify_failure(const Ast& original, std::string_view candidate, const TestCase* failing,
                            const ExecLimits& limits = {});

// Verification through a system compiler. Commands are run by the shell after
// substituting {src}, {exe} and {dir}; the run command reads the test input on
// stdin.
struct ExternalBackend {
    std::string compile_cmd = "g++ -std=c++17 -O2 -o {exe} {src}";
    std::string run_cmd = "{exe}";
    int timeout_secs = 10;
};

EquivalenceVerdict check_equivalence_external(std::string_view candidate, const std::vector<TestCase>& tests,
                                              const ExternalBackend& backend);

}  // namespace stylo
