/**
 * Scope resolution and light static typing.
 *
 * Binding resolves every identifier occurrence to its declaration and rejects
 * programs that use undeclared names, redeclare a name in one scope, or
 * misuse `return`. Transforms, the data-flow builder and the failure
 * classifier all consume the resulting tables.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylo/ast.hpp"
#include "stylo/error.hpp"

namespace stylo {

enum class BindErrorKind {
    UndeclaredVariable,
    RedeclaredVariable,
    ReturnStatement,
    Other,
};

std::string_view to_string(BindErrorKind kind);

class BindError : public Error {
public:
    BindError(BindErrorKind kind, std::string name, int line, int column, const std::string& what);
    BindErrorKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    BindErrorKind kind_;
    std::string name_;
    int line_;
    int column_;
};

// A resolved type: base is one of int, long, long long, double, bool, char,
// string, void, vector<...>, cstr (string literal / c_str()), stream, endl,
// unknown. Arrays carry their rank separately.
struct StaticType {
    std::string base = "unknown";
    int rank = 0;

    bool is_integral() const;
    bool is_floating() const { return rank == 0 && base == "double"; }
    bool is_stringlike() const { return rank == 0 && (base == "string" || base == "cstr"); }
    bool operator==(const StaticType&) const = default;
};

enum class DeclRole { Global, Local, Param, Function };

struct Declaration {
    int id = 0;
    std::string name;
    std::string written_type;  // as spelled, may be a typedef alias
    StaticType type;
    DeclRole role = DeclRole::Local;
    bool by_ref = false;
    NodePath path;                 // Declarator, Param or Function node
    std::vector<NodePath> uses;    // Identifier nodes bound here, source order
    int scope = 0;
    int function = -1;             // decl id of the enclosing function
};

struct Bindings {
    std::vector<Declaration> decls;  // source order
    std::map<NodePath, int> use_decl;
    std::map<std::string, std::string> typedefs;  // alias -> resolved type
    std::map<std::string, int> functions;         // name -> decl id

    std::optional<int> decl_of(const NodePath& identifier_path) const;
    std::vector<const Declaration*> variables() const;  // non-function decls, source order

    // Resolve a spelled type through typedefs.
    std::string resolve_type(const std::string& written) const;

    // Static type of `expr`, which lives at `path` inside `root`.
    StaticType type_of(const Node& root, const Node& expr, const NodePath& path) const;
};

Bindings bind(const Ast& ast);

bool is_builtin_function(std::string_view name);
bool is_builtin_identifier(std::string_view name);
std::string strip_std(std::string_view name);

// Every identifier, function, typedef and declared name used anywhere.
std::vector<std::string> all_names(const Ast& ast);

}  // namespace stylo
