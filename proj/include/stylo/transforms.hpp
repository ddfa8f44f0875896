/**
 * Semantics-preserving, style-changing rewrites over the AST.
 *
 * Each action names a transform and a site (a node path plus an optional
 * payload such as the new identifier for a rename). The action list of a
 * program is deterministic and follows source order.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stylo/ast.hpp"

namespace stylo {

enum class TransformId { T1 = 1, T2, T3, T4, T5, T6, T7, T8, T9, T10, T11, T12 };
inline constexpr int kTransformCount = 12;

enum class TransformFamily { ControlFlow, Api, Declarations, Expressions, Layout };

struct TransformInfo {
    TransformId id;
    std::string_view code;  // "T1".."T12"
    std::string_view name;
    TransformFamily family;
    std::string_view summary;
};

const std::vector<TransformInfo>& transform_catalog();
const TransformInfo& info(TransformId id);
std::string_view to_string(TransformFamily f);
TransformId transform_from_string(std::string_view code);

struct Site {
    NodePath path;
    std::string payload;
    bool operator==(const Site&) const = default;
    auto operator<=>(const Site&) const = default;
};

struct TransformAction {
    TransformId transform = TransformId::T1;
    Site site;
    bool operator==(const TransformAction&) const = default;
    auto operator<=>(const TransformAction&) const = default;
};

std::string to_string(const TransformAction& a);
nlohmann::json to_json(const TransformAction& a);
TransformAction action_from_json(const nlohmann::json& j);

// Naming schemes offered by the rename transform.
enum class NamingScheme { Camel, Snake, SingleLetter };
inline constexpr int kRenameVariableLimit = 8;
std::vector<std::string> split_words(std::string_view name);
std::string apply_scheme(std::string_view name, NamingScheme scheme);

std::vector<TransformAction> enumerate_actions(const Ast& ast);
std::vector<TransformAction> enumerate_actions(const Ast& ast, TransformId only);

// Throws InapplicableAction unless `action` is in enumerate_actions(ast).
Ast apply(const Ast& ast, const TransformAction& action);
// Same rewrite without the membership check; `action` must come from
// enumerate_actions(ast).
Ast apply_unchecked(const Ast& ast, const TransformAction& action);

}  // namespace stylo
