// Structural views of a parsed program: root-to-leaf kind paths and the
// def-use data-flow graph. Both feed the neural encoder and the classifier.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stylo/ast.hpp"
#include "stylo/binder.hpp"

namespace stylo {

struct LeafPath {
    Token leaf;
    std::vector<NodeKind> path;  // path.front() is the outermost kept kind
    int depth = 0;               // == path.size()
};

// One path per leaf in source order. Paths longer than `max_depth` keep the
// `max_depth` kinds nearest the leaf; the sequence stops after `max_count`.
std::vector<LeafPath> extract_leaf_paths(const Ast& ast, int max_depth, int max_count);

size_t count_leaves(const Node& node);

enum class OccurrenceRole { Def, Use, UseDef };

struct DfgNode {
    int id = 0;
    std::string name;
    int decl = -1;
    int line = 0;
    int column = 0;
    NodePath path;
    OccurrenceRole role = OccurrenceRole::Use;
};

struct DfgEdge {
    int from = 0;  // def occurrence
    int to = 0;    // use occurrence
    bool operator<(const DfgEdge& o) const { return from != o.from ? from < o.from : to < o.to; }
    bool operator==(const DfgEdge& o) const = default;
};

struct Dfg {
    std::vector<DfgNode> nodes;  // source order
    std::vector<DfgEdge> edges;  // sorted, unique
};

class UnresolvedIdentifier : public BindError {
public:
    using BindError::BindError;
};

// Throws UnresolvedIdentifier for uses of undeclared names and BindError for
// other binding failures.
Dfg build_dfg(const Ast& ast, int max_nodes);
Dfg build_dfg(const Ast& ast, const Bindings& bindings, int max_nodes);

nlohmann::json to_json(const Node& node);
nlohmann::json to_json(const Dfg& dfg);
nlohmann::json to_json(const std::vector<LeafPath>& paths);

struct EncodeLimits {
    int max_tokens = 1024;
    int max_leaf_paths = 1000;
    int max_dfg_nodes = 1000;
    int max_ast_depth = 32;
};

// Tokens, per-token leaf paths and the DFG in one document; the contract
// consumed by the neural component.
nlohmann::json encode_program(std::string_view source, const EncodeLimits& limits);

}  // namespace stylo
