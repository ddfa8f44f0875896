// Style sets and source-target pairs for the sequence-to-sequence stage.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylo/attrib.hpp"
#include "stylo/corpus.hpp"
#include "stylo/mcts.hpp"

namespace stylo {

struct StyleVariant {
    std::string code;
    bool success = false;  // the targeted search reached the style's author
    std::vector<TransformAction> sequence;
    bool operator==(const StyleVariant&) const = default;
};

struct StyleSet {
    SourceUnit source;
    std::vector<std::string> authors;  // style j is authors[j]
    size_t own_index = 0;
    std::vector<std::optional<StyleVariant>> variants;  // one slot per style; own slot and dropped slots empty

    size_t style_count() const { return authors.size(); }
    size_t usable_count() const;
    bool operator==(const StyleSet&) const = default;
};

struct PairgenConfig {
    SearchConfig search;
    bool strict = false;  // drop variants whose targeted search failed
    ExecLimits limits;
};

// Runs a targeted search toward every other author and keeps the best
// equivalent variant. Throws NoActions when the unit admits no transform.
StyleSet build_style_set(const SourceUnit& unit, const std::vector<std::string>& authors, const Attributor& model,
                         const PairgenConfig& config = {});

struct CodePair {
    std::string source_code;
    std::string target_code;
    std::string source_author;
    size_t style_from = 0;
    size_t style_to = 0;
    bool operator==(const CodePair&) const = default;
};

struct PairDataset {
    std::vector<CodePair> pairs;
    bool operator==(const PairDataset&) const = default;
};

// Adjacent pairs over the usable variants in style order with the own style
// excluded; n - 2 pairs for n styles when every variant is usable. Throws
// TooFewStyles when fewer than 3 styles exist.
PairDataset build_pairs(const StyleSet& set);

// Style sets for many units in parallel, concatenated in unit order.
PairDataset build_dataset(const std::vector<SourceUnit>& units, const std::vector<std::string>& authors,
                          const Attributor& model, const PairgenConfig& config, int workers,
                          std::vector<StyleSet>* sets = nullptr);

nlohmann::json to_json(const CodePair& p);
CodePair pair_from_json(const nlohmann::json& j);

// One JSON object per line. Throws EmptyDataset (creating no file) or IoError.
void export_jsonl(const PairDataset& dataset, const std::filesystem::path& path);
PairDataset read_jsonl(const std::filesystem::path& path);

}  // namespace stylo
