#include "stylo/pairgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stylo/error.hpp"
#include "stylo/parallel.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"
#include "stylo/verify.hpp"

namespace stylo {

size_t StyleSet::usable_count() const {
    size_t n = 0;
    for (const auto& v : variants) n += v.has_value();
    return n;
}

StyleSet build_style_set(const SourceUnit& unit, const std::vector<std::string>& authors, const Attributor& model,
                         const PairgenConfig& config) {
    StyleSet set;
    set.source = unit;
    set.authors = authors;
    auto own = std::find(authors.begin(), authors.end(), unit.author);
    if (own == authors.end()) throw ConfigError("unit author is not among the style authors: " + unit.author);
    set.own_index = static_cast<size_t>(own - authors.begin());
    set.variants.resize(authors.size());

    Ast ast = parse_source(unit.code);
    if (enumerate_actions(ast).empty()) throw NoActions("unit admits no transform: " + unit.challenge);
    for (size_t j = 0; j < authors.size(); ++j) {
        if (j == set.own_index) continue;
        SearchConfig sc = config.search;
        sc.seed = mix_seed(config.search.seed, j);
        EvasionResult r = evade(ast, model, Objective::targeted(authors[j]), sc);
        StyleVariant v{r.final_code, r.success, r.sequence};
        if (!check_equivalence(ast, v.code, unit.tests, config.limits).equivalent())
            v = StyleVariant{print_source(ast), false, {}};
        if (config.strict && !v.success) continue;
        set.variants[j] = std::move(v);
    }
    return set;
}

PairDataset build_pairs(const StyleSet& set) {
    if (set.style_count() < 3) throw TooFewStyles("pairs need at least 3 styles");
    std::vector<size_t> order;
    for (size_t j = 0; j < set.variants.size(); ++j)
        if (j != set.own_index && set.variants[j]) order.push_back(j);
    PairDataset d;
    for (size_t k = 0; k + 1 < order.size(); ++k) {
        size_t a = order[k], b = order[k + 1];
        d.pairs.push_back({set.variants[a]->code, set.variants[b]->code, set.source.author, a, b});
    }
    return d;
}

PairDataset build_dataset(const std::vector<SourceUnit>& units, const std::vector<std::string>& authors,
                          const Attributor& model, const PairgenConfig& config, int workers,
                          std::vector<StyleSet>* sets) {
    std::vector<StyleSet> built(units.size());
    parallel_for(units.size(), workers,
                 [&](size_t i) { built[i] = build_style_set(units[i], authors, model, config); });
    PairDataset d;
    for (const auto& s : built) {
        if (s.style_count() < 3) continue;
        auto part = build_pairs(s);
        d.pairs.insert(d.pairs.end(), part.pairs.begin(), part.pairs.end());
    }
    if (sets) *sets = std::move(built);
    return d;
}

nlohmann::json to_json(const CodePair& p) {
    return {{"src", p.source_code}, {"tgt", p.target_code}, {"author", p.source_author}, {"from", p.style_from},
            {"to", p.style_to}};
}

CodePair pair_from_json(const nlohmann::json& j) {
    try {
        return {j.at("src").get<std::string>(), j.at("tgt").get<std::string>(), j.at("author").get<std::string>(),
                j.at("from").get<size_t>(), j.at("to").get<size_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed pair record: ") + e.what());
    }
}

void export_jsonl(const PairDataset& dataset, const std::filesystem::path& path) {
    if (dataset.pairs.empty()) throw EmptyDataset("no pairs to export");
    std::ostringstream out;
    for (const auto& p : dataset.pairs) out << to_json(p).dump() << '\n';
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << out.str();
    if (!f) throw IoError("write failed: " + path.string());
}

PairDataset read_jsonl(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    PairDataset d;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        try {
            d.pairs.push_back(pair_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("malformed pair line: ") + e.what());
        }
    }
    return d;
}

}  // namespace stylo
