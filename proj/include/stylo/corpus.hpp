/**
 * Corpus ingestion and deterministic splitting.
 *
 * Layout: <root>/<author>/<challenge>.cpp with optional test files
 * <root>/<author>/tests/<challenge>.<N>.in and .out.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stylo/verify.hpp"

namespace stylo {

struct SourceUnit {
    std::string author;
    std::string challenge;
    std::string code;
    std::vector<TestCase> tests;

    bool operator==(const SourceUnit&) const = default;
};

struct Rejection {
    std::string path;
    std::string reason;
    bool operator==(const Rejection&) const = default;
};

struct Corpus {
    std::vector<SourceUnit> units;     // sorted by (author, challenge)
    std::vector<std::string> authors;  // sorted, distinct
    std::vector<Rejection> rejected;   // ingestion report

    static Corpus from_units(std::vector<SourceUnit> units);
    size_t author_index(const std::string& author) const;  // throws Error when absent
    bool operator==(const Corpus&) const = default;
};

bool valid_utf8(std::string_view bytes);

Corpus ingest_corpus(const std::filesystem::path& root, int workers = 1);

// Stratified per author: round(fraction * n) units train, clamped to [1, n-1].
std::pair<Corpus, Corpus> split_dataset(const Corpus& corpus, uint64_t seed, double train_fraction);

// Writes the corpus back out in the ingestion layout.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

void write_rejections(const Corpus& corpus, std::ostream& out);

nlohmann::json to_json(const SourceUnit& unit);
nlohmann::json to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);

}  // namespace stylo
