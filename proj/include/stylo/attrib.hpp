/**
 * Authorship attribution: TF-IDF and AST-stylometry features feeding a
 * random forest trained from scratch.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stylo/ast.hpp"
#include "stylo/corpus.hpp"

namespace stylo {

enum class VocabUnit { Word, CharNgram };

struct VocabConfig {
    VocabUnit unit = VocabUnit::Word;
    int n = 3;  // n-gram length in CharNgram mode
    size_t max_terms = 2500;
};

// Terms of one document: non-punctuation lexemes in word mode, byte n-grams
// otherwise.
std::vector<std::string> extract_terms(std::string_view source, const VocabConfig& config);

struct Vocabulary {
    VocabConfig config;
    std::vector<std::string> terms;  // (doc_freq desc, term asc)
    std::vector<int> doc_freq;
    int n_docs = 0;

    size_t size() const { return terms.size(); }
    // Index of `term`, or -1.
    long index_of(const std::string& term) const;
    double idf(size_t i) const;
    // Rebuilds the term lookup after `terms` changes.
    void reindex();

private:
    std::unordered_map<std::string, size_t> index_;
};

Vocabulary build_vocabulary(const std::vector<std::string>& documents, const VocabConfig& config);
Vocabulary build_vocabulary(const Corpus& corpus, const VocabConfig& config);

struct FeatureVector {
    std::vector<std::pair<uint32_t, double>> entries;  // strictly increasing indices
    size_t dim = 0;

    double norm() const;
    std::vector<double> dense() const;
};

void l2_normalize(FeatureVector& v);

FeatureVector featurize_tfidf(std::string_view source, const Vocabulary& vocab);

// Node-kind frequencies (root excluded), leaf depth mean and max scaled by
// 1/32, then layout ratios: tab share of indentation, share of `{` lines that
// hold nothing else, share of blank lines.
inline constexpr size_t kAstFeatureDim = static_cast<size_t>(kNodeKindCount) + 2 + 3;
FeatureVector featurize_ast(const Ast& ast, std::string_view layout);

struct ForestConfig {
    int n_trees = 300;
    int max_depth = 0;  // 0 = unlimited
    int min_leaf = 1;
    int max_features = 0;  // per split; 0 = floor(sqrt(dim))
    bool bootstrap = true;
    uint64_t seed = 1;
    int workers = 1;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::vector<double> distribution;  // leaves only
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    const std::vector<double>& leaf_distribution(const std::vector<double>& x) const;
};

struct Forest {
    std::vector<DecisionTree> trees;
    size_t n_classes = 0;
    size_t dim = 0;
};

// Labels are indices into a sorted label list.
Forest train_forest(const std::vector<std::vector<double>>& x, const std::vector<int>& y, size_t n_classes,
                    const ForestConfig& config);
std::vector<double> forest_distribution(const Forest& forest, const std::vector<double>& x);

// Anything that maps a program to a distribution over a fixed author list.
class Attributor {
public:
    virtual ~Attributor() = default;
    virtual const std::vector<std::string>& labels() const = 0;
    virtual std::vector<double> distribution(std::string_view source, const Ast& ast) const = 0;
};

enum class ModelKind { TfidfRf, AstRf };
std::string_view to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

struct Prediction {
    std::string author;
    size_t index = 0;
    std::vector<double> distribution;
};

// Index of the largest entry; ties resolve to the smallest index.
size_t argmax(const std::vector<double>& distribution);

class AttributionModel final : public Attributor {
public:
    ModelKind kind = ModelKind::TfidfRf;
    Vocabulary vocabulary;  // unused by AstRf
    Forest forest;
    std::vector<std::string> author_labels;  // sorted

    const std::vector<std::string>& labels() const override { return author_labels; }
    std::vector<double> distribution(std::string_view source, const Ast& ast) const override;
    FeatureVector featurize(std::string_view source, const Ast& ast) const;
};

inline constexpr int kModelFormatVersion = 1;

AttributionModel train_rf(const std::vector<FeatureVector>& features, const std::vector<std::string>& labels,
                          const ForestConfig& config, ModelKind kind = ModelKind::TfidfRf, Vocabulary vocabulary = {});

Prediction predict(const AttributionModel& model, const FeatureVector& features);
// Parses `source` when the model needs an AST.
Prediction predict_source(const AttributionModel& model, std::string_view source);

// Builds the vocabulary (TF-IDF only), featurizes and trains.
AttributionModel train_attributor(const Corpus& train, ModelKind kind, const VocabConfig& vocab,
                                  const ForestConfig& forest);

double evaluate_accuracy(const AttributionModel& model, const Corpus& test);

nlohmann::json to_json(const AttributionModel& model);
AttributionModel model_from_json(const nlohmann::json& j);
void save_model(const AttributionModel& model, const std::filesystem::path& path);
AttributionModel load_model(const std::filesystem::path& path);

}  // namespace stylo
