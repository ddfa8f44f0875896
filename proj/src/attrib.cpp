#include "stylo/attrib.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "stylo/lexer.hpp"
#include "stylo/parallel.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"

namespace stylo {

// --- vocabulary ----------------------------------------------------------------

std::vector<std::string> extract_terms(std::string_view source, const VocabConfig& config) {
    if (config.unit == VocabUnit::Word) {
        std::vector<std::string> out;
        try {
            for (auto& t : tokenize(source).tokens)
                if (t.kind != TokenKind::Punctuation) out.push_back(std::move(t.text));
        } catch (const LexError&) {
            out = lexemes(source);
        }
        return out;
    }
    std::vector<std::string> out;
    auto n = static_cast<size_t>(std::max(1, config.n));
    if (source.size() < n) return out;
    out.reserve(source.size() - n + 1);
    for (size_t i = 0; i + n <= source.size(); ++i) out.emplace_back(source.substr(i, n));
    return out;
}

long Vocabulary::index_of(const std::string& term) const {
    auto it = index_.find(term);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
}

double Vocabulary::idf(size_t i) const {
    return std::log((1.0 + n_docs) / (1.0 + doc_freq[i])) + 1.0;
}

void Vocabulary::reindex() {
    index_.clear();
    for (size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], i);
}

Vocabulary build_vocabulary(const std::vector<std::string>& documents, const VocabConfig& config) {
    if (documents.empty()) throw EmptyCorpus("cannot build a vocabulary from zero documents");
    std::unordered_map<std::string, int> df;
    for (const auto& doc : documents) {
        auto terms = extract_terms(doc, config);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        for (auto& t : terms) ++df[t];
    }
    std::vector<std::pair<std::string, int>> ranked(df.begin(), df.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > config.max_terms) ranked.resize(config.max_terms);
    Vocabulary v;
    v.config = config;
    v.n_docs = static_cast<int>(documents.size());
    for (auto& [t, f] : ranked) {
        v.terms.push_back(t);
        v.doc_freq.push_back(f);
    }
    v.reindex();
    return v;
}

Vocabulary build_vocabulary(const Corpus& corpus, const VocabConfig& config) {
    std::vector<std::string> docs;
    for (const auto& u : corpus.units) docs.push_back(u.code);
    return build_vocabulary(docs, config);
}

// --- feature vectors ---------------------------------------------------------------

double FeatureVector::norm() const {
    double s = 0;
    for (const auto& [i, w] : entries) s += w * w;
    return std::sqrt(s);
}

std::vector<double> FeatureVector::dense() const {
    std::vector<double> out(dim, 0.0);
    for (const auto& [i, w] : entries) out[i] = w;
    return out;
}

void l2_normalize(FeatureVector& v) {
    double n = v.norm();
    if (n == 0) return;
    for (auto& e : v.entries) e.second /= n;
}

FeatureVector featurize_tfidf(std::string_view source, const Vocabulary& vocab) {
    std::map<uint32_t, double> counts;
    for (const auto& t : extract_terms(source, vocab.config)) {
        long i = vocab.index_of(t);
        if (i >= 0) counts[static_cast<uint32_t>(i)] += 1;
    }
    FeatureVector v;
    v.dim = vocab.size();
    for (const auto& [i, c] : counts) v.entries.emplace_back(i, c * vocab.idf(i));
    l2_normalize(v);
    return v;
}

FeatureVector featurize_ast(const Ast& ast, std::string_view layout) {
    std::vector<double> x(kAstFeatureDim, 0.0);
    double total = 0, leaves = 0, depth_sum = 0, depth_max = 0;
    NodePath path;
    walk(ast.root, [&](const Node& n, const NodePath& p) {
        if (p.empty()) return;
        x[static_cast<size_t>(n.kind)] += 1;
        total += 1;
        if (n.is_leaf()) {
            auto d = static_cast<double>(p.size());
            leaves += 1;
            depth_sum += d;
            depth_max = std::max(depth_max, d);
        }
    }, path);
    if (total > 0)
        for (int k = 0; k < kNodeKindCount; ++k) x[k] /= total;
    size_t base = kNodeKindCount;
    x[base] = leaves > 0 ? depth_sum / leaves / 32.0 : 0;
    x[base + 1] = depth_max / 32.0;

    double tabs = 0, spaces = 0, brace_lines = 0, lone_brace = 0, blank = 0, lines = 0;
    size_t start = 0;
    while (start < layout.size()) {
        size_t nl = layout.find('\n', start);
        std::string_view line = layout.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        lines += 1;
        size_t k = 0;
        for (; k < line.size() && (line[k] == ' ' || line[k] == '\t'); ++k) (line[k] == '\t' ? tabs : spaces) += 1;
        std::string_view rest = line.substr(k);
        while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
        if (rest.empty()) blank += 1;
        if (rest.find('{') != std::string_view::npos) {
            brace_lines += 1;
            if (rest == "{") lone_brace += 1;
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    x[base + 2] = tabs + spaces > 0 ? tabs / (tabs + spaces) : 0;
    x[base + 3] = brace_lines > 0 ? lone_brace / brace_lines : 0;
    x[base + 4] = lines > 0 ? blank / lines : 0;

    FeatureVector v;
    v.dim = kAstFeatureDim;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0) v.entries.emplace_back(static_cast<uint32_t>(i), x[i]);
    l2_normalize(v);
    return v;
}

// --- random forest -----------------------------------------------------------------

const std::vector<double>& DecisionTree::leaf_distribution(const std::vector<double>& x) const {
    int at = 0;
    while (nodes[at].feature >= 0) {
        const TreeNode& n = nodes[at];
        at = x[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[at].distribution;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& x, const std::vector<int>& y, size_t n_classes,
                const ForestConfig& cfg, uint64_t seed)
        : x_(x), y_(y), k_(n_classes), cfg_(cfg), rng_(seed) {
        dim_ = x.empty() ? 0 : x[0].size();
        mtry_ = cfg.max_features > 0 ? static_cast<size_t>(cfg.max_features)
                                     : std::max<size_t>(1, static_cast<size_t>(std::sqrt(static_cast<double>(dim_))));
        mtry_ = std::min(mtry_, std::max<size_t>(dim_, 1));
    }

    DecisionTree build() {
        std::vector<size_t> sample;
        size_t n = x_.size();
        if (cfg_.bootstrap) {
            for (size_t i = 0; i < n; ++i) sample.push_back(rng_.below(n));
        } else {
            sample.resize(n);
            std::iota(sample.begin(), sample.end(), 0);
        }
        grow(sample, 0);
        return std::move(tree_);
    }

private:
    std::vector<double> counts(const std::vector<size_t>& s) const {
        std::vector<double> c(k_, 0.0);
        for (size_t i : s) c[static_cast<size_t>(y_[i])] += 1;
        return c;
    }

    static double gini(const std::vector<double>& c, double n) {
        if (n <= 0) return 0;
        double g = 1;
        for (double v : c) g -= (v / n) * (v / n);
        return g;
    }

    int make_leaf(const std::vector<size_t>& s) {
        TreeNode leaf;
        leaf.distribution = counts(s);
        for (double& v : leaf.distribution) v /= static_cast<double>(s.size());
        tree_.nodes.push_back(std::move(leaf));
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    struct Split {
        int feature = -1;
        double threshold = 0;
        double score = 0;  // weighted child impurity
    };

    // Best threshold on one feature; feature < 0 when the feature is constant
    // or no split honours min_leaf.
    Split best_on(const std::vector<size_t>& s, size_t f) const {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(s.size());
        for (size_t i : s) vals.emplace_back(x_[i][f], y_[i]);
        std::sort(vals.begin(), vals.end());
        Split best;
        if (vals.front().first == vals.back().first) return best;
        std::vector<double> left(k_, 0.0), right(k_, 0.0);
        for (auto& [v, c] : vals) right[static_cast<size_t>(c)] += 1;
        auto n = static_cast<double>(vals.size());
        auto min_leaf = static_cast<size_t>(std::max(1, cfg_.min_leaf));
        for (size_t i = 0; i + 1 < vals.size(); ++i) {
            left[static_cast<size_t>(vals[i].second)] += 1;
            right[static_cast<size_t>(vals[i].second)] -= 1;
            if (vals[i].first == vals[i + 1].first) continue;
            size_t nl = i + 1, nr = vals.size() - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            double score = (static_cast<double>(nl) * gini(left, static_cast<double>(nl)) +
                            static_cast<double>(nr) * gini(right, static_cast<double>(nr))) / n;
            if (best.feature < 0 || score < best.score) {
                best.feature = static_cast<int>(f);
                best.threshold = (vals[i].first + vals[i + 1].first) / 2;
                best.score = score;
            }
        }
        return best;
    }

    int grow(const std::vector<size_t>& s, int depth) {
        std::vector<double> c = counts(s);
        size_t nonzero = std::count_if(c.begin(), c.end(), [](double v) { return v > 0; });
        bool stop = nonzero <= 1 || (cfg_.max_depth > 0 && depth >= cfg_.max_depth) ||
                    s.size() < 2 * static_cast<size_t>(std::max(1, cfg_.min_leaf));
        if (stop) return make_leaf(s);

        // Visit features in random order until mtry_ of them admit a split.
        std::vector<size_t> order(dim_);
        std::iota(order.begin(), order.end(), 0);
        Split best;
        size_t usable = 0;
        for (size_t i = 0; i < order.size() && usable < mtry_; ++i) {
            std::swap(order[i], order[i + rng_.below(order.size() - i)]);
            Split cand = best_on(s, order[i]);
            if (cand.feature < 0) continue;
            ++usable;
            if (best.feature < 0 || cand.score < best.score) best = cand;
        }
        if (best.feature < 0) return make_leaf(s);

        std::vector<size_t> ls, rs;
        for (size_t i : s) (x_[i][static_cast<size_t>(best.feature)] <= best.threshold ? ls : rs).push_back(i);
        int at = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes[at].feature = best.feature;
        tree_.nodes[at].threshold = best.threshold;
        int l = grow(ls, depth + 1);
        int r = grow(rs, depth + 1);
        tree_.nodes[at].left = l;
        tree_.nodes[at].right = r;
        return at;
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<int>& y_;
    size_t k_;
    const ForestConfig& cfg_;
    Rng rng_;
    size_t dim_ = 0;
    size_t mtry_ = 1;
    DecisionTree tree_;
};

}  // namespace

Forest train_forest(const std::vector<std::vector<double>>& x, const std::vector<int>& y, size_t n_classes,
                    const ForestConfig& config) {
    if (x.size() != y.size() || x.empty()) throw Error("feature and label counts differ or are zero");
    if (config.n_trees < 1) throw ConfigError("n_trees must be positive");
    Forest f;
    f.n_classes = n_classes;
    f.dim = x[0].size();
    for (const auto& row : x)
        if (row.size() != f.dim) throw DimensionMismatch("training rows differ in dimension");
    f.trees.resize(static_cast<size_t>(config.n_trees));
    parallel_for(f.trees.size(), config.workers, [&](size_t t) {
        f.trees[t] = TreeBuilder(x, y, n_classes, config, mix_seed(config.seed, t)).build();
    });
    return f;
}

std::vector<double> forest_distribution(const Forest& forest, const std::vector<double>& x) {
    if (x.size() != forest.dim) throw DimensionMismatch("feature dimension does not match the model");
    std::vector<double> p(forest.n_classes, 0.0);
    for (const auto& t : forest.trees) {
        const auto& d = t.leaf_distribution(x);
        for (size_t k = 0; k < p.size(); ++k) p[k] += d[k];
    }
    for (double& v : p) v /= static_cast<double>(forest.trees.size());
    return p;
}

// --- models ------------------------------------------------------------------------

std::string_view to_string(ModelKind k) { return k == ModelKind::TfidfRf ? "tfidf-rf" : "ast-rf"; }

ModelKind model_kind_from_string(std::string_view s) {
    if (s == "tfidf-rf") return ModelKind::TfidfRf;
    if (s == "ast-rf") return ModelKind::AstRf;
    throw ConfigError("unknown model kind: " + std::string(s));
}

size_t argmax(const std::vector<double>& d) {
    size_t best = 0;
    for (size_t i = 1; i < d.size(); ++i)
        if (d[i] > d[best]) best = i;
    return best;
}

FeatureVector AttributionModel::featurize(std::string_view source, const Ast& ast) const {
    return kind == ModelKind::TfidfRf ? featurize_tfidf(source, vocabulary) : featurize_ast(ast, source);
}

std::vector<double> AttributionModel::distribution(std::string_view source, const Ast& ast) const {
    return predict(*this, featurize(source, ast)).distribution;
}

AttributionModel train_rf(const std::vector<FeatureVector>& features, const std::vector<std::string>& labels,
                          const ForestConfig& config, ModelKind kind, Vocabulary vocabulary) {
    if (features.size() != labels.size()) throw Error("feature and label counts differ");
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() < 2) throw SingleClass("training data must contain at least two authors");
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    size_t dim = features[0].dim;
    for (size_t i = 0; i < features.size(); ++i) {
        if (features[i].dim != dim) throw DimensionMismatch("training features differ in dimension");
        x.push_back(features[i].dense());
        y.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin()));
    }
    AttributionModel m;
    m.kind = kind;
    m.vocabulary = std::move(vocabulary);
    m.author_labels = std::move(sorted);
    m.forest = train_forest(x, y, m.author_labels.size(), config);
    return m;
}

Prediction predict(const AttributionModel& model, const FeatureVector& features) {
    if (features.dim != model.forest.dim) throw DimensionMismatch("feature dimension does not match the model");
    Prediction p;
    p.distribution = forest_distribution(model.forest, features.dense());
    p.index = argmax(p.distribution);
    p.author = model.author_labels[p.index];
    return p;
}

Prediction predict_source(const AttributionModel& model, std::string_view source) {
    if (model.kind == ModelKind::TfidfRf) return predict(model, featurize_tfidf(source, model.vocabulary));
    return predict(model, featurize_ast(parse_source(source), source));
}

AttributionModel train_attributor(const Corpus& train, ModelKind kind, const VocabConfig& vocab,
                                  const ForestConfig& forest) {
    if (train.units.empty()) throw EmptyCorpus("no training units");
    Vocabulary v;
    if (kind == ModelKind::TfidfRf) v = build_vocabulary(train, vocab);
    std::vector<FeatureVector> xs;
    std::vector<std::string> ys;
    for (const auto& u : train.units) {
        xs.push_back(kind == ModelKind::TfidfRf ? featurize_tfidf(u.code, v) : featurize_ast(parse_source(u.code), u.code));
        ys.push_back(u.author);
    }
    return train_rf(xs, ys, forest, kind, std::move(v));
}

double evaluate_accuracy(const AttributionModel& model, const Corpus& test) {
    if (test.units.empty()) return 0;
    size_t correct = 0;
    for (const auto& u : test.units) correct += predict_source(model, u.code).author == u.author;
    return static_cast<double>(correct) / static_cast<double>(test.units.size());
}

// --- serialization ---------------------------------------------------------------------

nlohmann::json to_json(const AttributionModel& m) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : m.forest.trees) {
        nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                       left = nlohmann::json::array(), right = nlohmann::json::array(),
                       dist = nlohmann::json::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            dist.push_back(n.distribution);
        }
        trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
                         {"distribution", dist}});
    }
    const auto& v = m.vocabulary;
    nlohmann::json vocab{{"unit", v.config.unit == VocabUnit::Word ? "word" : "char-ngram"},
                         {"n", v.config.n},
                         {"max_terms", v.config.max_terms},
                         {"n_docs", v.n_docs},
                         {"terms", v.terms},
                         {"doc_freq", v.doc_freq}};
    return {{"format_version", kModelFormatVersion},
            {"kind", std::string(to_string(m.kind))},
            {"labels", m.author_labels},
            {"dim", m.forest.dim},
            {"vocabulary", vocab},
            {"trees", trees}};
}

AttributionModel model_from_json(const nlohmann::json& j) {
    try {
        if (!j.contains("format_version") || j.at("format_version").get<int>() != kModelFormatVersion)
            throw ModelFormatError("unsupported model format version");
        AttributionModel m;
        m.kind = model_kind_from_string(j.at("kind").get<std::string>());
        m.author_labels = j.at("labels").get<std::vector<std::string>>();
        const auto& jv = j.at("vocabulary");
        m.vocabulary.config.unit = jv.at("unit").get<std::string>() == "word" ? VocabUnit::Word : VocabUnit::CharNgram;
        m.vocabulary.config.n = jv.at("n").get<int>();
        m.vocabulary.config.max_terms = jv.at("max_terms").get<size_t>();
        m.vocabulary.n_docs = jv.at("n_docs").get<int>();
        m.vocabulary.terms = jv.at("terms").get<std::vector<std::string>>();
        m.vocabulary.doc_freq = jv.at("doc_freq").get<std::vector<int>>();
        m.vocabulary.reindex();
        m.forest.dim = j.at("dim").get<size_t>();
        m.forest.n_classes = m.author_labels.size();
        for (const auto& jt : j.at("trees")) {
            DecisionTree t;
            auto feature = jt.at("feature").get<std::vector<int>>();
            auto threshold = jt.at("threshold").get<std::vector<double>>();
            auto left = jt.at("left").get<std::vector<int>>();
            auto right = jt.at("right").get<std::vector<int>>();
            auto dist = jt.at("distribution").get<std::vector<std::vector<double>>>();
            for (size_t i = 0; i < feature.size(); ++i)
                t.nodes.push_back({feature[i], threshold[i], left[i], right[i], dist[i]});
            m.forest.trees.push_back(std::move(t));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed model: ") + e.what());
    }
}

void save_model(const AttributionModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    out << to_json(model).dump() << "\n";
    if (!out) throw IoError("cannot write model to " + path.string());
}

AttributionModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read model from " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed model: ") + e.what());
    }
    return model_from_json(j);
}

}  // namespace stylo
