#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "stylo/attrib.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"

using namespace stylo;

TEST_CASE("vocabulary counts document frequency") {
    Vocabulary v = build_vocabulary({"int a;", "int b;"}, VocabConfig{});
    REQUIRE(v.terms == std::vector<std::string>{"int", "a", "b"});
    CHECK(v.doc_freq == std::vector<int>{2, 1, 1});
    CHECK(v.n_docs == 2);
    VocabConfig one;
    one.max_terms = 1;
    CHECK(build_vocabulary({"int a;", "int b;"}, one).terms == std::vector<std::string>{"int"});
    CHECK_THROWS_AS(build_vocabulary(std::vector<std::string>{}, VocabConfig{}), EmptyCorpus);
}

TEST_CASE("character n-grams") {
    VocabConfig cfg;
    cfg.unit = VocabUnit::CharNgram;
    cfg.n = 3;
    Vocabulary v = build_vocabulary({"abc"}, cfg);
    CHECK(v.terms == std::vector<std::string>{"abc"});
    CHECK(extract_terms("abcd", cfg) == std::vector<std::string>{"abc", "bcd"});
    CHECK(extract_terms("ab", cfg).empty());
}

TEST_CASE("tfidf weights follow the smoothed formula") {
    Vocabulary v = build_vocabulary({"a a b", "a c"}, VocabConfig{});
    FeatureVector f = featurize_tfidf("a a b", v);
    double wa = 2 * (std::log(3.0 / 3.0) + 1), wb = 1 * (std::log(3.0 / 2.0) + 1);
    double n = std::sqrt(wa * wa + wb * wb);
    REQUIRE(f.entries.size() == 2);
    CHECK(f.entries[0].first == static_cast<uint32_t>(v.index_of("a")));
    CHECK(std::fabs(f.entries[0].second - wa / n) < 1e-12);
    CHECK(std::fabs(f.entries[1].second - wb / n) < 1e-12);
    CHECK(f.dim == 3);
}

TEST_CASE("tfidf edge cases") {
    Vocabulary v = build_vocabulary({"int", "int"}, VocabConfig{});
    FeatureVector single = featurize_tfidf("int", v);
    REQUIRE(single.entries.size() == 1);
    CHECK(single.entries[0].second == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(featurize_tfidf("zzz yyy", v).entries.empty());
}

TEST_CASE("tfidf is invariant to duplicating the document") {
    Vocabulary v = build_vocabulary({"int main(){int x=1; x++; return x;}", "double y; y=y*2;"}, VocabConfig{});
    std::string doc = "int main(){int x=1; x++; double y; return x;}";
    FeatureVector a = featurize_tfidf(doc, v), b = featurize_tfidf(doc + "\n" + doc, v);
    REQUIRE(a.entries.size() == b.entries.size());
    for (size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].first == b.entries[i].first);
        CHECK(std::fabs(a.entries[i].second - b.entries[i].second) < 1e-12);
    }
    CHECK(std::fabs(a.norm() - 1) < 1e-12);
    for (size_t i = 1; i < a.entries.size(); ++i) CHECK(a.entries[i - 1].first < a.entries[i].first);
}

TEST_CASE("ast features") {
    Ast one = parse_source("int main(){return 0;}");
    FeatureVector f = featurize_ast(one, "int main(){return 0;}");
    std::set<size_t> kinds;
    for (auto [i, w] : f.entries)
        if (i < static_cast<size_t>(kNodeKindCount)) kinds.insert(i);
    std::set<size_t> want = {static_cast<size_t>(NodeKind::Function), static_cast<size_t>(NodeKind::Block),
                             static_cast<size_t>(NodeKind::Return), static_cast<size_t>(NodeKind::IntLiteral)};
    CHECK(kinds == want);
    CHECK(std::fabs(f.norm() - 1) < 1e-12);

    std::string p = "int main(){int total=0; for(int i=0;i<3;i++) total+=i; return total;}";
    std::string q = "int main(){int acc=0; for(int k=0;k<3;k++) acc+=k; return acc;}";
    FeatureVector fp = featurize_ast(parse_source(p), p), fq = featurize_ast(parse_source(q), q);
    CHECK(fp.entries == fq.entries);
    std::string e = "int main(){}";
    CHECK(featurize_ast(parse_source(e), e).entries == featurize_ast(parse_source(e), e).entries);
}

TEST_CASE("layout ratios react to layout") {
    std::string a = "int main()\n{\n\treturn 0;\n}\n";
    std::string b = "int main() {\n    return 0;\n}\n";
    auto fa = featurize_ast(parse_source(a), a).dense(), fb = featurize_ast(parse_source(b), b).dense();
    size_t base = kNodeKindCount + 2;
    CHECK(fa[base] > 0);
    CHECK(fb[base] == 0);
    CHECK(fa[base + 1] > 0);
    CHECK(fb[base + 1] == 0);
}

namespace {

FeatureVector vec(std::vector<double> x) {
    FeatureVector f;
    f.dim = x.size();
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0) f.entries.emplace_back(static_cast<uint32_t>(i), x[i]);
    return f;
}

// Two blobs separated on feature 0.
void toy(std::vector<FeatureVector>& xs, std::vector<std::string>& ys, uint64_t seed, size_t dim = 6) {
    Rng rng(seed);
    for (int i = 0; i < 40; ++i) {
        std::vector<double> x(dim);
        for (auto& v : x) v = rng.uniform();
        bool a = i % 2 == 0;
        x[0] = a ? 0.1 + 0.2 * rng.uniform() : 0.7 + 0.2 * rng.uniform();
        xs.push_back(vec(x));
        ys.push_back(a ? "alice" : "bob");
    }
}

}  // namespace

TEST_CASE("single author is rejected") {
    CHECK_THROWS_AS(train_rf({vec({1, 0}), vec({0, 1})}, {"a", "a"}, ForestConfig{}), SingleClass);
}

TEST_CASE("separable data is learned and recalled") {
    std::vector<FeatureVector> xs;
    std::vector<std::string> ys;
    toy(xs, ys, 11);
    ForestConfig cfg;
    cfg.n_trees = 25;
    AttributionModel m = train_rf(xs, ys, cfg);
    size_t right = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        Prediction p = predict(m, xs[i]);
        right += p.author == ys[i];
        double s = 0;
        for (double v : p.distribution) s += v;
        CHECK(std::fabs(s - 1) < 1e-9);
    }
    CHECK(right == xs.size());
    CHECK_THROWS_AS(predict(m, vec({1, 2})), DimensionMismatch);
}

TEST_CASE("training is deterministic per seed") {
    std::vector<FeatureVector> xs;
    std::vector<std::string> ys;
    toy(xs, ys, 5);
    ForestConfig cfg;
    cfg.n_trees = 15;
    cfg.seed = 99;
    AttributionModel a = train_rf(xs, ys, cfg);
    cfg.workers = 3;
    AttributionModel b = train_rf(xs, ys, cfg);
    CHECK(to_json(a) == to_json(b));
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x(6);
        for (auto& v : x) v = rng.uniform();
        CHECK(predict(a, vec(x)).distribution == predict(b, vec(x)).distribution);
    }
}

TEST_CASE("ties resolve to the lexicographically first author") {
    AttributionModel m;
    m.author_labels = {"alice", "bob"};
    m.forest.dim = 1;
    m.forest.n_classes = 2;
    DecisionTree t;
    t.nodes.push_back({-1, 0, -1, -1, {0.5, 0.5}});
    m.forest.trees.push_back(t);
    CHECK(predict(m, vec({0.3})).author == "alice");
}

TEST_CASE("argmax survives uniform monotone rescaling of leaves") {
    std::vector<FeatureVector> xs;
    std::vector<std::string> ys;
    toy(xs, ys, 8);
    ForestConfig cfg;
    cfg.n_trees = 10;
    AttributionModel m = train_rf(xs, ys, cfg);
    AttributionModel scaled = m;
    for (auto& t : scaled.forest.trees)
        for (auto& n : t.nodes)
            for (auto& v : n.distribution) v = 3.5 * v + 0.25;
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(6);
        for (auto& v : x) v = rng.uniform();
        CHECK(predict(m, vec(x)).index == predict(scaled, vec(x)).index);
    }
}

TEST_CASE("single unbootstrapped tree fits consistent data exactly") {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (int i = 0; i < 30; ++i) {
            std::vector<double> row(5);
            for (auto& v : row) v = static_cast<double>(rng.below(4));
            x.push_back(row);
            y.push_back(static_cast<int>(rng.below(3)));
        }
        // drop rows that duplicate an earlier feature vector
        std::vector<std::vector<double>> ux;
        std::vector<int> uy;
        for (size_t i = 0; i < x.size(); ++i)
            if (std::find(ux.begin(), ux.end(), x[i]) == ux.end()) {
                ux.push_back(x[i]);
                uy.push_back(y[i]);
            }
        ForestConfig cfg;
        cfg.n_trees = 1;
        cfg.bootstrap = false;
        cfg.seed = rng.next();
        Forest f = train_forest(ux, uy, 3, cfg);
        for (size_t i = 0; i < ux.size(); ++i) CHECK(argmax(forest_distribution(f, ux[i])) == static_cast<size_t>(uy[i]));
    }
}

TEST_CASE("model serialization") {
    std::vector<FeatureVector> xs;
    std::vector<std::string> ys;
    toy(xs, ys, 2);
    ForestConfig cfg;
    cfg.n_trees = 5;
    AttributionModel m = train_rf(xs, ys, cfg, ModelKind::TfidfRf, build_vocabulary({"a b", "c"}, VocabConfig{}));
    auto j = to_json(m);
    AttributionModel back = model_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.vocabulary.index_of("c") == m.vocabulary.index_of("c"));
    auto path = std::filesystem::temp_directory_path() / "stylo-model-test.json";
    save_model(m, path);
    CHECK(to_json(load_model(path)) == j);
    std::filesystem::remove(path);
    j["format_version"] = kModelFormatVersion + 1;
    CHECK_THROWS_AS(model_from_json(j), ModelFormatError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json{{"format_version", kModelFormatVersion}}), ModelFormatError);
}

TEST_CASE("accuracy over a corpus") {
    std::vector<SourceUnit> units;
    for (int i = 0; i < 6; ++i) {
        units.push_back({"alice", "c" + std::to_string(i), "int main(){int alpha=" + std::to_string(i) + "; return alpha;}", {}});
        units.push_back({"bob", "c" + std::to_string(i), "int main(){long long beta=" + std::to_string(i) + "; return beta;}", {}});
    }
    Corpus c = Corpus::from_units(units);
    ForestConfig cfg;
    cfg.n_trees = 20;
    AttributionModel m = train_attributor(c, ModelKind::TfidfRf, VocabConfig{}, cfg);
    CHECK(evaluate_accuracy(m, c) == 1.0);
    AttributionModel a = train_attributor(c, ModelKind::AstRf, VocabConfig{}, cfg);
    CHECK(a.forest.dim == kAstFeatureDim);
    CHECK(evaluate_accuracy(a, c) >= 0.5);
}
