#include "stylo/mcts.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>

#include "stylo/error.hpp"
#include "stylo/parser.hpp"
#include "stylo/rng.hpp"

namespace stylo {

nlohmann::json to_json(const EvasionResult& r) {
    nlohmann::json seq = nlohmann::json::array();
    for (const auto& a : r.sequence) seq.push_back(to_json(a));
    nlohmann::json j = {{"success", r.success},
                        {"final_code", r.final_code},
                        {"predicted", r.predicted},
                        {"true_author", r.true_author},
                        {"sequence", seq},
                        {"iterations_used", r.iterations_used},
                        {"reward", r.reward}};
    j["target"] = r.target ? nlohmann::json(*r.target) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const TraceEvent& e) {
    return {{"iteration", e.iteration},
            {"depth", e.depth},
            {"reward", e.reward},
            {"action", e.action ? to_json(*e.action) : nlohmann::json(nullptr)}};
}

namespace {

size_t label_index(const Attributor& model, const std::string& author) {
    const auto& labels = model.labels();
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == author) return i;
    throw ConfigError("author not known to the model: " + author);
}

struct Evaluation {
    double reward = 0.0;
    std::string predicted;
    bool success = false;
};

class Evaluator {
public:
    Evaluator(const Attributor& model, const Objective& objective)
        : model_(model), objective_(objective), index_(label_index(model, objective.author)) {}

    const Evaluation& operator()(const Ast& ast, std::string* source_out = nullptr) {
        std::string source = print_source(ast);
        auto it = cache_.find(source);
        if (it == cache_.end()) {
            auto dist = model_.distribution(source, ast);
            Evaluation e;
            double p = dist[index_];
            e.reward = objective_.kind == Objective::Kind::Untargeted ? 1.0 - p : p;
            e.predicted = model_.labels()[argmax(dist)];
            e.success = objective_.satisfied_by(e.predicted);
            it = cache_.emplace(source, std::move(e)).first;
        }
        if (source_out) *source_out = it->first;
        return it->second;
    }

private:
    const Attributor& model_;
    const Objective& objective_;
    size_t index_;
    std::map<std::string, Evaluation> cache_;
};

struct Best {
    bool set = false;
    Evaluation eval;
    std::string code;
    std::vector<TransformAction> sequence;

    void offer(const Evaluation& e, const std::string& source, const std::vector<TransformAction>& seq) {
        bool better = !set || (e.success && !eval.success) ||
                      (e.success == eval.success && e.reward > eval.reward);
        if (!better) return;
        set = true;
        eval = e;
        code = source;
        sequence = seq;
    }
};

// Replays `seq` from `ast`. A rename whose path moved is matched by its new
// name when that name is offered at exactly one site.
std::optional<std::pair<Ast, std::vector<TransformAction>>> replay(const Ast& ast,
                                                                   const std::vector<TransformAction>& seq) {
    Ast state = ast;
    std::vector<TransformAction> used;
    for (const auto& a : seq) {
        auto actions = enumerate_actions(state);
        const TransformAction* pick = nullptr;
        if (std::find(actions.begin(), actions.end(), a) != actions.end()) {
            pick = &a;
        } else if (a.transform == TransformId::T5) {
            for (const auto& c : actions) {
                if (c.transform != a.transform || c.site.payload != a.site.payload) continue;
                if (pick) return std::nullopt;
                pick = &c;
            }
        }
        if (!pick) return std::nullopt;
        state = apply_unchecked(state, *pick);
        used.push_back(*pick);
    }
    return std::make_pair(std::move(state), std::move(used));
}

// Drops actions from a successful sequence while success is kept.
void shorten(const Ast& ast, Best& best, Evaluator& evaluate) {
    if (!best.eval.success) return;
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < best.sequence.size();) {
            auto candidate = best.sequence;
            candidate.erase(candidate.begin() + static_cast<long>(i));
            auto replayed = replay(ast, candidate);
            std::string source;
            if (replayed) {
                const Evaluation& e = evaluate(replayed->first, &source);
                if (e.success) {
                    best.eval = e;
                    best.code = source;
                    best.sequence = std::move(replayed->second);
                    changed = true;
                    continue;
                }
            }
            ++i;
        }
    }
}

EvasionResult finish(const Best& best, const Objective& objective, const std::string& true_author, int iterations) {
    EvasionResult r;
    r.success = best.eval.success;
    r.final_code = best.code;
    r.predicted = best.eval.predicted;
    r.true_author = true_author;
    if (objective.kind == Objective::Kind::Targeted) r.target = objective.author;
    r.sequence = best.sequence;
    r.iterations_used = iterations;
    r.reward = best.eval.reward;
    return r;
}

struct SearchNode {
    Ast state;
    std::optional<TransformAction> action;
    SearchNode* parent = nullptr;
    int depth = 0;
    int visits = 0;
    double total_reward = 0.0;
    std::vector<TransformAction> untried;
    std::vector<std::unique_ptr<SearchNode>> children;

    std::vector<TransformAction> path() const {
        std::vector<TransformAction> seq;
        for (const SearchNode* n = this; n && n->action; n = n->parent) seq.push_back(*n->action);
        return {seq.rbegin(), seq.rend()};
    }
};

}  // namespace

double reward(const Attributor& model, const Ast& ast, const Objective& objective) {
    Evaluator eval(model, objective);
    return eval(ast).reward;
}

EvasionResult evade(const Ast& ast, const Attributor& model, const Objective& objective, const SearchConfig& config,
                    const TraceSink& trace) {
    if (config.budget < 0) throw ConfigError("search budget must be non-negative");
    if (!(config.exploration > 0)) throw ConfigError("exploration constant must be positive");
    Evaluator evaluate(model, objective);
    std::string true_author = objective.kind == Objective::Kind::Untargeted ? objective.author : "";
    Best best;
    std::string source;
    const Evaluation& root_eval = evaluate(ast, &source);
    best.offer(root_eval, source, {});
    if (true_author.empty()) true_author = root_eval.predicted;
    if (config.budget == 0 || (config.early_stop && root_eval.success)) return finish(best, objective, true_author, 0);

    auto root = std::make_unique<SearchNode>();
    root->state = ast;
    root->untried = enumerate_actions(ast);
    if (root->untried.empty()) throw NoActions("program admits no transform");

    Rng rng(config.seed);
    int it = 0;
    for (; it < config.budget; ++it) {
        SearchNode* node = root.get();
        while (node->untried.empty() && !node->children.empty() && node->depth < config.max_depth) {
            SearchNode* pick = nullptr;
            double best_score = -std::numeric_limits<double>::infinity();
            double log_n = std::log(static_cast<double>(node->visits));
            for (auto& c : node->children) {
                double score = c->total_reward / c->visits + config.exploration * std::sqrt(log_n / c->visits);
                if (score > best_score) {
                    best_score = score;
                    pick = c.get();
                }
            }
            node = pick;
        }

        std::optional<TransformAction> expanded;
        bool stop = false;
        if (!node->untried.empty() && node->depth < config.max_depth) {
            size_t k = rng.below(node->untried.size());
            TransformAction a = node->untried[k];
            node->untried.erase(node->untried.begin() + static_cast<long>(k));
            auto child = std::make_unique<SearchNode>();
            child->state = apply_unchecked(node->state, a);
            child->action = a;
            child->parent = node;
            child->depth = node->depth + 1;
            if (child->depth < config.max_depth) child->untried = enumerate_actions(child->state);
            node->children.push_back(std::move(child));
            node = node->children.back().get();
            expanded = a;
            const Evaluation& e = evaluate(node->state, &source);
            best.offer(e, source, node->path());
            stop = config.early_stop && e.success;
        }

        Ast state = node->state;
        auto seq = node->path();
        int steps = std::min(config.rollout_depth, config.max_depth - node->depth);
        for (int s = 0; s < steps && !stop; ++s) {
            auto actions = enumerate_actions(state);
            if (actions.empty()) break;
            const TransformAction& a = rng.pick(actions);
            state = apply_unchecked(state, a);
            seq.push_back(a);
        }
        const Evaluation& e = evaluate(state, &source);
        if (!stop) {
            best.offer(e, source, seq);
            stop = config.early_stop && e.success;
        }

        for (SearchNode* n = node; n; n = n->parent) {
            n->visits += 1;
            n->total_reward += e.reward;
        }
        if (trace) trace({it + 1, static_cast<int>(seq.size()), e.reward, expanded});
        if (stop) {
            ++it;
            break;
        }
    }
    shorten(ast, best, evaluate);
    EvasionResult r = finish(best, objective, true_author, it);
    r.root_visits = root->visits;
    return r;
}

EvasionResult random_baseline(const Ast& ast, const Attributor& model, const Objective& objective, int budget,
                              uint64_t seed, int max_depth) {
    if (budget < 0) throw ConfigError("search budget must be non-negative");
    if (max_depth < 1) throw ConfigError("max depth must be positive");
    Evaluator evaluate(model, objective);
    std::string true_author = objective.kind == Objective::Kind::Untargeted ? objective.author : "";
    Best best;
    std::string source;
    const Evaluation& root_eval = evaluate(ast, &source);
    best.offer(root_eval, source, {});
    if (true_author.empty()) true_author = root_eval.predicted;
    if (budget == 0 || root_eval.success) return finish(best, objective, true_author, 0);
    if (enumerate_actions(ast).empty()) throw NoActions("program admits no transform");

    Rng rng(seed);
    Ast state = ast;
    std::vector<TransformAction> seq;
    int it = 0;
    while (it < budget) {
        auto actions = enumerate_actions(state);
        if (actions.empty() || static_cast<int>(seq.size()) >= max_depth) {
            state = ast;
            seq.clear();
            continue;
        }
        const TransformAction& a = rng.pick(actions);
        state = apply_unchecked(state, a);
        seq.push_back(a);
        ++it;
        const Evaluation& e = evaluate(state, &source);
        best.offer(e, source, seq);
        if (e.success) break;
    }
    shorten(ast, best, evaluate);
    return finish(best, objective, true_author, it);
}

}  // namespace stylo
