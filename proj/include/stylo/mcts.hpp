// Monte-Carlo tree search over transform sequences against an attributor.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stylo/ast.hpp"
#include "stylo/attrib.hpp"
#include "stylo/transforms.hpp"

namespace stylo {

struct Objective {
    enum class Kind { Untargeted, Targeted };
    Kind kind = Kind::Untargeted;
    std::string author;  // true author when untargeted, target author when targeted

    static Objective untargeted(std::string true_author) { return {Kind::Untargeted, std::move(true_author)}; }
    static Objective targeted(std::string target) { return {Kind::Targeted, std::move(target)}; }
    bool satisfied_by(const std::string& predicted) const {
        return kind == Kind::Untargeted ? predicted != author : predicted == author;
    }
};

struct SearchConfig {
    int budget = 500;
    int max_depth = 8;
    double exploration = std::sqrt(2.0);
    int rollout_depth = 6;
    bool early_stop = true;
    uint64_t seed = 1;
};

struct EvasionResult {
    bool success = false;
    std::string final_code;
    std::string predicted;
    std::string true_author;
    std::optional<std::string> target;
    std::vector<TransformAction> sequence;
    int iterations_used = 0;
    double reward = 0.0;
    int root_visits = 0;

    bool operator==(const EvasionResult&) const = default;
};

nlohmann::json to_json(const EvasionResult& r);

struct TraceEvent {
    int iteration = 0;
    int depth = 0;
    double reward = 0.0;
    std::optional<TransformAction> action;
};

nlohmann::json to_json(const TraceEvent& e);
using TraceSink = std::function<void(const TraceEvent&)>;

// Untargeted: 1 - P(true author); targeted: P(target).
double reward(const Attributor& model, const Ast& ast, const Objective& objective);

// UCT search. With budget 0 the original program is evaluated only. Throws
// NoActions when the budget is positive and the program admits no action.
EvasionResult evade(const Ast& ast, const Attributor& model, const Objective& objective,
                    const SearchConfig& config = {}, const TraceSink& trace = {});

// Random walks of up to max_depth steps restarted from the root; each step
// applies one uniformly chosen action, evaluates it and consumes one unit of
// budget.
EvasionResult random_baseline(const Ast& ast, const Attributor& model, const Objective& objective, int budget,
                              uint64_t seed, int max_depth = 8);

}  // namespace stylo
