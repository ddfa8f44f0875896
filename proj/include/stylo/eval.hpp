/**
 * Metrics and the staged experiment runner.
 *
 * A run writes every stage's artifacts under one output directory. A stage
 * whose summary file already exists is loaded instead of recomputed.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stylo/attrib.hpp"
#include "stylo/corpus.hpp"
#include "stylo/mcts.hpp"
#include "stylo/verify.hpp"

namespace stylo {

using ErrorTable = std::map<ErrorCategory, size_t>;

// Zero counts for every category.
ErrorTable empty_error_table();
nlohmann::json to_json(const ErrorTable& table);

struct UnitVerdict {
    std::string author;
    std::string challenge;
    EquivalenceVerdict verdict;
};

struct TransformationMetrics {
    double rate = 0.0;  // equivalent / total; 0 when total is 0
    size_t total = 0;
    size_t equivalent = 0;
    size_t excluded_no_tests = 0;
    ErrorTable error_table;
    std::vector<UnitVerdict> verdicts;  // one per counted output, in input order
};

TransformationMetrics transformation_success_rate(
    const std::vector<std::pair<SourceUnit, std::string>>& outputs, const ExecLimits& limits = {},
    int workers = 1);

// Untargeted: the share of candidates predicted as someone other than their
// true author. Candidates that do not parse count as failures.
double evasion_success_rate(const AttributionModel& model,
                            const std::vector<std::pair<std::string, std::string>>& outputs, int workers = 1);

struct ExperimentConfig {
    std::string corpus;  // ingestion root; empty selects a synthetic corpus
    int synthetic_authors = 20;
    int synthetic_challenges = 8;
    uint64_t synthetic_seed = 7;
    std::filesystem::path out = "stylo-run";
    std::vector<uint64_t> seeds = {1};
    double train_fraction = 0.75;
    std::vector<ModelKind> attributors = {ModelKind::TfidfRf};
    VocabConfig vocab;
    int trees = 300;
    SearchConfig search;
    bool random_baseline = true;
    int evade_limit = 0;  // evaded units per seed and attributor; 0 = all
    bool pairgen = true;
    int pairgen_units = 4;
    int pairgen_budget = 60;
    bool pairgen_strict = false;
    bool neural = false;
    std::string neural_cmd;  // {pairs}, {inputs}, {out} are substituted
    int workers = 1;
    std::map<std::string, std::string> echo;  // keys as read, for the report
};

// Flat `key = value` lines; `#` starts a comment. Unknown keys and malformed
// values throw ConfigError. STYLO_WORKERS overrides `workers` when set.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct MethodStats {
    std::vector<double> per_seed;
    double rate = 0.0;  // pooled over seeds
    size_t attempts = 0;
    size_t evaded = 0;
    double mean_iterations = 0.0;
};

struct AttributorReport {
    std::vector<double> accuracy_per_seed;
    double accuracy_mean = 0.0;
    double accuracy_variance = 0.0;  // population variance over seeds
    MethodStats mcts;
    std::optional<MethodStats> random;
};

struct PairgenStats {
    size_t units = 0;
    size_t style_sets = 0;
    size_t variants = 0;
    size_t successful_variants = 0;
    size_t pairs = 0;
};

struct NeuralStats {
    TransformationMetrics transformation;
    double evasion_rate = 0.0;
};

struct MetricsReport {
    size_t corpus_units = 0;
    size_t corpus_authors = 0;
    size_t corpus_rejected = 0;
    std::map<std::string, AttributorReport> attributors;  // keyed by model kind name
    TransformationMetrics transformation;               // over MCTS outputs
    std::optional<PairgenStats> pairgen;
    std::optional<NeuralStats> neural;
    std::vector<std::pair<std::string, double>> timing;  // stage, seconds
    std::map<std::string, std::string> config;
};

// with_timing = false drops the wall-clock entries.
nlohmann::json to_json(const MetricsReport& report, bool with_timing = true);
MetricsReport report_from_json(const nlohmann::json& j);
void write_text_report(const MetricsReport& report, std::ostream& out);

// Runs or resumes every stage. Throws StageFailure naming the failed stage.
MetricsReport run_experiment(const ExperimentConfig& config);

struct RecomputedRates {
    std::map<std::string, double> evasion;  // "<attributor>/<method>" pooled rate
    double transformation = 0.0;
    ErrorTable error_table;
};

// Recomputes the headline rates from the per-unit verdict log of a run.
RecomputedRates recompute_from_verdicts(const std::filesystem::path& verdicts_jsonl);

}  // namespace stylo
