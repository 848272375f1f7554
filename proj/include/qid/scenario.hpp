#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qid/criteria.hpp"
#include "qid/spectral.hpp"

namespace qid {

inline constexpr const char* kToolVersion = "0.1.0";

// Declarative run description; parsed strictly (unknown keys are errors).
struct ScenarioConfig {
    std::string task;  // check | triplet | series | bounds | counterexample | report
    std::optional<MixtureDistribution> mixture;

    // grid block
    double t_max = 50.0;
    int samples = 2001;
    int refinement = 20;

    // series block
    int n = 20;
    int refine_level = 8;
    double prune_budget = 1e-12;

    // bounds block
    std::vector<int> dims = {1, 2, 3};
    int max_terms = 6;
    int k_max = 6;
    int count = 200;
    int coef_range = 3;
    int exp_range = 4;
    std::uint64_t seed = 20250814;

    nlohmann::json canonical;  // normalized config document (hash input)
};

ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(const std::string& text);

// The four built-in constructions, as ready-to-run configs.
std::vector<std::pair<std::string, nlohmann::json>> builtin_examples();

struct RunReport {
    nlohmann::json doc;
    int exit_code = 0;  // 0 positive, 1 negative/uncertified, 2 invalid input, 3 inconsistency
};

// Executes the selected task; writes report.json and task-specific trace
// tables under out_dir when given. Deterministic for a fixed config and
// version (timings excluded).
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir = "");

std::uint64_t fnv1a_hash(const std::string& data);

}  // namespace qid
