#pragma once
// Experiment configuration, the per-seed simulation loop and its artifacts,
// MDP analysis and the lower-bound bundle writer.

#include "oams/engine.hpp"
#include "oams/environment.hpp"
#include "oams/mdp.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oams {

/// Where the true MDP comes from.
///   {"file": "m.json"}
///   {"generator": "random", "num_states": 5, "num_actions": 2, "seed": 3, "support": 3}
///   {"generator": "alternating"}
/// plus optional "reward_mode" ("bernoulli" | "deterministic") and "initial_state".
struct EnvironmentSpec {
    std::string file;
    std::string generator;
    int num_states = 0;
    int num_actions = 0;
    std::uint64_t seed = 0;
    int support = 3;
    RewardMode reward_mode = RewardMode::bernoulli;
    int initial_state = 0;
};

/// One entry of the model list:
///   {"kind": "identity"} | {"kind": "constant"} | {"kind": "window", "k": 2}
///   {"kind": "aggregation", "alpha": [0, 0, 1]}
/// An optional "epsilon" overrides the known epsilon; aggregations otherwise
/// get theirs from the true MDP.
struct ModelEntry {
    ModelSpec::Kind kind = ModelSpec::Kind::identity;
    std::vector<int> alpha;
    int window = 0;
    std::optional<double> epsilon;
};

struct ExperimentConfig {
    EnvironmentSpec environment;
    std::vector<ModelEntry> models;
    std::int64_t steps = 0;  // T
    OamsConfig engine;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path out_dir = "out";
    std::int64_t stride = 1;  // trace downsampling, step events and regret rows only
};

/// Throws ConfigError naming the offending field. Relative file paths are
/// resolved against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

Mdp alternating_chain();
Mdp build_environment(const EnvironmentSpec& spec);
std::vector<ModelSpec> build_models(const std::vector<ModelEntry>& entries, const Mdp& truth);

struct SeedArtifacts {
    std::uint64_t seed = 0;
    TraceSummary summary;
    std::string regret_csv;
    std::string events_jsonl;
};

/// One seed end to end, in memory.
SeedArtifacts simulate_seed(const ExperimentConfig& config, const Mdp& truth, std::uint64_t seed);

/// Runs every seed and writes <out_dir>/seed_<n>/{regret.csv, events.jsonl,
/// summary.json}. Throws ConfigError or IoError.
std::vector<SeedArtifacts> simulate(const ExperimentConfig& config);

struct AnalysisReport {
    bool communicating = false;
    std::optional<double> gain;
    std::optional<double> diameter;
    std::optional<double> bias_span;
    std::vector<double> stationary;  // of the optimal policy, empty if multichain
    Policy policy;
};

AnalysisReport analyze(const Mdp& m);
nlohmann::ordered_json to_json(const AnalysisReport& report);

/// Writes m.json, m_bar.json, alpha.json and instance.json under `out_dir`.
void make_lower_bound(double eps, double diameter, const std::filesystem::path& out_dir);

} // namespace oams
