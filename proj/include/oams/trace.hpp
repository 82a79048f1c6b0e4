#pragma once
// Engine events, run summaries and the regret table.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace oams {

struct TraceEvent {
    enum class Type { run_start, step, test_fail, eps_doubled, model_rejected, episode_end, run_end };

    Type type = Type::step;
    std::int64_t t = 0;
    std::int64_t k = 0;
    int j = 0;
    int model = -1;
    // run_start
    double rho = 0.0;
    double pen = 0.0;
    double span = 0.0;
    // step
    int s = 0;
    int a = 0;
    double r = 0.0;
    std::int64_t ell = 0;
    double lob = 0.0;
    // test_fail
    double threshold = 0.0;
    double run_reward = 0.0;
    // eps_doubled
    double eps = 0.0;
    // episode_end / run_end
    std::string reason;
};

const char* to_string(TraceEvent::Type type) noexcept;

using EventSink = std::function<void(const TraceEvent&)>;

/// One JSON object per line with a "type" discriminator.
std::string to_json_line(const TraceEvent& event);

struct ModelSummary {
    std::string label;
    int num_states = 0;
    double final_eps_tilde = 0.0;
    int doublings = 0;
    bool rejected = false;
    std::int64_t selections = 0;  // runs
    std::int64_t steps = 0;       // steps spent as the active model
    double known_epsilon = -1.0;  // < 0 when unknown
};

struct TraceSummary {
    std::int64_t steps = 0;
    std::int64_t episodes = 0;         // K_T
    std::vector<int> runs_per_episode; // J_k
    std::int64_t test_failures = 0;
    std::int64_t doubling_ends = 0;
    std::vector<ModelSummary> models;
    double rho_star = 0.0;
    double total_reward = 0.0;
    double mean_reward_last_half = 0.0;
    double final_regret = 0.0;
};

std::string to_json_text(const TraceSummary& summary);

struct RegretRecord {
    std::int64_t t = 0;
    double reward = 0.0;
    double cum_reward = 0.0;
    double regret = 0.0;
};

/// "t,reward,cum_reward,regret" then one row per record, 12 significant digits.
std::string regret_table(const std::vector<RegretRecord>& rows);

/// Rows t = stride, 2 stride, ... plus the last one.
std::vector<RegretRecord> downsample(const std::vector<RegretRecord>& rows, std::int64_t stride);

} // namespace oams
