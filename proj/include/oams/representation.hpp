#pragma once
// State-representation models as incremental history transducers, and the
// per-model counts the planner estimates from.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace oams {

/// Declarative description of a model. Observations are true state indices
/// in {0..num_observations-1}.
struct ModelSpec {
    enum class Kind { identity, aggregation, window, constant };

    Kind kind = Kind::identity;
    int num_states = 1;             // S_phi
    int num_observations = 1;       // |O| = S of the environment
    std::vector<int> alpha;         // aggregation only
    int window = 0;                 // window only
    std::optional<double> epsilon;  // ground-truth epsilon when known

    static ModelSpec identity(int num_observations);
    static ModelSpec aggregation(std::vector<int> alpha);
    static ModelSpec window_of(int k, int num_observations);
    static ModelSpec constant(int num_observations);

    std::string label() const;
};

const char* to_string(ModelSpec::Kind kind) noexcept;

/// Number of window states: sum_{l=1..k} n^l (histories shorter than k get
/// their own indices).
std::int64_t window_state_count(int k, int num_observations);

/// phi: H -> S_phi, updated one observation at a time. Only the last
/// `window` observations are kept.
class StateRepModel {
public:
    explicit StateRepModel(ModelSpec spec);

    /// Starts a history at its first observation; returns phi(h_1).
    int reset(int first_observation);

    /// phi(h_{t+1}) after appending (a, r, o).
    int step(int action, double reward, int observation);

    int state() const noexcept { return state_; }
    int num_states() const noexcept { return spec_.num_states; }
    const ModelSpec& spec() const noexcept { return spec_; }

private:
    int observe(int observation);
    int window_index() const;

    ModelSpec spec_;
    std::deque<int> recent_;
    int state_ = 0;
};

/// Visit counts, reward sums and transition counts of one model.
class ModelStatistics {
public:
    ModelStatistics(int num_states, int num_actions);

    void record_transition(int s, int a, double r, int s_next);

    /// Snapshot N into the episode-start table and clear episode counts.
    void start_episode();
    /// Clear run counts.
    void start_run();

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }

    std::int64_t count(int s, int a) const { return visits_[at(s, a)]; }
    /// max(N(s,a), 1), the denominator used in every confidence radius.
    std::int64_t effective_count(int s, int a) const { return std::max<std::int64_t>(count(s, a), 1); }
    double reward_sum(int s, int a) const { return reward_sum_[at(s, a)]; }
    std::int64_t transition_count(int s, int a, int s_next) const {
        return transitions_[at(s, a) * num_states_ + s_next];
    }
    std::int64_t episode_start_count(int s, int a) const { return episode_start_[at(s, a)]; }
    std::int64_t episode_count(int s, int a) const { return episode_counts_[at(s, a)]; }
    std::int64_t run_count(int s, int a) const { return run_counts_[at(s, a)]; }
    std::int64_t run_steps() const noexcept { return run_steps_; }
    std::int64_t total_steps() const noexcept { return total_steps_; }

    bool operator==(const ModelStatistics&) const = default;

private:
    std::size_t at(int s, int a) const;

    int num_states_;
    int num_actions_;
    std::vector<std::int64_t> visits_;
    std::vector<double> reward_sum_;
    std::vector<std::int64_t> transitions_;
    std::vector<std::int64_t> episode_start_;
    std::vector<std::int64_t> episode_counts_;
    std::vector<std::int64_t> run_counts_;
    std::int64_t run_steps_ = 0;
    std::int64_t total_steps_ = 0;
};

struct Estimate {
    double r_hat = 0.0;
    std::vector<double> p_hat;
};

/// Empirical mean reward and next-state distribution; unvisited pairs get
/// r_hat = 0 and a uniform p_hat.
Estimate empirical_estimates(const ModelStatistics& stats, int s, int a);

} // namespace oams
