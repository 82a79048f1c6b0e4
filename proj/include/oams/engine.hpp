#pragma once
// Online selection among approximate state-representation models: per-run
// optimistic selection with a complexity penalty, an online reward test, and
// doubling of each model's approximation-error guess on failure.

#include "oams/environment.hpp"
#include "oams/planner.hpp"
#include "oams/representation.hpp"
#include "oams/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace oams {

enum class Mode {
    oams,  // eps_tilde starts at eps0 and doubles on a failed test
    oms,   // eps_tilde pinned to 0; a failing model is removed for good
};

struct OamsConfig {
    double delta = 0.1;
    double eps0 = 0.01;
    Mode mode = Mode::oams;
    /// EVI precision is precision_scale / sqrt(t).
    double precision_scale = 1.0;
    /// Sweep cap for the plain EVI pass; the damped retry gets the same cap.
    long evi_max_sweeps = 100'000;
};

/// Throws DomainError unless delta and eps0 lie in (0, 1).
void validate(const OamsConfig& config);

/// Per-step regret bound charged to a model when it is selected for run j
/// at time t:
///   2^{-j/2} [ (sp sqrt(2S) + 3/sqrt2) sqrt(S A ln(48 S A t^3/delta)) + sp sqrt(2 ln(24 t^2/delta)) ]
///   + 2^{-j} sp + eps_tilde (sp + 3)
double penalty(double span_plus, int num_states, int num_actions, double eps_tilde, double t, int j, double delta);

struct Candidate {
    int model = 0;
    double rho = 0.0;  // optimistic gain
    double pen = 0.0;
    int num_states = 0;
};

/// argmax of rho - pen; ties go to fewer states, then the lower index.
/// Throws EmptyModelSet on an empty list.
int select_model(std::span<const Candidate> candidates);

/// State of the current run j of episode k.
struct RunContext {
    std::int64_t k = 1;
    int j = 1;
    std::int64_t t_start = 1;  // t_kj
    int model = 0;
    double rho = 0.0;          // rho_kj, fixed for the run
    double span_plus = 0.0;
    double pen = 0.0;
    double eps_tilde = 0.0;    // eps_tilde(phi_kj) at run start
    int num_states = 1;        // S_kj
    Policy policy;
    double run_reward = 0.0;
    std::int64_t length = 0;   // ell_kj = t - t_kj + 1 after the current step
};

/// Tolerated reward shortfall of the run so far. Logs use t_kj; counts are
/// the current run counts of the selected model.
double lob(const RunContext& ctx, const ModelStatistics& stats, double delta);

struct TestResult {
    bool pass = true;
    double lob = 0.0;
    double threshold = 0.0;  // ell * rho - lob
};

/// Fails iff the run reward so far is below ell * rho_kj - lob.
TestResult reward_test(const RunContext& ctx, const ModelStatistics& stats, double delta);

class Engine {
public:
    Engine(std::vector<ModelSpec> specs, int num_actions, OamsConfig config, EventSink sink = {});

    /// Feeds the first observation, plans the first run; returns a_1.
    int start(int first_observation);

    /// Consumes (r_t, o_{t+1}) for the last emitted action, runs the test,
    /// the visit-doubling check and the run-length cap in that order, and
    /// returns a_{t+1}.
    int advance(double reward, int next_observation);

    std::int64_t time() const noexcept { return t_; }
    const RunContext& run() const noexcept { return run_; }
    std::int64_t episodes() const noexcept { return run_.k; }
    const std::vector<int>& runs_per_episode() const noexcept { return runs_per_episode_; }
    int num_models() const noexcept { return static_cast<int>(models_.size()); }
    double eps_tilde(int model) const { return eps_tilde_.at(model); }
    int doublings(int model) const { return doublings_.at(model); }
    bool rejected(int model) const { return rejected_.at(model) != 0; }
    const ModelStatistics& statistics(int model) const { return stats_.at(model); }
    const StateRepModel& model(int model) const { return models_.at(model); }
    std::int64_t selections(int model) const { return selections_.at(model); }
    std::int64_t active_steps(int model) const { return active_steps_.at(model); }
    std::int64_t test_failures() const noexcept { return test_failures_; }
    std::int64_t doubling_ends() const noexcept { return doubling_ends_; }

private:
    void begin_episode();
    void begin_run(int j);
    int current_action() const;
    void emit(const TraceEvent& e) const {
        if (sink_) sink_(e);
    }

    OamsConfig config_;
    int num_actions_;
    EventSink sink_;
    std::vector<StateRepModel> models_;
    std::vector<ModelStatistics> stats_;
    std::vector<double> eps_tilde_;
    std::vector<int> doublings_;
    std::vector<char> rejected_;
    std::vector<std::int64_t> selections_;
    std::vector<std::int64_t> active_steps_;
    std::vector<int> runs_per_episode_;
    RunContext run_;
    std::int64_t t_ = 0;
    int last_observation_ = 0;
    int last_action_ = 0;
    bool started_ = false;
    std::int64_t test_failures_ = 0;
    std::int64_t doubling_ends_ = 0;
};

struct RunOutput {
    TraceSummary summary;
    std::vector<RegretRecord> regret;
};

/// T steps of the engine on `env`, with regret against the optimal gain of
/// env's MDP (relative value iteration at tolerance 1e-10). Deterministic
/// given env's seed.
RunOutput run_oams(Environment& env, const std::vector<ModelSpec>& specs, std::int64_t steps,
                   const OamsConfig& config, EventSink sink = {});

} // namespace oams
