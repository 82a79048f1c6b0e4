#pragma once
// Finite tabular MDPs and exact average-reward analysis.

#include <cstdint>
#include <span>
#include <vector>

namespace oams {

/// Finite MDP with mean rewards r(s,a) in [0,1] and transition rows p(.|s,a).
/// Rows are validated to sum to one within 1e-9 and renormalized on
/// construction, so every stored row sums to one within 1e-12.
class Mdp {
public:
    Mdp(int num_states, int num_actions, std::vector<double> rewards, std::vector<double> transitions);

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }

    double reward(int s, int a) const noexcept { return rewards_[index(s, a)]; }
    std::span<const double> row(int s, int a) const noexcept {
        return {transitions_.data() + index(s, a) * num_states_, static_cast<std::size_t>(num_states_)};
    }
    double prob(int s, int a, int next) const noexcept { return row(s, a)[next]; }

    const std::vector<double>& rewards() const noexcept { return rewards_; }
    const std::vector<double>& transitions() const noexcept { return transitions_; }

    bool operator==(const Mdp&) const = default;

private:
    std::size_t index(int s, int a) const noexcept {
        return static_cast<std::size_t>(s) * num_actions_ + a;
    }

    int num_states_;
    int num_actions_;
    std::vector<double> rewards_;      // S*A, row-major (s, a)
    std::vector<double> transitions_;  // S*A*S, row-major (s, a, s')
};

/// Deterministic stationary policy.
struct Policy {
    std::vector<int> action;

    bool operator==(const Policy&) const = default;
};

struct GainBias {
    double gain = 0.0;
    std::vector<double> bias;
    int reference_state = 0;
    double residual = 0.0;  // max |rho + bias(s) - r(s) - P bias(s)|
};

struct OptimalGain {
    double gain = 0.0;
    Policy policy;
    std::vector<double> bias;  // solves the optimality equation, bias[0] = 0
    long iterations = 0;
};

/// Gain and bias of a unichain policy from the Poisson equation
/// rho + bias = r_pi + P_pi bias, bias[0] = 0.
/// Throws ErrorKind::MultichainPolicy if the induced chain has two or more
/// closed classes.
GainBias evaluate_policy(const Mdp& m, const Policy& pi);

/// Unique stationary distribution of a unichain policy.
std::vector<double> stationary_distribution(const Mdp& m, const Policy& pi);

/// Optimal average reward by relative value iteration on the aperiodic
/// transform P' = (P + I) / 2, stopping once the span of successive value
/// differences drops below `tol`.
OptimalGain optimal_gain(const Mdp& m, double tol = 1e-10, long max_iterations = 50'000'000);

/// Minimal expected hitting times of `target` from every state (0 at target).
std::vector<double> min_hitting_times(const Mdp& m, int target);

/// max over ordered pairs of the minimal expected hitting time.
double diameter(const Mdp& m);

double span(std::span<const double> v);

/// Every state reaches every other one on the union of action supports.
bool is_communicating(const Mdp& m);

/// Number of closed communicating classes of the chain induced by pi.
int closed_class_count(const Mdp& m, const Policy& pi);

/// All A^S deterministic policies in lexicographic order (state 0 slowest).
std::vector<Policy> enumerate_policies(const Mdp& m);

enum class RewardProfile {
    uniform,   // r ~ U[0,1]
    bimodal,   // r ~ U[0,0.2] or U[0.8,1] with equal odds
};

/// Random communicating MDP. Each row puts flat-Dirichlet mass on a random
/// support of min(transition_support, S) states. Resamples until the MDP is
/// communicating. Identical arguments give bit-identical tables.
Mdp random_mdp(int num_states, int num_actions, std::uint64_t seed, int transition_support,
               RewardProfile profile = RewardProfile::uniform);

} // namespace oams
