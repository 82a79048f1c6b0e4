#pragma once
// Aggregations between MDPs, tight epsilon certificates for them, and the
// two-sided error bounds on optimal gain.

#include "oams/mdp.hpp"

#include <vector>

namespace oams {

/// Surjection from source states {0..S-1} onto meta-states {0..target_size-1}.
struct AggregationMap {
    std::vector<int> alpha;
    int target_size = 0;

    int source_size() const noexcept { return static_cast<int>(alpha.size()); }
    bool operator==(const AggregationMap&) const = default;
};

/// target_size is max(alpha) + 1; throws InvalidAlpha unless surjective.
AggregationMap make_aggregation(std::vector<int> alpha);
AggregationMap identity_aggregation(int num_states);

/// Throws InvalidAlpha if alpha does not map m's states onto target_size classes.
void validate_aggregation(const AggregationMap& alpha, int source_size);

enum class Weighting { uniform, stationary };

/// Each meta-row is the weighted average of its class's rows with next states
/// summed per meta-state. `stationary` weights by the stationary distribution
/// of m's optimal policy and falls back to uniform when that policy is
/// multichain or a class carries no stationary mass.
Mdp aggregate_mdp(const Mdp& m, const AggregationMap& alpha, Weighting weighting = Weighting::stationary);

struct ApproxReport {
    double tight_reward_error = 0.0;
    double tight_transition_error = 0.0;
    double tight_epsilon = 0.0;
    int witness_state = 0;
    int witness_action = 0;
};

/// Smallest epsilon such that m_bar is an epsilon-approximation of m for every
/// epsilon strictly above it (MDP-to-MDP form: reward gap and aggregated L1 gap).
ApproxReport approximation_epsilon(const Mdp& m, const Mdp& m_bar, const AggregationMap& alpha);

/// Epsilon of a model that factors through the true state via alpha:
/// max over actions and same-class pairs of max(|dr|, 2 * ||dp||_1).
double model_epsilon_for_aggregation(const Mdp& m, const AggregationMap& alpha);

struct Theorem1Report {
    double gain = 0.0;       // rho*(m)
    double gain_bar = 0.0;   // rho*(m_bar)
    double diameter = 0.0;   // D(m)
    double tight_epsilon = 0.0;
    double lhs = 0.0;        // |rho*(m) - rho*(m_bar)|
    double rhs = 0.0;        // tight_epsilon * (D + 1)
    bool holds = false;
};

Theorem1Report verify_theorem1(const Mdp& m, const Mdp& m_bar, const AggregationMap& alpha, double tol = 1e-9);

/// Three-state chain (s0, s0', s1) with rewards (0, 0, 1) and its two-state
/// aggregation merging s0 and s0'. Action 0 is the gain-optimal chain with
/// stationary distribution (d, e+d, 2e+2d) / (3e+4d), e = eps/2, d = 2/D.
/// Action 1 only shortens hitting times (s0 -> s0', s0' stays, s1 -> s0) so
/// that the diameter, the s0' -> s0 hitting time, equals D.
struct LowerBoundInstance {
    Mdp m;
    Mdp m_bar;
    AggregationMap alpha;
    double eps_param = 0.0;       // epsilon
    double diameter_param = 0.0;  // D
    double half_eps = 0.0;        // e = epsilon / 2
    double inv_diameter = 0.0;    // d = 2 / D
    double predicted_gap = 0.0;   // e / (2 (3e + 4d))

    std::vector<double> predicted_stationary() const;
    double predicted_bound() const { return eps_param * diameter_param / 56.0; }
};

/// Throws DomainError unless eps > 0 and 2 < D < 4 / eps.
LowerBoundInstance lower_bound_instance(double eps, double diameter);

} // namespace oams
