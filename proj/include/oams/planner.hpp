#pragma once
// Plausible sets around empirical estimates and extended value iteration
// over them.

#include "oams/mdp.hpp"
#include "oams/representation.hpp"

#include <span>
#include <vector>

namespace oams {

/// ln(48 S A t^3 / delta), the log factor of both confidence radii.
double confidence_log(int num_states, int num_actions, double t, double delta);

struct ConfidenceBounds {
    int num_states = 0;
    int num_actions = 0;
    double t = 1.0;
    double delta = 0.1;
    double eps_tilde = 0.0;
    std::vector<double> reward_radius;      // per (s, a)
    std::vector<double> transition_radius;  // per (s, a)

    double reward_at(int s, int a) const { return reward_radius[static_cast<std::size_t>(s) * num_actions + a]; }
    double transition_at(int s, int a) const {
        return transition_radius[static_cast<std::size_t>(s) * num_actions + a];
    }
};

/// Radii eps_tilde + sqrt(L / (2 N)) for rewards and eps_tilde + sqrt(2 S L / N)
/// for transitions, N = max(N(s,a), 1). Throws DomainError unless
/// delta in (0,1), t >= 1 and eps_tilde >= 0.
ConfidenceBounds confidence_bounds(const ModelStatistics& stats, double t, double delta, double eps_tilde);

/// argmax of q . u over the simplex intersected with the L1 ball of radius
/// beta around p_hat. Ties in u favour the lower index.
std::vector<double> inner_max_transition(std::span<const double> p_hat, double beta, std::span<const double> u);

/// Estimates plus radii: everything EVI reads.
struct OptimisticProblem {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> r_hat;              // per (s, a)
    std::vector<double> p_hat;              // per (s, a, s')
    std::vector<double> reward_radius;      // per (s, a)
    std::vector<double> transition_radius;  // per (s, a)
};

OptimisticProblem make_problem(const ModelStatistics& stats, const ConfidenceBounds& bounds);

/// Known MDP with uniform radii; zero radii turn EVI into plain value iteration.
OptimisticProblem make_problem(const Mdp& m, double reward_radius = 0.0, double transition_radius = 0.0);

struct EviOptions {
    double precision = 1e-3;
    long max_sweeps = 1'000'000;
    /// On hitting max_sweeps, retry once on the aperiodic transform
    /// u <- r + (q.u + u) / 2, which leaves gains unchanged.
    bool damped_fallback = true;
};

struct EviResult {
    std::vector<double> u_plus;  // min 0
    Policy policy_plus;
    double rho_hat_plus = 0.0;   // min_s { r+ + p+ . u_plus - u_plus(s) }
    double span_plus = 0.0;
    long iterations = 0;
    bool converged = false;
    bool damped = false;
};

/// Iterates u <- max_a { r_hat + reward_radius + max_q q . u } until the span
/// of successive differences drops below the precision. Throws NoConvergence
/// if the cap is hit (after the damped retry when enabled).
EviResult extended_value_iteration(const OptimisticProblem& problem, const EviOptions& options);

EviResult extended_value_iteration(const ModelStatistics& stats, const ConfidenceBounds& bounds,
                                   const EviOptions& options);

} // namespace oams
