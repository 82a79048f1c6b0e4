#include "oams/planner.hpp"

#include "oams/errors.hpp"
#include "oams/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oams {

double confidence_log(int num_states, int num_actions, double t, double delta) {
    return std::log(48.0 * num_states * num_actions * t * t * t / delta);
}

ConfidenceBounds confidence_bounds(const ModelStatistics& stats, double t, double delta, double eps_tilde) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::DomainError, "delta must lie in (0,1)");
    if (!(t >= 1.0)) throw Error(ErrorKind::DomainError, "t must be >= 1");
    if (!(eps_tilde >= 0.0)) throw Error(ErrorKind::DomainError, "eps_tilde must be >= 0");
    ConfidenceBounds b;
    b.num_states = stats.num_states();
    b.num_actions = stats.num_actions();
    b.t = t;
    b.delta = delta;
    b.eps_tilde = eps_tilde;
    const double log_term = confidence_log(b.num_states, b.num_actions, t, delta);
    const auto pairs = static_cast<std::size_t>(b.num_states) * b.num_actions;
    b.reward_radius.resize(pairs);
    b.transition_radius.resize(pairs);
    for (int s = 0; s < b.num_states; ++s) {
        for (int a = 0; a < b.num_actions; ++a) {
            const double n = static_cast<double>(stats.effective_count(s, a));
            const std::size_t i = static_cast<std::size_t>(s) * b.num_actions + a;
            b.reward_radius[i] = eps_tilde + std::sqrt(log_term / (2.0 * n));
            b.transition_radius[i] = eps_tilde + std::sqrt(2.0 * b.num_states * log_term / n);
        }
    }
    return b;
}

namespace {

// Indices sorted by decreasing u; equal values keep the lower index first.
void descending_order(std::span<const double> u, std::vector<int>& order) {
    order.resize(u.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return u[x] > u[y]; });
}

void inner_max_sorted(std::span<const double> p_hat, double beta, const std::vector<int>& order,
                      std::span<double> q) {
    std::copy(p_hat.begin(), p_hat.end(), q.begin());
    const int best = order.front();
    q[best] = std::min(1.0, p_hat[best] + beta / 2.0);
    double excess = q[best] - p_hat[best];
    for (auto it = order.rbegin(); it != order.rend() && excess > 0.0; ++it) {
        if (*it == best) continue;
        const double take = std::min(excess, q[*it]);
        q[*it] -= take;
        excess -= take;
    }
}

struct Sweep {
    std::vector<double> next;
    std::vector<int> action;
};

void bellman_sweep(const OptimisticProblem& pr, std::span<const double> u, double tau, std::vector<int>& order,
                   std::vector<double>& q, Sweep& out) {
    const int n = pr.num_states;
    const int na = pr.num_actions;
    descending_order(u, order);
    for (int s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < na; ++a) {
            const std::size_t sa = static_cast<std::size_t>(s) * na + a;
            inner_max_sorted({pr.p_hat.data() + sa * n, static_cast<std::size_t>(n)}, pr.transition_radius[sa], order,
                             q);
            const double value = pr.r_hat[sa] + pr.reward_radius[sa] + (1.0 - tau) * kernels::dot(q, u) + tau * u[s];
            if (value > best) {
                best = value;
                best_a = a;
            }
        }
        out.next[s] = best;
        out.action[s] = best_a;
    }
}

bool run_evi(const OptimisticProblem& pr, double precision, long max_sweeps, double tau, EviResult& res) {
    const int n = pr.num_states;
    std::vector<double> u(n, 0.0), diff(n), q(n);
    std::vector<int> order;
    Sweep sweep{std::vector<double>(n), std::vector<int>(n)};
    for (long it = 1; it <= max_sweeps; ++it) {
        bellman_sweep(pr, u, tau, order, q, sweep);
        for (int s = 0; s < n; ++s) diff[s] = sweep.next[s] - u[s];
        const auto mm = kernels::min_max(diff);
        if (mm.max - mm.min < precision) {
            const double low = kernels::min_max(u).min;
            res.u_plus.resize(n);
            for (int s = 0; s < n; ++s) res.u_plus[s] = (1.0 - tau) * (u[s] - low);
            res.policy_plus.action = sweep.action;
            res.rho_hat_plus = mm.min;
            res.span_plus = span(res.u_plus);
            res.iterations = it;
            res.converged = true;
            res.damped = tau > 0.0;
            return true;
        }
        const double low = kernels::min_max(sweep.next).min;
        for (int s = 0; s < n; ++s) u[s] = sweep.next[s] - low;
    }
    res.iterations = max_sweeps;
    return false;
}

} // namespace

std::vector<double> inner_max_transition(std::span<const double> p_hat, double beta, std::span<const double> u) {
    if (p_hat.size() != u.size() || p_hat.empty())
        throw Error(ErrorKind::IndexOutOfRange, "p_hat and u must have the same nonzero length");
    std::vector<int> order;
    descending_order(u, order);
    std::vector<double> q(p_hat.size());
    inner_max_sorted(p_hat, std::max(beta, 0.0), order, q);
    return q;
}

OptimisticProblem make_problem(const ModelStatistics& stats, const ConfidenceBounds& bounds) {
    OptimisticProblem pr;
    pr.num_states = stats.num_states();
    pr.num_actions = stats.num_actions();
    const auto pairs = static_cast<std::size_t>(pr.num_states) * pr.num_actions;
    pr.r_hat.resize(pairs);
    pr.p_hat.resize(pairs * pr.num_states);
    for (int s = 0; s < pr.num_states; ++s) {
        for (int a = 0; a < pr.num_actions; ++a) {
            const auto est = empirical_estimates(stats, s, a);
            const std::size_t sa = static_cast<std::size_t>(s) * pr.num_actions + a;
            pr.r_hat[sa] = est.r_hat;
            std::copy(est.p_hat.begin(), est.p_hat.end(), pr.p_hat.begin() + sa * pr.num_states);
        }
    }
    pr.reward_radius = bounds.reward_radius;
    pr.transition_radius = bounds.transition_radius;
    return pr;
}

OptimisticProblem make_problem(const Mdp& m, double reward_radius, double transition_radius) {
    OptimisticProblem pr;
    pr.num_states = m.num_states();
    pr.num_actions = m.num_actions();
    pr.r_hat = m.rewards();
    pr.p_hat = m.transitions();
    pr.reward_radius.assign(pr.r_hat.size(), reward_radius);
    pr.transition_radius.assign(pr.r_hat.size(), transition_radius);
    return pr;
}

EviResult extended_value_iteration(const OptimisticProblem& problem, const EviOptions& options) {
    if (!(options.precision > 0.0)) throw Error(ErrorKind::DomainError, "EVI precision must be > 0");
    EviResult res;
    if (run_evi(problem, options.precision, options.max_sweeps, 0.0, res)) return res;
    if (options.damped_fallback && run_evi(problem, options.precision, options.max_sweeps, 0.5, res)) return res;
    throw Error(ErrorKind::NoConvergence, "extended value iteration hit its sweep cap");
}

EviResult extended_value_iteration(const ModelStatistics& stats, const ConfidenceBounds& bounds,
                                   const EviOptions& options) {
    return extended_value_iteration(make_problem(stats, bounds), options);
}

} // namespace oams
