#include "oams/mdp.hpp"

#include "oams/errors.hpp"
#include "oams/kernels.hpp"
#include "oams/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace oams {

Mdp::Mdp(int num_states, int num_actions, std::vector<double> rewards, std::vector<double> transitions)
    : num_states_(num_states), num_actions_(num_actions), rewards_(std::move(rewards)),
      transitions_(std::move(transitions)) {
    if (num_states < 1 || num_actions < 1)
        throw Error(ErrorKind::InvalidMdp, "need at least one state and one action");
    const auto pairs = static_cast<std::size_t>(num_states) * num_actions;
    if (rewards_.size() != pairs || transitions_.size() != pairs * num_states)
        throw Error(ErrorKind::InvalidMdp, "table sizes do not match num_states/num_actions");
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            const double r = rewards_[index(s, a)];
            if (!(r >= 0.0 && r <= 1.0)) {
                std::ostringstream os;
                os << "reward at (s=" << s << ", a=" << a << ") = " << r << " outside [0,1]";
                throw Error(ErrorKind::InvalidMdp, os.str());
            }
            double* p = transitions_.data() + index(s, a) * num_states;
            double total = 0.0;
            for (int k = 0; k < num_states; ++k) {
                if (!(p[k] >= 0.0 && p[k] <= 1.0)) {
                    std::ostringstream os;
                    os << "probability p(" << k << "|s=" << s << ", a=" << a << ") = " << p[k]
                       << " outside [0,1]";
                    throw Error(ErrorKind::InvalidMdp, os.str());
                }
                total += p[k];
            }
            if (std::fabs(total - 1.0) > 1e-9) {
                std::ostringstream os;
                os.precision(17);
                os << "transition row (s=" << s << ", a=" << a << ") sums to " << total;
                throw Error(ErrorKind::InvalidMdp, os.str());
            }
            if (total != 1.0)
                for (int k = 0; k < num_states; ++k) p[k] /= total;
        }
    }
}

double span(std::span<const double> v) {
    const auto mm = kernels::min_max(v);
    return mm.max - mm.min;
}

namespace {

// reach[s][t] on the directed graph given by edge(s, t).
template <class Edge>
std::vector<std::vector<char>> reachability(int n, Edge edge) {
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        reach[s][s] = 1;
        stack.assign(1, s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (!reach[s][v] && edge(u, v)) {
                    reach[s][v] = 1;
                    stack.push_back(v);
                }
            }
        }
    }
    return reach;
}

Eigen::MatrixXd induced_matrix(const Mdp& m, const Policy& pi) {
    const int n = m.num_states();
    if (static_cast<int>(pi.action.size()) != n)
        throw Error(ErrorKind::IndexOutOfRange, "policy size does not match num_states");
    Eigen::MatrixXd P(n, n);
    for (int s = 0; s < n; ++s) {
        const int a = pi.action[s];
        if (a < 0 || a >= m.num_actions())
            throw Error(ErrorKind::IndexOutOfRange, "policy action out of range");
        const auto row = m.row(s, a);
        for (int k = 0; k < n; ++k) P(s, k) = row[k];
    }
    return P;
}

void require_unichain(const Mdp& m, const Policy& pi) {
    if (closed_class_count(m, pi) >= 2)
        throw Error(ErrorKind::MultichainPolicy, "induced chain has several recurrent classes");
}

} // namespace

int closed_class_count(const Mdp& m, const Policy& pi) {
    const Eigen::MatrixXd P = induced_matrix(m, pi);
    const int n = m.num_states();
    const auto reach = reachability(n, [&](int u, int v) { return P(u, v) > 0.0; });
    // s is recurrent iff every state it reaches reaches it back. Count classes
    // by their lowest-index member.
    int count = 0;
    for (int s = 0; s < n; ++s) {
        bool recurrent = true;
        bool lowest = true;
        for (int t = 0; t < n && recurrent; ++t) {
            if (reach[s][t] && !reach[t][s]) recurrent = false;
            if (t < s && reach[s][t] && reach[t][s]) lowest = false;
        }
        if (recurrent && lowest) ++count;
    }
    return count;
}

bool is_communicating(const Mdp& m) {
    const int n = m.num_states();
    const int na = m.num_actions();
    const auto reach = reachability(n, [&](int u, int v) {
        for (int a = 0; a < na; ++a)
            if (m.prob(u, a, v) > 0.0) return true;
        return false;
    });
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (!reach[s][t]) return false;
    return true;
}

GainBias evaluate_policy(const Mdp& m, const Policy& pi) {
    require_unichain(m, pi);
    const int n = m.num_states();
    const Eigen::MatrixXd P = induced_matrix(m, pi);
    Eigen::VectorXd r(n);
    for (int s = 0; s < n; ++s) r(s) = m.reward(s, pi.action[s]);

    // Unknowns x = (rho, bias(1), ..., bias(n-1)); bias(0) = 0.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        M(s, 0) = 1.0;
        for (int k = 1; k < n; ++k) M(s, k) = (s == k ? 1.0 : 0.0) - P(s, k);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd x = lu.solve(r);
    // One round of iterative refinement keeps the residual at rounding level.
    x += lu.solve(r - M * x);

    GainBias out;
    out.gain = x(0);
    out.bias.assign(n, 0.0);
    for (int k = 1; k < n; ++k) out.bias[k] = x(k);
    out.reference_state = 0;
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
        double pb = 0.0;
        for (int k = 0; k < n; ++k) pb += P(s, k) * out.bias[k];
        residual = std::max(residual, std::fabs(out.gain + out.bias[s] - r(s) - pb));
    }
    out.residual = residual;
    return out;
}

std::vector<double> stationary_distribution(const Mdp& m, const Policy& pi) {
    require_unichain(m, pi);
    const int n = m.num_states();
    const Eigen::MatrixXd P = induced_matrix(m, pi);
    // mu (P - I) = 0 with the last balance equation replaced by sum(mu) = 1.
    Eigen::MatrixXd M = (P - Eigen::MatrixXd::Identity(n, n)).transpose();
    M.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd mu = lu.solve(rhs);
    mu += lu.solve(rhs - M * mu);

    std::vector<double> out(n);
    double total = 0.0;
    for (int s = 0; s < n; ++s) {
        out[s] = std::max(0.0, mu(s));
        total += out[s];
    }
    for (auto& v : out) v /= total;
    return out;
}

OptimalGain optimal_gain(const Mdp& m, double tol, long max_iterations) {
    if (!is_communicating(m)) throw Error(ErrorKind::NotCommunicating, "optimal_gain needs a communicating MDP");
    constexpr double tau = 0.5;
    const int n = m.num_states();
    const int na = m.num_actions();
    std::vector<double> v(n, 0.0), w(n), diff(n);
    OptimalGain out;
    out.policy.action.assign(n, 0);

    for (long it = 1; it <= max_iterations; ++it) {
        for (int s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < na; ++a) {
                const double q = m.reward(s, a) + tau * v[s] + (1.0 - tau) * kernels::dot(m.row(s, a), v);
                if (q > best) {
                    best = q;
                    best_a = a;
                }
            }
            w[s] = best;
            out.policy.action[s] = best_a;
        }
        for (int s = 0; s < n; ++s) diff[s] = w[s] - v[s];
        const auto mm = kernels::min_max(diff);
        const double ref = w[0];
        for (int s = 0; s < n; ++s) v[s] = w[s] - ref;
        if (mm.max - mm.min < tol) {
            out.gain = 0.5 * (mm.max + mm.min);
            out.iterations = it;
            out.bias.resize(n);
            for (int s = 0; s < n; ++s) out.bias[s] = (1.0 - tau) * v[s];
            return out;
        }
    }
    throw Error(ErrorKind::NoConvergence, "relative value iteration hit its iteration cap");
}

std::vector<double> min_hitting_times(const Mdp& m, int target) {
    const int n = m.num_states();
    const int na = m.num_actions();
    if (target < 0 || target >= n) throw Error(ErrorKind::IndexOutOfRange, "target state out of range");
    if (!is_communicating(m)) throw Error(ErrorKind::NotCommunicating, "hitting times diverge");

    // Value iteration from below, then policy iteration on the greedy policy
    // to remove the geometric tail error.
    std::vector<double> h(n, 0.0), next(n, 0.0);
    std::vector<int> act(n, 0);
    const long cap = 10'000'000;
    long it = 0;
    for (; it < cap; ++it) {
        double change = 0.0;
        for (int s = 0; s < n; ++s) {
            if (s == target) continue;
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < na; ++a) {
                const double q = 1.0 + kernels::dot(m.row(s, a), h);
                if (q < best) {
                    best = q;
                    act[s] = a;
                }
            }
            next[s] = best;
            change = std::max(change, best - h[s]);
        }
        std::swap(h, next);
        if (change < 1e-9) break;
        // Growth check: values above n / p_min^n cannot come from a proper policy.
        if (h[0] > 1e15 || h[n - 1] > 1e15) throw Error(ErrorKind::NotCommunicating, "hitting time diverges");
    }
    if (it == cap) throw Error(ErrorKind::NoConvergence, "hitting-time iteration hit its cap");

    for (int round = 0; round < 64; ++round) {
        // Exact evaluation of the greedy policy on the non-target states.
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
        rhs(target) = 0.0;
        for (int s = 0; s < n; ++s) {
            if (s == target) continue;
            const auto row = m.row(s, act[s]);
            for (int k = 0; k < n; ++k)
                if (k != target) M(s, k) -= row[k];
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd x = lu.solve(rhs);
        bool finite = true;
        for (int s = 0; s < n; ++s) finite = finite && std::isfinite(x(s)) && x(s) >= -1e-9;
        if (!finite) break;
        for (int s = 0; s < n; ++s) h[s] = (s == target) ? 0.0 : x(s);

        bool changed = false;
        for (int s = 0; s < n; ++s) {
            if (s == target) continue;
            double current = 1.0 + kernels::dot(m.row(s, act[s]), h);
            for (int a = 0; a < na; ++a) {
                const double q = 1.0 + kernels::dot(m.row(s, a), h);
                if (q < current - 1e-12 * std::max(1.0, current)) {
                    current = q;
                    act[s] = a;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return h;
}

double diameter(const Mdp& m) {
    if (!is_communicating(m)) throw Error(ErrorKind::NotCommunicating, "diameter is infinite");
    double d = 0.0;
    for (int t = 0; t < m.num_states(); ++t) {
        const auto h = min_hitting_times(m, t);
        d = std::max(d, *std::max_element(h.begin(), h.end()));
    }
    return d;
}

std::vector<Policy> enumerate_policies(const Mdp& m) {
    const int n = m.num_states();
    const int na = m.num_actions();
    std::vector<Policy> out;
    Policy pi;
    pi.action.assign(n, 0);
    while (true) {
        out.push_back(pi);
        int s = n - 1;
        while (s >= 0 && pi.action[s] == na - 1) pi.action[s--] = 0;
        if (s < 0) break;
        ++pi.action[s];
    }
    return out;
}

Mdp random_mdp(int num_states, int num_actions, std::uint64_t seed, int transition_support,
               RewardProfile profile) {
    if (num_states < 1 || num_actions < 1 || transition_support < 1)
        throw Error(ErrorKind::DomainError, "random_mdp needs S, A, support >= 1");
    const int n = num_states;
    const int k = std::min(transition_support, n);
    CounterRng rng(seed);
    std::vector<int> perm(n);
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
        std::vector<double> rewards(static_cast<std::size_t>(n) * num_actions);
        std::vector<double> trans(rewards.size() * n, 0.0);
        for (int s = 0; s < n; ++s) {
            for (int a = 0; a < num_actions; ++a) {
                const std::size_t sa = static_cast<std::size_t>(s) * num_actions + a;
                std::iota(perm.begin(), perm.end(), 0);
                for (int i = 0; i < k; ++i)
                    std::swap(perm[i], perm[i + rng.below(static_cast<std::uint64_t>(n - i))]);
                double total = 0.0;
                for (int i = 0; i < k; ++i) {
                    const double w = rng.exponential() + 1e-300;
                    trans[sa * n + perm[i]] = w;
                    total += w;
                }
                for (int i = 0; i < k; ++i) trans[sa * n + perm[i]] /= total;
                switch (profile) {
                case RewardProfile::uniform: rewards[sa] = rng.uniform(); break;
                case RewardProfile::bimodal: {
                    const double u = 0.2 * rng.uniform();
                    rewards[sa] = rng.uniform() < 0.5 ? u : 1.0 - u;
                    break;
                }
                }
            }
        }
        Mdp m(n, num_actions, std::move(rewards), std::move(trans));
        if (is_communicating(m)) return m;
    }
    throw Error(ErrorKind::DomainError, "could not sample a communicating MDP");
}

} // namespace oams
