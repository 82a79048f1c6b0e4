#include "oams/approximation.hpp"

#include "oams/errors.hpp"
#include "oams/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace oams {

AggregationMap make_aggregation(std::vector<int> alpha) {
    if (alpha.empty()) throw Error(ErrorKind::InvalidAlpha, "empty aggregation");
    AggregationMap out;
    out.target_size = *std::max_element(alpha.begin(), alpha.end()) + 1;
    out.alpha = std::move(alpha);
    validate_aggregation(out, out.source_size());
    return out;
}

AggregationMap identity_aggregation(int num_states) {
    AggregationMap out;
    out.alpha.resize(num_states);
    for (int s = 0; s < num_states; ++s) out.alpha[s] = s;
    out.target_size = num_states;
    return out;
}

void validate_aggregation(const AggregationMap& alpha, int source_size) {
    if (alpha.source_size() != source_size)
        throw Error(ErrorKind::InvalidAlpha, "alpha has " + std::to_string(alpha.source_size()) +
                                                 " entries, expected " + std::to_string(source_size));
    if (alpha.target_size < 1 || alpha.target_size > source_size)
        throw Error(ErrorKind::InvalidAlpha, "target size must be in [1, S]");
    std::vector<char> hit(alpha.target_size, 0);
    for (int v : alpha.alpha) {
        if (v < 0 || v >= alpha.target_size) throw Error(ErrorKind::InvalidAlpha, "alpha value out of range");
        hit[v] = 1;
    }
    for (int c = 0; c < alpha.target_size; ++c)
        if (!hit[c]) throw Error(ErrorKind::InvalidAlpha, "meta-state " + std::to_string(c) + " has no preimage");
}

namespace {

std::vector<double> class_weights(const Mdp& m, const AggregationMap& alpha, Weighting weighting) {
    const int n = m.num_states();
    std::vector<double> w(n, 1.0);
    if (weighting == Weighting::uniform) return w;
    try {
        const auto opt = optimal_gain(m);
        w = stationary_distribution(m, opt.policy);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::MultichainPolicy && e.kind() != ErrorKind::NotCommunicating) throw;
        return std::vector<double>(n, 1.0);
    }
    // Classes made only of transient states keep uniform weights.
    std::vector<double> mass(alpha.target_size, 0.0);
    for (int s = 0; s < n; ++s) mass[alpha.alpha[s]] += w[s];
    for (int s = 0; s < n; ++s)
        if (mass[alpha.alpha[s]] <= 0.0) w[s] = 1.0;
    return w;
}

void check_pair(const Mdp& m, const Mdp& m_bar, const AggregationMap& alpha) {
    validate_aggregation(alpha, m.num_states());
    if (m_bar.num_states() != alpha.target_size)
        throw Error(ErrorKind::InvalidAlpha, "m_bar has " + std::to_string(m_bar.num_states()) +
                                                 " states but alpha targets " + std::to_string(alpha.target_size));
    if (m_bar.num_actions() != m.num_actions())
        throw Error(ErrorKind::InvalidAlpha, "m and m_bar have different action sets");
}

} // namespace

Mdp aggregate_mdp(const Mdp& m, const AggregationMap& alpha, Weighting weighting) {
    validate_aggregation(alpha, m.num_states());
    const int n = m.num_states();
    const int na = m.num_actions();
    const int nb = alpha.target_size;
    const auto w = class_weights(m, alpha, weighting);

    std::vector<double> mass(nb, 0.0);
    for (int s = 0; s < n; ++s) mass[alpha.alpha[s]] += w[s];

    std::vector<double> rewards(static_cast<std::size_t>(nb) * na, 0.0);
    std::vector<double> trans(rewards.size() * nb, 0.0);
    for (int s = 0; s < n; ++s) {
        const int c = alpha.alpha[s];
        const double ws = w[s] / mass[c];
        for (int a = 0; a < na; ++a) {
            const std::size_t ca = static_cast<std::size_t>(c) * na + a;
            rewards[ca] += ws * m.reward(s, a);
            const auto row = m.row(s, a);
            for (int k = 0; k < n; ++k) trans[ca * nb + alpha.alpha[k]] += ws * row[k];
        }
    }
    for (auto& r : rewards) r = std::clamp(r, 0.0, 1.0);
    for (auto& p : trans) p = std::clamp(p, 0.0, 1.0);
    return Mdp(nb, na, std::move(rewards), std::move(trans));
}

ApproxReport approximation_epsilon(const Mdp& m, const Mdp& m_bar, const AggregationMap& alpha) {
    check_pair(m, m_bar, alpha);
    const int n = m.num_states();
    const int na = m.num_actions();
    const int nb = alpha.target_size;
    ApproxReport rep;
    double best = -1.0;
    std::vector<double> pushed(nb);
    for (int s = 0; s < n; ++s) {
        const int c = alpha.alpha[s];
        for (int a = 0; a < na; ++a) {
            const double dr = std::fabs(m_bar.reward(c, a) - m.reward(s, a));
            std::fill(pushed.begin(), pushed.end(), 0.0);
            const auto row = m.row(s, a);
            for (int k = 0; k < n; ++k) pushed[alpha.alpha[k]] += row[k];
            const double dp = kernels::l1_distance(m_bar.row(c, a), pushed);
            rep.tight_reward_error = std::max(rep.tight_reward_error, dr);
            rep.tight_transition_error = std::max(rep.tight_transition_error, dp);
            if (std::max(dr, dp) > best) {
                best = std::max(dr, dp);
                rep.witness_state = s;
                rep.witness_action = a;
            }
        }
    }
    rep.tight_epsilon = std::max(rep.tight_reward_error, rep.tight_transition_error);
    return rep;
}

double model_epsilon_for_aggregation(const Mdp& m, const AggregationMap& alpha) {
    validate_aggregation(alpha, m.num_states());
    const int n = m.num_states();
    double eps = 0.0;
    for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
            if (alpha.alpha[s] != alpha.alpha[t]) continue;
            for (int a = 0; a < m.num_actions(); ++a) {
                const double dr = std::fabs(m.reward(s, a) - m.reward(t, a));
                const double dp = kernels::l1_distance(m.row(s, a), m.row(t, a));
                eps = std::max(eps, std::max(dr, 2.0 * dp));
            }
        }
    }
    return eps;
}

Theorem1Report verify_theorem1(const Mdp& m, const Mdp& m_bar, const AggregationMap& alpha, double tol) {
    Theorem1Report rep;
    rep.tight_epsilon = approximation_epsilon(m, m_bar, alpha).tight_epsilon;
    rep.gain = optimal_gain(m).gain;
    rep.gain_bar = optimal_gain(m_bar).gain;
    rep.diameter = diameter(m);
    rep.lhs = std::fabs(rep.gain - rep.gain_bar);
    rep.rhs = rep.tight_epsilon * (rep.diameter + 1.0);
    rep.holds = rep.lhs <= rep.rhs + tol;
    return rep;
}

std::vector<double> LowerBoundInstance::predicted_stationary() const {
    const double e = half_eps;
    const double d = inv_diameter;
    const double z = 3.0 * e + 4.0 * d;
    return {d / z, (e + d) / z, (2.0 * e + 2.0 * d) / z};
}

LowerBoundInstance lower_bound_instance(double eps, double diameter_param) {
    if (!(eps > 0.0) || !(diameter_param > 2.0) || !(diameter_param < 4.0 / eps))
        throw Error(ErrorKind::DomainError, "lower bound needs eps > 0 and 2 < D < 4/eps");
    const double e = eps / 2.0;
    const double d = 2.0 / diameter_param;

    // Exit probability m from {s0, s0'} to s1. The s0' -> s0 hitting time,
    // with s1 -> s0 in one step via action 1, is (1 + m) / (b + m), so
    // b = d (1 + m) / 2 - m gives exactly 2 / d. m <= d / (2 - d) keeps b >= 0,
    // m >= lower keeps p(s0|s1) >= 0, m >= d / 2 keeps s0 -> s1 within D.
    const double lower = (e + d) * d / (2.0 * e + 4.0 * d - (e + d) * d);
    const double upper = d / (2.0 - d);
    const double m_exit = 0.5 * (std::max(lower, d / 2.0) + upper);
    const double b = d * (1.0 + m_exit) / 2.0 - m_exit;
    // Balance for the stated stationary distribution.
    const double to_s0 = (d * m_exit - (e + d) * b) / (2.0 * (e + d));
    const double to_s0p = (b + m_exit) / 2.0;

    constexpr int S = 3;
    constexpr int A = 2;
    std::vector<double> rewards{0.0, 0.0, 0.0, 0.0, 1.0, 1.0};
    std::vector<double> trans(S * A * S, 0.0);
    auto set = [&](int s, int a, std::initializer_list<double> row) {
        std::copy(row.begin(), row.end(), trans.begin() + (s * A + a) * S);
    };
    set(0, 0, {1.0 - m_exit, 0.0, m_exit});
    set(1, 0, {b, 1.0 - b - m_exit, m_exit});
    set(2, 0, {to_s0, to_s0p, 1.0 - to_s0 - to_s0p});
    set(0, 1, {0.0, 1.0, 0.0});
    set(1, 1, {0.0, 1.0, 0.0});
    set(2, 1, {1.0, 0.0, 0.0});

    // Aggregated chain: symmetric exit probability halfway between the
    // {s0, s0'} exit m and the s1 exit m (e + 2d) / (2 (e + d)).
    const double exit_gap = m_exit * e / (2.0 * (e + d));
    const double m_bar_exit = m_exit - exit_gap / 2.0;
    std::vector<double> rewards_bar{0.0, 0.0, 1.0, 1.0};
    std::vector<double> trans_bar{
        1.0 - m_bar_exit, m_bar_exit,  // x, action 0
        1.0, 0.0,                      // x, action 1
        m_bar_exit, 1.0 - m_bar_exit,  // s1, action 0
        1.0, 0.0,                      // s1, action 1
    };

    return LowerBoundInstance{
        Mdp(S, A, std::move(rewards), std::move(trans)),
        Mdp(2, A, std::move(rewards_bar), std::move(trans_bar)),
        make_aggregation({0, 0, 1}),
        eps,
        diameter_param,
        e,
        d,
        e / (2.0 * (3.0 * e + 4.0 * d)),
    };
}

} // namespace oams
