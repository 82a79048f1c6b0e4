#include "oams/verify.hpp"

#include "lp.hpp"
#include "oams/approximation.hpp"
#include "oams/errors.hpp"
#include "oams/mdp.hpp"
#include "oams/planner.hpp"
#include "oams/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace oams {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string tag(const char* fmt, double x, double y) {
    char buf[96];
    std::snprintf(buf, sizeof buf, fmt, x, y);
    return buf;
}

void add(VerifyReport& rep, std::string name, double lhs, double rhs, bool pass, std::string note = {}) {
    rep.checks.push_back({std::move(name), pass, lhs, rhs, std::move(note)});
}

int uniform_int(CounterRng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(hi - lo + 1)); }

// Surjective map of n states onto c classes.
std::vector<int> random_alpha(CounterRng& rng, int n, int c) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<int> alpha(n);
    for (int i = 0; i < n; ++i) alpha[perm[i]] = i < c ? i : static_cast<int>(rng.below(c));
    return alpha;
}

void thm2_checks(VerifyReport& rep, double eps, double d_param) {
    const std::string at = tag("[eps=%g,D=%g]", eps, d_param);
    const auto inst = lower_bound_instance(eps, d_param);
    const double gain = optimal_gain(inst.m, 1e-12).gain;
    const double gain_bar = optimal_gain(inst.m_bar, 1e-12).gain;
    const double gap = std::fabs(gain - gain_bar);
    add(rep, "gap_closed_form" + at, gap, inst.predicted_gap, std::fabs(gap - inst.predicted_gap) <= 1e-9);
    add(rep, "gap_above_bound" + at, gap, inst.predicted_bound(), gap > inst.predicted_bound());

    const auto opt = optimal_gain(inst.m, 1e-12);
    const auto mu = stationary_distribution(inst.m, opt.policy);
    const auto want = inst.predicted_stationary();
    double worst = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) worst = std::max(worst, std::fabs(mu[i] - want[i]));
    add(rep, "stationary" + at, worst, 1e-9, worst <= 1e-9);

    const double dia = diameter(inst.m);
    add(rep, "diameter" + at, dia, d_param, std::fabs(dia - d_param) <= 1e-6);

    const double tight = approximation_epsilon(inst.m, inst.m_bar, inst.alpha).tight_epsilon;
    add(rep, "approximation" + at, tight, eps, tight < eps);
}

} // namespace

std::size_t VerifyReport::failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

nlohmann::ordered_json VerifyReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["checks_total"] = checks.size();
    j["failures"] = failures();
    j["seconds"] = seconds;
    auto& arr = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["lhs"] = c.lhs;
        cj["rhs"] = c.rhs;
        if (!c.note.empty()) cj["note"] = c.note;
        arr.push_back(std::move(cj));
    }
    return j;
}

VerifyReport verify_thm2(double eps, double d_param) {
    const auto start = Clock::now();
    VerifyReport rep;
    rep.suite = "thm2";
    thm2_checks(rep, eps, d_param);
    rep.seconds = seconds_since(start);
    return rep;
}

VerifyReport verify_thm2_grid() {
    const auto start = Clock::now();
    VerifyReport rep;
    rep.suite = "thm2";
    for (double eps : {0.05, 0.1, 0.2, 0.4})
        for (double d : {3.0, 5.0, 10.0, 19.0})
            if (d > 2.0 && d < 4.0 / eps) thm2_checks(rep, eps, d);
    rep.seconds = seconds_since(start);
    return rep;
}

VerifyReport verify_thm1(int seeds, std::uint64_t first_seed, int max_states, int max_actions) {
    const auto start = Clock::now();
    VerifyReport rep;
    rep.suite = "thm1";
    for (int i = 0; i < seeds; ++i) {
        const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
        CounterRng rng(seed ^ 0x7468'6d31ULL);
        const int n = uniform_int(rng, 2, max_states);
        const int na = uniform_int(rng, 1, max_actions);
        const int support = uniform_int(rng, 2, n);
        const Mdp m = random_mdp(n, na, seed, support);
        const auto alpha = make_aggregation(random_alpha(rng, n, uniform_int(rng, 1, n)));
        Mdp m_bar = aggregate_mdp(m, alpha, Weighting::stationary);
        if (!is_communicating(m_bar)) m_bar = aggregate_mdp(m, alpha, Weighting::uniform);
        const auto r = verify_theorem1(m, m_bar, alpha, 1e-6);
        char name[64];
        std::snprintf(name, sizeof name, "seed=%llu,S=%d,A=%d", static_cast<unsigned long long>(seed), n, na);
        add(rep, name, r.lhs, r.rhs, r.lhs <= r.rhs + 1e-6,
            tag("eps=%.6g,D=%.6g", r.tight_epsilon, r.diameter));
    }
    rep.seconds = seconds_since(start);
    return rep;
}

VerifyReport verify_evi(int mdps, int triples, double precision, std::uint64_t seed) {
    const auto start = Clock::now();
    VerifyReport rep;
    rep.suite = "evi";
    CounterRng rng(seed ^ 0x6576'69ULL);
    for (int i = 0; i < mdps; ++i) {
        const int n = uniform_int(rng, 1, 5);
        const int na = uniform_int(rng, 1, 3);
        const Mdp m = random_mdp(n, na, seed * 1000 + i, uniform_int(rng, 1, n));
        EviOptions options;
        options.precision = precision;
        const auto evi = extended_value_iteration(make_problem(m), options);
        const double gain = optimal_gain(m, 1e-12).gain;
        add(rep, "evi_gain[" + std::to_string(i) + "]", std::fabs(evi.rho_hat_plus - gain), 2.0 * precision,
            std::fabs(evi.rho_hat_plus - gain) <= 2.0 * precision);
    }
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < triples; ++i) {
        const int n = uniform_int(rng, 2, 6);
        std::vector<double> p(n), u(n);
        double total = 0.0;
        for (auto& x : p) {
            x = rng.uniform() < 0.25 ? 0.0 : rng.exponential();
            total += x;
        }
        if (total == 0.0) p[0] = total = 1.0;
        for (auto& x : p) x /= total;
        const bool ties = rng.uniform() < 0.3;
        for (auto& x : u) x = ties ? static_cast<double>(rng.below(3)) : 10.0 * rng.uniform();
        const double beta = 2.2 * rng.uniform();
        const auto q = inner_max_transition(p, beta, u);
        double value = 0.0, l1 = 0.0, sum = 0.0, qmin = 1.0;
        for (int k = 0; k < n; ++k) {
            value += q[k] * u[k];
            l1 += std::fabs(q[k] - p[k]);
            sum += q[k];
            qmin = std::min(qmin, q[k]);
        }
        const double want = lp::inner_max_value(p, beta, u);
        const double err = std::fabs(value - want);
        worst = std::max(worst, err);
        const bool feasible = std::fabs(sum - 1.0) <= 1e-12 && qmin >= 0.0 && l1 <= beta + 1e-12;
        if (err > 1e-9 || !feasible) ++bad;
    }
    add(rep, "inner_max_vs_lp(" + std::to_string(triples) + ")", worst, 1e-9, bad == 0,
        std::to_string(bad) + " mismatches");
    rep.seconds = seconds_since(start);
    return rep;
}

VerifyReport verify_invariants(int instances, std::uint64_t seed) {
    const auto start = Clock::now();
    VerifyReport rep;
    rep.suite = "invariants";
    CounterRng rng(seed ^ 0x696e76ULL);
    int made = 0;
    for (std::uint64_t attempt = 0; made < instances; ++attempt) {
        const int n = uniform_int(rng, 2, 6);
        const int na = uniform_int(rng, 1, 3);
        const Mdp m = random_mdp(n, na, seed * 100000 + attempt, uniform_int(rng, 1, n));
        Policy pi;
        for (int s = 0; s < n; ++s) pi.action.push_back(static_cast<int>(rng.below(na)));
        if (closed_class_count(m, pi) != 1) continue;
        const auto gb = evaluate_policy(m, pi);
        const std::string id = "[" + std::to_string(made) + "]";
        add(rep, "poisson_residual" + id, gb.residual, 1e-10, gb.residual <= 1e-10);
        const auto opt = optimal_gain(m, 1e-12);
        const double sp = span(opt.bias);
        const double dia = diameter(m);
        add(rep, "bias_span" + id, sp, dia, sp <= dia + 1e-6);
        ++made;
    }
    rep.seconds = seconds_since(start);
    return rep;
}

nlohmann::ordered_json TraceCheck::to_json() const {
    nlohmann::ordered_json j;
    j["steps_checked"] = steps_checked;
    j["cap_violations"] = cap_violations;
    j["bridge_violations"] = bridge_violations;
    j["literal_bridge_violations"] = literal_bridge_violations;
    j["eps_grid_violations"] = eps_grid_violations;
    j["episode_end_violations"] = episode_end_violations;
    j["episodes"] = episodes;
    j["episode_bound"] = episode_bound;
    j["eps_bound_violations"] = eps_bound_violations;
    j["ok"] = ok();
    return j;
}

double episode_bound(const TraceSummary& summary, int num_actions, double eps0) {
    double total_states = 0.0;
    double extra = 0.0;
    for (const auto& m : summary.models) {
        total_states += m.num_states;
        if (m.known_epsilon > eps0) extra += std::log2(m.known_epsilon / eps0);
    }
    const double sa = total_states * num_actions;
    return sa * std::log2(2.0 * static_cast<double>(summary.steps) / sa) + extra;
}

TraceCheck check_trace(const std::vector<TraceEvent>& events, const TraceSummary& summary, int num_actions,
                       double eps0) {
    TraceCheck out;
    double pen = 0.0;
    int j = 1;
    std::int64_t episode_ends = 0;
    bool pending_episode_end = false;
    for (const auto& e : events) {
        switch (e.type) {
        case TraceEvent::Type::run_start:
            pen = e.pen;
            j = e.j;
            break;
        case TraceEvent::Type::step: {
            ++out.steps_checked;
            const double cap = std::ldexp(1.0, j);
            if (static_cast<double>(e.ell) > cap) ++out.cap_violations;
            const double slack = 1e-9 * std::max(1.0, e.lob);
            if (e.lob > cap * pen + slack) ++out.bridge_violations;
            if (e.lob > static_cast<double>(e.ell) * pen + slack) ++out.literal_bridge_violations;
            break;
        }
        case TraceEvent::Type::eps_doubled: {
            const double m = std::log2(e.eps / eps0);
            if (std::fabs(m - std::round(m)) > 1e-9 || m < 1.0 - 1e-9) ++out.eps_grid_violations;
            break;
        }
        case TraceEvent::Type::run_end:
            if (e.reason == "episode_end") pending_episode_end = true;
            else if (e.reason != "length_cap") ++out.episode_end_violations;
            break;
        case TraceEvent::Type::episode_end:
            ++episode_ends;
            if (e.reason != "test_fail" && e.reason != "doubling") ++out.episode_end_violations;
            if (!pending_episode_end) ++out.episode_end_violations;
            pending_episode_end = false;
            break;
        default:
            break;
        }
    }
    // The last episode is still open at T unless it closed on the final step.
    out.episodes = summary.episodes;
    if (episode_ends != summary.episodes - 1) ++out.episode_end_violations;
    out.episode_bound = episode_bound(summary, num_actions, eps0);
    for (const auto& m : summary.models) {
        if (m.known_epsilon < 0.0) continue;
        if (m.final_eps_tilde > std::max(eps0, 2.0 * m.known_epsilon) * (1.0 + 1e-12)) ++out.eps_bound_violations;
    }
    return out;
}

} // namespace oams
