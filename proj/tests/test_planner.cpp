#include "lp.hpp"
#include "oams/errors.hpp"
#include "oams/planner.hpp"
#include "oams/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace oams;

namespace {

ModelStatistics stats_with(int n, int na, int visits) {
    ModelStatistics st(n, na);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < na; ++a)
            for (int i = 0; i < visits; ++i) st.record_transition(s, a, 0.5, (s + i) % n);
    return st;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double x = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) x += a[i] * b[i];
    return x;
}

} // namespace

TEST_SUITE("planner") {

TEST_CASE("confidence radii worked example") {
    const auto st = stats_with(2, 1, 4);
    const auto b = confidence_bounds(st, 10.0, 0.1, 0.0);
    // sqrt(ln(960000) / 8) and sqrt(4 ln(960000) / 4), evaluated by hand.
    CHECK(std::fabs(b.reward_at(0, 0) - 1.3121875134410106) <= 1e-12);
    CHECK(std::fabs(b.transition_at(1, 0) - 3.71142675576981) <= 1e-12);
    const auto shifted = confidence_bounds(st, 10.0, 0.1, 0.3);
    CHECK(std::fabs(shifted.reward_at(0, 0) - b.reward_at(0, 0) - 0.3) <= 1e-12);
    CHECK(std::fabs(shifted.transition_at(0, 0) - b.transition_at(0, 0) - 0.3) <= 1e-12);
    const auto more = confidence_bounds(stats_with(2, 1, 16), 10.0, 0.1, 0.0);
    CHECK(more.reward_at(0, 0) == doctest::Approx(b.reward_at(0, 0) / 2).epsilon(1e-12));
    CHECK(more.transition_at(0, 0) == doctest::Approx(b.transition_at(0, 0) / 2).epsilon(1e-12));
    // Unvisited pairs count as N = 1.
    const auto empty = confidence_bounds(ModelStatistics(2, 1), 10.0, 0.1, 0.0);
    CHECK(empty.reward_at(0, 0) == doctest::Approx(2 * b.reward_at(0, 0)));
}

TEST_CASE("confidence bounds reject bad arguments") {
    const ModelStatistics st(2, 1);
    for (auto [t, d, e] : {std::tuple{0.5, 0.1, 0.0}, std::tuple{10.0, 1.0, 0.0}, std::tuple{10.0, 0.1, -0.1}}) {
        try {
            confidence_bounds(st, t, d, e);
            FAIL("expected DomainError");
        } catch (const Error& err) {
            CHECK(err.kind() == ErrorKind::DomainError);
        }
    }
}

TEST_CASE("inner maximization worked cases") {
    const std::vector<double> p{0.5, 0.5};
    const std::vector<double> u{0.0, 1.0};
    const auto q = inner_max_transition(p, 0.4, u);
    CHECK(q[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(q[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(inner_max_transition(p, 0.0, u) == p);
    const auto all = inner_max_transition(std::vector<double>{0.2, 0.3, 0.5}, 2.0, std::vector<double>{0.1, 3.0, 1.0});
    CHECK(all[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(all[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(all[2] == doctest::Approx(0.0).epsilon(1e-15));
    // Ties go to the lower index.
    const auto tie = inner_max_transition(std::vector<double>{0.5, 0.25, 0.25}, 2.0, std::vector<double>{0.0, 1.0, 1.0});
    CHECK(tie[1] == 1.0);
}

TEST_CASE("inner maximization matches an LP") {
    CounterRng rng(2024);
    for (int i = 0; i < 300; ++i) {
        const int n = 2 + static_cast<int>(rng.below(5));
        std::vector<double> p(n), u(n);
        double total = 0.0;
        for (auto& x : p) total += (x = rng.uniform() < 0.3 ? 0.0 : rng.exponential());
        if (total == 0.0) p[n - 1] = total = 1.0;
        for (auto& x : p) x /= total;
        for (auto& x : u) x = static_cast<double>(rng.below(4)) + (i % 2 ? rng.uniform() : 0.0);
        const double beta = 2.5 * rng.uniform();
        const auto q = inner_max_transition(p, beta, u);
        double l1 = 0.0, sum = 0.0;
        for (int k = 0; k < n; ++k) {
            CHECK(q[k] >= 0.0);
            l1 += std::fabs(q[k] - p[k]);
            sum += q[k];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(l1 <= beta + 1e-12);
        CHECK(std::fabs(dot(q, u) - lp::inner_max_value(p, beta, u)) <= 1e-9);
    }
}

TEST_CASE("EVI one-state fixed point") {
    OptimisticProblem pr;
    pr.num_states = 1;
    pr.num_actions = 1;
    pr.r_hat = {0.5};
    pr.p_hat = {1.0};
    pr.reward_radius = {0.1};
    pr.transition_radius = {0.0};
    const auto r = extended_value_iteration(pr, EviOptions{});
    CHECK(r.rho_hat_plus == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.span_plus == 0.0);
    CHECK(r.converged);
}

TEST_CASE("EVI with zero radii on the alternating chain") {
    const Mdp alt(2, 1, {0.0, 1.0}, {0.0, 1.0, 1.0, 0.0});
    EviOptions o;
    o.precision = 1e-4;
    const auto r = extended_value_iteration(make_problem(alt), o);
    CHECK(r.rho_hat_plus >= 0.5 - 2e-4);
    CHECK(r.rho_hat_plus <= 0.5 + 1e-9);
    CHECK(r.u_plus.size() == 2);
    CHECK(*std::min_element(r.u_plus.begin(), r.u_plus.end()) == 0.0);
}

TEST_CASE("EVI optimism saturates with wide radii") {
    const Mdp m(2, 1, {0.2, 0.7}, {0.9, 0.1, 0.9, 0.1});
    EviOptions o;
    o.precision = 1e-6;
    const auto r = extended_value_iteration(make_problem(m, 0.1, 2.0), o);
    CHECK(r.rho_hat_plus >= 0.7 + 0.1 - 1e-6);
}

TEST_CASE("EVI with zero radii matches the gain oracle") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const Mdp m = random_mdp(4, 2, seed, 2);
        EviOptions o;
        o.precision = 1e-5;
        const auto r = extended_value_iteration(make_problem(m), o);
        CAPTURE(seed);
        CHECK(std::fabs(r.rho_hat_plus - oracle::optimal_gain(m)) <= 2e-5);
    }
}

TEST_CASE("EVI on empirical statistics") {
    const auto st = stats_with(3, 2, 50);
    const auto b = confidence_bounds(st, 301.0, 0.1, 0.0);
    EviOptions o;
    o.precision = 1.0 / std::sqrt(301.0);
    const auto r = extended_value_iteration(st, b, o);
    CHECK(r.policy_plus.action.size() == 3);
    CHECK(r.rho_hat_plus >= 0.5);
    CHECK(r.span_plus >= 0.0);
}

}
