#include "oams/approximation.hpp"
#include "oams/errors.hpp"
#include "oams/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace oams;

namespace {

// States 0 and 1 share rewards and rows; state 2 differs.
Mdp twins() {
    return Mdp(3, 1, {0.4, 0.4, 0.9}, {0.2, 0.3, 0.5, 0.2, 0.3, 0.5, 0.6, 0.1, 0.3});
}

void check_error_kind(auto&& fn, ErrorKind kind) {
    try {
        fn();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == kind);
    }
}

} // namespace

TEST_SUITE("approximation") {

TEST_CASE("aggregation maps") {
    const auto a = make_aggregation({0, 0, 1});
    CHECK(a.target_size == 2);
    CHECK(identity_aggregation(3).alpha == std::vector<int>{0, 1, 2});
    check_error_kind([] { make_aggregation({0, 2}); }, ErrorKind::InvalidAlpha);
    check_error_kind([] { make_aggregation({}); }, ErrorKind::InvalidAlpha);
    check_error_kind([] { make_aggregation({-1, 0}); }, ErrorKind::InvalidAlpha);
    check_error_kind([] { aggregate_mdp(twins(), make_aggregation({0, 1})); }, ErrorKind::InvalidAlpha);
}

TEST_CASE("merging identical states keeps their row and reward") {
    const Mdp bar = aggregate_mdp(twins(), make_aggregation({0, 0, 1}));
    REQUIRE(bar.num_states() == 2);
    CHECK(bar.reward(0, 0) == doctest::Approx(0.4));
    CHECK(bar.prob(0, 0, 0) == doctest::Approx(0.5));
    CHECK(bar.prob(0, 0, 1) == doctest::Approx(0.5));
    CHECK(bar.reward(1, 0) == doctest::Approx(0.9));
    CHECK(bar.prob(1, 0, 0) == doctest::Approx(0.7));
    CHECK(approximation_epsilon(twins(), bar, make_aggregation({0, 0, 1})).tight_epsilon <= 1e-15);
    CHECK(model_epsilon_for_aggregation(twins(), make_aggregation({0, 0, 1})) == 0.0);
}

TEST_CASE("identity aggregation leaves the MDP unchanged") {
    const Mdp m = random_mdp(4, 2, 3, 3);
    const auto id = identity_aggregation(4);
    const Mdp bar = aggregate_mdp(m, id);
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a) {
            CHECK(bar.reward(s, a) == doctest::Approx(m.reward(s, a)).epsilon(1e-14));
            for (int k = 0; k < 4; ++k) CHECK(bar.prob(s, a, k) == doctest::Approx(m.prob(s, a, k)).epsilon(1e-14));
        }
    CHECK(approximation_epsilon(m, m, id).tight_epsilon == 0.0);
    CHECK(model_epsilon_for_aggregation(m, id) == 0.0);
}

TEST_CASE("stationary weighting preserves the aggregated stationary distribution") {
    const auto inst = lower_bound_instance(0.2, 10.0);
    const Mdp bar = aggregate_mdp(inst.m, inst.alpha, Weighting::stationary);
    const auto mu = stationary_distribution(bar, Policy{{0, 0}});
    CHECK(std::fabs(mu[0] - 5.0 / 11) <= 1e-12);
    CHECK(std::fabs(mu[1] - 6.0 / 11) <= 1e-12);
}

TEST_CASE("tight epsilon of a reward-only merge") {
    const Mdp m(2, 1, {0.2, 0.4}, {0.5, 0.5, 0.5, 0.5});
    const Mdp bar(1, 1, {0.3}, {1.0});
    const auto rep = approximation_epsilon(m, bar, make_aggregation({0, 0}));
    CHECK(rep.tight_epsilon == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rep.tight_transition_error == 0.0);
}

TEST_CASE("model epsilon uses twice the L1 distance") {
    // |dr| = 0.05 and ||dp||_1 = 0.2 between states 0 and 1.
    const Mdp m(3, 1, {0.5, 0.55, 0.0}, {0.4, 0.3, 0.3, 0.3, 0.3, 0.4, 0.1, 0.1, 0.8});
    CHECK(model_epsilon_for_aggregation(m, make_aggregation({0, 0, 1})) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(model_epsilon_for_aggregation(m, identity_aggregation(3)) == 0.0);
}

TEST_CASE("gain error bound") {
    const Mdp m = random_mdp(4, 2, 21, 3);
    const auto id = identity_aggregation(4);
    const auto r0 = verify_theorem1(m, m, id);
    CHECK(r0.lhs <= 1e-9);
    CHECK(r0.holds);

    const auto inst = lower_bound_instance(0.2, 10.0);
    const auto r = verify_theorem1(inst.m, inst.m_bar, inst.alpha);
    CHECK(std::fabs(r.lhs - 1.0 / 22) <= 1e-9);
    CHECK(r.rhs == doctest::Approx(r.tight_epsilon * (r.diameter + 1.0)));
    CHECK(r.holds);

    CounterRng rng(77);
    int held = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const int na = 1 + static_cast<int>(rng.below(3));
        const Mdp mm = random_mdp(n, na, 500 + i, 2 + static_cast<int>(rng.below(n - 1)));
        const int c = 1 + static_cast<int>(rng.below(n));
        std::vector<int> alpha(n);
        for (int s = 0; s < n; ++s) alpha[s] = s < c ? s : static_cast<int>(rng.below(c));
        const auto map = make_aggregation(alpha);
        const Mdp bar = aggregate_mdp(mm, map);
        const auto rep = verify_theorem1(mm, bar, map);
        // Gains from the brute-force oracle, not optimal_gain.
        const double lhs = std::fabs(oracle::optimal_gain(mm) - oracle::optimal_gain(bar));
        CHECK(std::fabs(lhs - rep.lhs) <= 1e-7);
        if (lhs <= rep.rhs + 1e-6) ++held;
    }
    CHECK(held == 100);
}

TEST_CASE("lower-bound instance at eps 0.2, D 10") {
    const auto inst = lower_bound_instance(0.2, 10.0);
    const auto mu = inst.predicted_stationary();
    CHECK(mu[0] == doctest::Approx(2.0 / 11).epsilon(1e-14));
    CHECK(mu[1] == doctest::Approx(3.0 / 11).epsilon(1e-14));
    CHECK(mu[2] == doctest::Approx(6.0 / 11).epsilon(1e-14));
    CHECK(inst.predicted_gap == doctest::Approx(1.0 / 22).epsilon(1e-14));
    CHECK(inst.predicted_bound() == doctest::Approx(1.0 / 28).epsilon(1e-14));
    const double gap = std::fabs(oracle::optimal_gain(inst.m) - oracle::optimal_gain(inst.m_bar));
    CHECK(std::fabs(gap - 1.0 / 22) <= 1e-9);
    CHECK(gap > 1.0 / 28);
    CHECK(std::fabs(oracle::diameter(inst.m) - 10.0) <= 1e-6);
    CHECK(approximation_epsilon(inst.m, inst.m_bar, inst.alpha).tight_epsilon < 0.2);
}

TEST_CASE("lower-bound domain") {
    check_error_kind([] { lower_bound_instance(0.2, 25.0); }, ErrorKind::DomainError);
    check_error_kind([] { lower_bound_instance(0.2, 2.0); }, ErrorKind::DomainError);
    check_error_kind([] { lower_bound_instance(0.0, 5.0); }, ErrorKind::DomainError);
}

TEST_CASE("aggregated lower-bound chain is balanced on the grid") {
    for (double eps : {0.05, 0.1, 0.2, 0.4})
        for (double d : {3.0, 5.0, 10.0, 19.0}) {
            if (!(d < 4.0 / eps)) continue;
            CAPTURE(eps);
            CAPTURE(d);
            const auto inst = lower_bound_instance(eps, d);
            const auto mu = stationary_distribution(inst.m_bar, Policy{{0, 0}});
            CHECK(std::fabs(mu[0] - 0.5) <= 1e-12);
            CHECK(std::fabs(mu[1] - 0.5) <= 1e-12);
            const double gap = std::fabs(optimal_gain(inst.m, 1e-12).gain - optimal_gain(inst.m_bar, 1e-12).gain);
            const double e = eps / 2, dd = 2 / d;
            CHECK(std::fabs(gap - e / (2 * (3 * e + 4 * dd))) <= 1e-9);
            CHECK(gap > eps * d / 56);
            CHECK(std::fabs(diameter(inst.m) - d) <= 1e-6);
        }
}

}
