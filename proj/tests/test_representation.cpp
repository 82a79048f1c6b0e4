#include "oams/errors.hpp"
#include "oams/representation.hpp"

#include <doctest.h>

#include <set>

using namespace oams;

TEST_SUITE("representation") {

TEST_CASE("identity, aggregation and constant maps") {
    StateRepModel id(ModelSpec::identity(5));
    CHECK(id.reset(3) == 3);
    CHECK(id.step(0, 0.0, 1) == 1);

    StateRepModel agg(ModelSpec::aggregation({0, 0, 1}));
    CHECK(agg.num_states() == 2);
    CHECK(agg.reset(1) == 0);
    CHECK(agg.step(0, 1.0, 2) == 1);

    StateRepModel c(ModelSpec::constant(4));
    CHECK(c.reset(3) == 0);
    CHECK(c.step(1, 0.5, 2) == 0);
}

TEST_CASE("window states are canonical and cover the state count") {
    const auto spec = ModelSpec::window_of(2, 6);
    CHECK(spec.num_states == 6 + 36);
    CHECK(window_state_count(3, 2) == 2 + 4 + 8);
    StateRepModel w(spec);
    const int first = w.reset(2);
    CHECK(first == 2);
    const int s25 = w.step(0, 0.0, 5);
    CHECK(s25 == 6 + 2 * 6 + 5);
    StateRepModel w2(spec);
    w2.reset(4);
    w2.step(1, 1.0, 2);
    CHECK(w2.step(0, 0.0, 5) == s25);

    // Every history maps to a distinct index in range.
    std::set<int> seen;
    StateRepModel w3(ModelSpec::window_of(2, 3));
    for (int a = 0; a < 3; ++a) {
        seen.insert(w3.reset(a));
        for (int b = 0; b < 3; ++b) {
            w3.reset(a);
            seen.insert(w3.step(0, 0.0, b));
        }
    }
    CHECK(seen.size() == 12);
    CHECK(*seen.rbegin() == 11);
}

TEST_CASE("bad observations and specs") {
    StateRepModel id(ModelSpec::identity(3));
    try {
        id.reset(3);
        FAIL("expected ObservationOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ObservationOutOfRange);
    }
    CHECK_THROWS_AS(ModelSpec::aggregation({0, 2}), Error);
    CHECK_THROWS_AS(ModelSpec::window_of(0, 3), Error);
    CHECK_THROWS_AS(window_state_count(40, 10), Error);
}

TEST_CASE("labels") {
    CHECK(ModelSpec::identity(3).label() == "identity");
    CHECK(ModelSpec::aggregation({0, 0, 1}).label() == "aggregation(0,0,1)");
    CHECK(ModelSpec::window_of(2, 3).label() == "window(2)");
    CHECK(ModelSpec::constant(3).label() == "constant");
}

TEST_CASE("statistics counters") {
    ModelStatistics st(2, 2);
    st.start_episode();
    st.start_run();
    st.record_transition(0, 1, 1.0, 1);
    st.record_transition(0, 1, 0.0, 0);
    st.record_transition(1, 0, 1.0, 1);
    CHECK(st.count(0, 1) == 2);
    CHECK(st.effective_count(1, 1) == 1);
    CHECK(st.reward_sum(0, 1) == 1.0);
    CHECK(st.transition_count(0, 1, 1) == 1);
    CHECK(st.episode_count(0, 1) == 2);
    CHECK(st.run_count(1, 0) == 1);
    CHECK(st.run_steps() == 3);
    st.start_episode();
    CHECK(st.episode_start_count(0, 1) == 2);
    CHECK(st.episode_count(0, 1) == 0);
    CHECK(st.run_count(0, 1) == 2);
    st.start_run();
    CHECK(st.run_count(0, 1) == 0);
    CHECK(st.total_steps() == 3);
    try {
        st.count(2, 0);
        FAIL("expected IndexOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndexOutOfRange);
    }
    CHECK_THROWS_AS(st.record_transition(0, 0, 0.0, 5), Error);
}

TEST_CASE("empirical estimates") {
    ModelStatistics st(2, 1);
    auto e0 = empirical_estimates(st, 0, 0);
    CHECK(e0.r_hat == 0.0);
    CHECK(e0.p_hat == std::vector<double>{0.5, 0.5});
    for (double r : {1.0, 1.0, 0.0, 0.0}) st.record_transition(1, 0, r, 0);
    CHECK(empirical_estimates(st, 1, 0).r_hat == 0.5);
    ModelStatistics st2(2, 1);
    st2.record_transition(0, 0, 0.0, 0);
    st2.record_transition(0, 0, 0.0, 0);
    st2.record_transition(0, 0, 0.0, 0);
    st2.record_transition(0, 0, 0.0, 1);
    CHECK(empirical_estimates(st2, 0, 0).p_hat == std::vector<double>{0.75, 0.25});
}

}
