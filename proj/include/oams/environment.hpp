#pragma once

#include "oams/mdp.hpp"
#include "oams/rng.hpp"

#include <cstdint>

namespace oams {

enum class RewardMode {
    bernoulli,      // r_t in {0, 1} with mean r(s, a)
    deterministic,  // r_t = r(s, a)
};

/// Markov environment: the observation is the true state index and
/// (r_t, o_{t+1}) depends only on (o_t, a_t).
class Environment {
public:
    Environment(Mdp mdp, std::uint64_t seed, int initial_state = 0, RewardMode mode = RewardMode::bernoulli);

    struct Outcome {
        double reward;
        int observation;
    };

    Outcome step(int action);

    int observation() const noexcept { return state_; }
    const Mdp& mdp() const noexcept { return mdp_; }
    int num_actions() const noexcept { return mdp_.num_actions(); }

private:
    Mdp mdp_;
    CounterRng rng_;
    RewardMode mode_;
    int state_;
};

} // namespace oams
