#include "oams/environment.hpp"

#include "oams/errors.hpp"

namespace oams {

Environment::Environment(Mdp mdp, std::uint64_t seed, int initial_state, RewardMode mode)
    : mdp_(std::move(mdp)), rng_(seed), mode_(mode), state_(initial_state) {
    if (initial_state < 0 || initial_state >= mdp_.num_states())
        throw Error(ErrorKind::IndexOutOfRange, "initial state out of range");
}

Environment::Outcome Environment::step(int action) {
    if (action < 0 || action >= mdp_.num_actions()) throw Error(ErrorKind::IndexOutOfRange, "action out of range");
    const double mean = mdp_.reward(state_, action);
    double reward = mean;
    if (mode_ == RewardMode::bernoulli) reward = rng_.uniform() < mean ? 1.0 : 0.0;

    const auto row = mdp_.row(state_, action);
    const double u = rng_.uniform();
    double acc = 0.0;
    int next = static_cast<int>(row.size()) - 1;
    for (std::size_t k = 0; k < row.size(); ++k) {
        acc += row[k];
        if (u < acc) {
            next = static_cast<int>(k);
            break;
        }
    }
    // Rounding can leave acc slightly below 1; land on the last state with mass.
    while (row[next] == 0.0 && next > 0) --next;
    state_ = next;
    return {reward, next};
}

} // namespace oams
