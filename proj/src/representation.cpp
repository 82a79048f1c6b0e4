#include "oams/representation.hpp"

#include "oams/errors.hpp"

#include <algorithm>
#include <limits>

namespace oams {

const char* to_string(ModelSpec::Kind kind) noexcept {
    switch (kind) {
    case ModelSpec::Kind::identity: return "identity";
    case ModelSpec::Kind::aggregation: return "aggregation";
    case ModelSpec::Kind::window: return "window";
    case ModelSpec::Kind::constant: return "constant";
    }
    return "unknown";
}

std::int64_t window_state_count(int k, int num_observations) {
    std::int64_t total = 0;
    std::int64_t power = 1;
    for (int l = 1; l <= k; ++l) {
        if (power > std::numeric_limits<int>::max() / num_observations)
            throw Error(ErrorKind::DomainError, "window model state space too large");
        power *= num_observations;
        total += power;
    }
    if (total > std::numeric_limits<int>::max()) throw Error(ErrorKind::DomainError, "window model state space too large");
    return total;
}

ModelSpec ModelSpec::identity(int num_observations) {
    ModelSpec spec;
    spec.kind = Kind::identity;
    spec.num_states = num_observations;
    spec.num_observations = num_observations;
    return spec;
}

ModelSpec ModelSpec::aggregation(std::vector<int> alpha) {
    if (alpha.empty()) throw Error(ErrorKind::InvalidAlpha, "empty aggregation");
    ModelSpec spec;
    spec.kind = Kind::aggregation;
    spec.num_observations = static_cast<int>(alpha.size());
    spec.num_states = *std::max_element(alpha.begin(), alpha.end()) + 1;
    std::vector<char> hit(spec.num_states, 0);
    for (int v : alpha) {
        if (v < 0) throw Error(ErrorKind::InvalidAlpha, "negative alpha value");
        hit[v] = 1;
    }
    if (std::find(hit.begin(), hit.end(), 0) != hit.end())
        throw Error(ErrorKind::InvalidAlpha, "aggregation is not surjective");
    spec.alpha = std::move(alpha);
    return spec;
}

ModelSpec ModelSpec::window_of(int k, int num_observations) {
    if (k < 1) throw Error(ErrorKind::DomainError, "window length must be >= 1");
    ModelSpec spec;
    spec.kind = Kind::window;
    spec.window = k;
    spec.num_observations = num_observations;
    spec.num_states = static_cast<int>(window_state_count(k, num_observations));
    return spec;
}

ModelSpec ModelSpec::constant(int num_observations) {
    ModelSpec spec;
    spec.kind = Kind::constant;
    spec.num_states = 1;
    spec.num_observations = num_observations;
    return spec;
}

std::string ModelSpec::label() const {
    std::string out = to_string(kind);
    if (kind == Kind::window) out += "(" + std::to_string(window) + ")";
    if (kind == Kind::aggregation) {
        out += "(";
        for (std::size_t i = 0; i < alpha.size(); ++i) out += (i ? "," : "") + std::to_string(alpha[i]);
        out += ")";
    }
    return out;
}

StateRepModel::StateRepModel(ModelSpec spec) : spec_(std::move(spec)) {
    if (spec_.num_observations < 1 || spec_.num_states < 1) throw Error(ErrorKind::DomainError, "empty model");
    if (spec_.kind == ModelSpec::Kind::identity && spec_.num_states != spec_.num_observations)
        throw Error(ErrorKind::DomainError, "identity model needs S_phi = S");
    if (spec_.kind == ModelSpec::Kind::aggregation) {
        if (static_cast<int>(spec_.alpha.size()) != spec_.num_observations)
            throw Error(ErrorKind::InvalidAlpha, "alpha size differs from the observation count");
        std::vector<char> hit(spec_.num_states, 0);
        for (int v : spec_.alpha) {
            if (v < 0 || v >= spec_.num_states) throw Error(ErrorKind::InvalidAlpha, "alpha value out of range");
            hit[v] = 1;
        }
        if (std::find(hit.begin(), hit.end(), 0) != hit.end())
            throw Error(ErrorKind::InvalidAlpha, "aggregation is not surjective");
    }
    if (spec_.kind == ModelSpec::Kind::window &&
        spec_.num_states != window_state_count(spec_.window, spec_.num_observations))
        throw Error(ErrorKind::DomainError, "window model declares the wrong state count");
}

int StateRepModel::reset(int first_observation) {
    recent_.clear();
    return observe(first_observation);
}

int StateRepModel::step(int /*action*/, double /*reward*/, int observation) { return observe(observation); }

int StateRepModel::observe(int o) {
    if (o < 0 || o >= spec_.num_observations)
        throw Error(ErrorKind::ObservationOutOfRange, "observation " + std::to_string(o) + " outside [0, " +
                                                          std::to_string(spec_.num_observations) + ")");
    switch (spec_.kind) {
    case ModelSpec::Kind::identity: state_ = o; break;
    case ModelSpec::Kind::aggregation: state_ = spec_.alpha[o]; break;
    case ModelSpec::Kind::constant: state_ = 0; break;
    case ModelSpec::Kind::window:
        recent_.push_back(o);
        if (static_cast<int>(recent_.size()) > spec_.window) recent_.pop_front();
        state_ = window_index();
        break;
    }
    return state_;
}

int StateRepModel::window_index() const {
    // Histories of length L occupy [offset(L), offset(L) + n^L).
    const std::int64_t n = spec_.num_observations;
    const int len = static_cast<int>(recent_.size());
    std::int64_t offset = 0;
    std::int64_t power = 1;
    for (int l = 1; l < len; ++l) {
        power *= n;
        offset += power;
    }
    std::int64_t code = 0;
    for (int o : recent_) code = code * n + o;
    return static_cast<int>(offset + code);
}

ModelStatistics::ModelStatistics(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions) {
    if (num_states < 1 || num_actions < 1) throw Error(ErrorKind::DomainError, "statistics need S, A >= 1");
    const auto pairs = static_cast<std::size_t>(num_states) * num_actions;
    visits_.assign(pairs, 0);
    reward_sum_.assign(pairs, 0.0);
    transitions_.assign(pairs * num_states, 0);
    episode_start_.assign(pairs, 0);
    episode_counts_.assign(pairs, 0);
    run_counts_.assign(pairs, 0);
}

std::size_t ModelStatistics::at(int s, int a) const {
    if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
        throw Error(ErrorKind::IndexOutOfRange, "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")");
    return static_cast<std::size_t>(s) * num_actions_ + a;
}

void ModelStatistics::record_transition(int s, int a, double r, int s_next) {
    const std::size_t i = at(s, a);
    if (s_next < 0 || s_next >= num_states_)
        throw Error(ErrorKind::IndexOutOfRange, "next state " + std::to_string(s_next));
    ++visits_[i];
    reward_sum_[i] += r;
    ++transitions_[i * num_states_ + s_next];
    ++episode_counts_[i];
    ++run_counts_[i];
    ++run_steps_;
    ++total_steps_;
}

void ModelStatistics::start_episode() {
    episode_start_ = visits_;
    std::fill(episode_counts_.begin(), episode_counts_.end(), 0);
}

void ModelStatistics::start_run() {
    std::fill(run_counts_.begin(), run_counts_.end(), 0);
    run_steps_ = 0;
}

Estimate empirical_estimates(const ModelStatistics& stats, int s, int a) {
    const int n = stats.num_states();
    Estimate est;
    const std::int64_t visits = stats.count(s, a);
    if (visits == 0) {
        est.p_hat.assign(n, 1.0 / n);
        return est;
    }
    const double inv = 1.0 / static_cast<double>(visits);
    est.r_hat = stats.reward_sum(s, a) * inv;
    est.p_hat.resize(n);
    for (int k = 0; k < n; ++k) est.p_hat[k] = static_cast<double>(stats.transition_count(s, a, k)) * inv;
    return est;
}

} // namespace oams
