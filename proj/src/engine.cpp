#include "oams/engine.hpp"

#include "oams/errors.hpp"

#include <algorithm>
#include <cmath>

namespace oams {

void validate(const OamsConfig& config) {
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw Error(ErrorKind::DomainError, "delta must lie in (0,1)");
    if (!(config.eps0 > 0.0 && config.eps0 < 1.0)) throw Error(ErrorKind::DomainError, "eps0 must lie in (0,1)");
    if (!(config.precision_scale > 0.0)) throw Error(ErrorKind::DomainError, "precision scale must be > 0");
    if (config.evi_max_sweeps < 1) throw Error(ErrorKind::DomainError, "EVI sweep cap must be >= 1");
}

double penalty(double span_plus, int num_states, int num_actions, double eps_tilde, double t, int j, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::DomainError, "delta must lie in (0,1)");
    if (!(t >= 1.0) || j < 1) throw Error(ErrorKind::DomainError, "penalty needs t >= 1 and j >= 1");
    const double S = num_states;
    const double A = num_actions;
    const double log_sa = confidence_log(num_states, num_actions, t, delta);
    const double log_t = std::log(24.0 * t * t / delta);
    const double bracket = (span_plus * std::sqrt(2.0 * S) + 3.0 / std::sqrt(2.0)) * std::sqrt(S * A * log_sa) +
                           span_plus * std::sqrt(2.0 * log_t);
    return std::pow(2.0, -0.5 * j) * bracket + std::pow(2.0, -j) * span_plus + eps_tilde * (span_plus + 3.0);
}

int select_model(std::span<const Candidate> candidates) {
    if (candidates.empty()) throw Error(ErrorKind::EmptyModelSet, "no model left to select");
    const Candidate* best = &candidates.front();
    for (const auto& c : candidates.subspan(1)) {
        const double lhs = c.rho - c.pen;
        const double rhs = best->rho - best->pen;
        if (lhs > rhs || (lhs == rhs && (c.num_states < best->num_states ||
                                         (c.num_states == best->num_states && c.model < best->model))))
            best = &c;
    }
    return best->model;
}

double lob(const RunContext& ctx, const ModelStatistics& stats, double delta) {
    const double t0 = static_cast<double>(ctx.t_start);
    const double S = ctx.num_states;
    const double log_sa = confidence_log(ctx.num_states, stats.num_actions(), t0, delta);
    const double log_t = std::log(24.0 * t0 * t0 / delta);
    double root_sum = 0.0;
    for (int s = 0; s < stats.num_states(); ++s)
        for (int a = 0; a < stats.num_actions(); ++a)
            root_sum += std::sqrt(static_cast<double>(stats.run_count(s, a)) * log_sa);
    const double ell = static_cast<double>(ctx.length);
    const double sp = ctx.span_plus;
    return (sp * std::sqrt(2.0 * S) + 3.0 / std::sqrt(2.0)) * root_sum + sp * std::sqrt(2.0 * ell * log_t) + sp +
           ctx.eps_tilde * ell * (sp + 3.0);
}

TestResult reward_test(const RunContext& ctx, const ModelStatistics& stats, double delta) {
    TestResult out;
    out.lob = lob(ctx, stats, delta);
    out.threshold = static_cast<double>(ctx.length) * ctx.rho - out.lob;
    out.pass = !(ctx.run_reward < out.threshold);
    return out;
}

Engine::Engine(std::vector<ModelSpec> specs, int num_actions, OamsConfig config, EventSink sink)
    : config_(config), num_actions_(num_actions), sink_(std::move(sink)) {
    validate(config_);
    if (specs.empty()) throw Error(ErrorKind::EmptyModelSet, "the model set is empty");
    if (num_actions < 1) throw Error(ErrorKind::DomainError, "need at least one action");
    const double eps_start = config_.mode == Mode::oams ? config_.eps0 : 0.0;
    for (auto& spec : specs) {
        stats_.emplace_back(spec.num_states, num_actions);
        models_.emplace_back(std::move(spec));
    }
    const std::size_t n = models_.size();
    eps_tilde_.assign(n, eps_start);
    doublings_.assign(n, 0);
    rejected_.assign(n, 0);
    selections_.assign(n, 0);
    active_steps_.assign(n, 0);
}

int Engine::start(int first_observation) {
    for (auto& m : models_) m.reset(first_observation);
    t_ = 1;
    last_observation_ = first_observation;
    run_.k = 1;
    begin_episode();
    started_ = true;
    last_action_ = current_action();
    return last_action_;
}

void Engine::begin_episode() {
    for (auto& s : stats_) s.start_episode();
    runs_per_episode_.push_back(0);
    begin_run(1);
}

void Engine::begin_run(int j) {
    for (auto& s : stats_) s.start_run();
    const double t = static_cast<double>(t_);
    EviOptions options;
    options.precision = config_.precision_scale / std::sqrt(t);
    options.max_sweeps = config_.evi_max_sweeps;

    std::vector<Candidate> candidates;
    std::vector<EviResult> plans(models_.size());
    for (std::size_t i = 0; i < models_.size(); ++i) {
        if (rejected_[i]) continue;
        const auto bounds = confidence_bounds(stats_[i], t, config_.delta, eps_tilde_[i]);
        plans[i] = extended_value_iteration(stats_[i], bounds, options);
        const double pen = penalty(plans[i].span_plus, models_[i].num_states(), num_actions_, eps_tilde_[i], t, j,
                                   config_.delta);
        candidates.push_back({static_cast<int>(i), plans[i].rho_hat_plus, pen, models_[i].num_states()});
    }
    const int chosen = select_model(candidates);
    const auto& c = *std::find_if(candidates.begin(), candidates.end(), [&](const Candidate& x) { return x.model == chosen; });

    run_.j = j;
    run_.t_start = t_;
    run_.model = chosen;
    run_.rho = c.rho;
    run_.pen = c.pen;
    run_.span_plus = plans[chosen].span_plus;
    run_.eps_tilde = eps_tilde_[chosen];
    run_.num_states = models_[chosen].num_states();
    run_.policy = std::move(plans[chosen].policy_plus);
    run_.run_reward = 0.0;
    run_.length = 0;
    ++selections_[chosen];
    ++runs_per_episode_.back();

    TraceEvent e;
    e.type = TraceEvent::Type::run_start;
    e.t = t_;
    e.k = run_.k;
    e.j = j;
    e.model = chosen;
    e.rho = run_.rho;
    e.pen = run_.pen;
    e.span = run_.span_plus;
    emit(e);
}

int Engine::current_action() const { return run_.policy.action[models_[run_.model].state()]; }

int Engine::advance(double reward, int next_observation) {
    if (!started_) throw Error(ErrorKind::DomainError, "engine used before start()");
    const int a = last_action_;
    const int cur = run_.model;
    const int s_cur = models_[cur].state();
    for (std::size_t i = 0; i < models_.size(); ++i) {
        const int s = models_[i].state();
        const int s_next = models_[i].step(a, reward, next_observation);
        stats_[i].record_transition(s, a, reward, s_next);
    }
    ++active_steps_[cur];
    run_.run_reward += reward;
    run_.length = t_ - run_.t_start + 1;

    const TestResult test = reward_test(run_, stats_[cur], config_.delta);
    {
        TraceEvent e;
        e.type = TraceEvent::Type::step;
        e.t = t_;
        e.s = last_observation_;
        e.a = a;
        e.r = reward;
        e.ell = run_.length;
        e.lob = test.lob;
        emit(e);
    }

    const char* episode_reason = nullptr;
    const char* run_reason = nullptr;
    if (!test.pass) {
        ++test_failures_;
        TraceEvent e;
        e.type = TraceEvent::Type::test_fail;
        e.t = t_;
        e.model = cur;
        e.lob = test.lob;
        e.threshold = test.threshold;
        e.run_reward = run_.run_reward;
        emit(e);
        if (config_.mode == Mode::oams) {
            eps_tilde_[cur] *= 2.0;
            ++doublings_[cur];
            TraceEvent d;
            d.type = TraceEvent::Type::eps_doubled;
            d.t = t_;
            d.model = cur;
            d.eps = eps_tilde_[cur];
            emit(d);
        } else {
            rejected_[cur] = 1;
            TraceEvent d;
            d.type = TraceEvent::Type::model_rejected;
            d.t = t_;
            d.model = cur;
            emit(d);
        }
        episode_reason = "test_fail";
        run_reason = "episode_end";
    } else if (stats_[cur].episode_count(s_cur, a) >= std::max<std::int64_t>(stats_[cur].episode_start_count(s_cur, a), 1)) {
        ++doubling_ends_;
        episode_reason = "doubling";
        run_reason = "episode_end";
    } else if (run_.length >= (std::int64_t{1} << run_.j)) {
        run_reason = "length_cap";
    }

    if (run_reason != nullptr) {
        TraceEvent e;
        e.type = TraceEvent::Type::run_end;
        e.t = t_;
        e.k = run_.k;
        e.j = run_.j;
        e.reason = run_reason;
        emit(e);
    }
    if (episode_reason != nullptr) {
        TraceEvent e;
        e.type = TraceEvent::Type::episode_end;
        e.t = t_;
        e.k = run_.k;
        e.reason = episode_reason;
        emit(e);
    }

    ++t_;
    last_observation_ = next_observation;
    if (episode_reason != nullptr) {
        ++run_.k;
        begin_episode();
    } else if (run_reason != nullptr) {
        begin_run(run_.j + 1);
    }
    last_action_ = current_action();
    return last_action_;
}

RunOutput run_oams(Environment& env, const std::vector<ModelSpec>& specs, std::int64_t steps, const OamsConfig& config,
                   EventSink sink) {
    if (steps < 1) throw Error(ErrorKind::DomainError, "T must be >= 1");
    for (const auto& spec : specs)
        if (spec.num_observations != env.mdp().num_states())
            throw Error(ErrorKind::DomainError, "model '" + spec.label() + "' expects " +
                                                    std::to_string(spec.num_observations) + " observations");
    const double rho_star = optimal_gain(env.mdp(), 1e-10).gain;

    Engine engine(specs, env.num_actions(), config, std::move(sink));
    RunOutput out;
    out.regret.reserve(static_cast<std::size_t>(steps));
    int action = engine.start(env.observation());
    double cum = 0.0;
    double late = 0.0;
    const std::int64_t half = steps - steps / 2;  // last T/2 steps are t > half
    for (std::int64_t t = 1; t <= steps; ++t) {
        const auto outcome = env.step(action);
        cum += outcome.reward;
        if (t > half) late += outcome.reward;
        out.regret.push_back({t, outcome.reward, cum, static_cast<double>(t) * rho_star - cum});
        action = engine.advance(outcome.reward, outcome.observation);
    }

    auto& s = out.summary;
    s.steps = steps;
    s.episodes = engine.episodes();
    s.runs_per_episode = engine.runs_per_episode();
    s.test_failures = engine.test_failures();
    s.doubling_ends = engine.doubling_ends();
    s.rho_star = rho_star;
    s.total_reward = cum;
    s.mean_reward_last_half = steps / 2 > 0 ? late / static_cast<double>(steps / 2) : cum;
    s.final_regret = out.regret.back().regret;
    for (int i = 0; i < engine.num_models(); ++i) {
        ModelSummary m;
        m.label = engine.model(i).spec().label();
        m.num_states = engine.model(i).num_states();
        m.final_eps_tilde = engine.eps_tilde(i);
        m.doublings = engine.doublings(i);
        m.rejected = engine.rejected(i);
        m.selections = engine.selections(i);
        m.steps = engine.active_steps(i);
        m.known_epsilon = engine.model(i).spec().epsilon.value_or(-1.0);
        s.models.push_back(std::move(m));
    }
    return out;
}

} // namespace oams
