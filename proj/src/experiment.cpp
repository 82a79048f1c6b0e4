#include "oams/experiment.hpp"

#include "oams/approximation.hpp"
#include "oams/errors.hpp"
#include "oams/mdp_io.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace oams {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <class T>
T field(const json& doc, const char* key, const std::string& where) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(where + "." + key + " is missing or has the wrong type");
    }
}

template <class T>
T field_or(const json& doc, const char* key, T fallback, const std::string& where) {
    if (!doc.contains(key)) return fallback;
    return field<T>(doc, key, where);
}

EnvironmentSpec parse_environment(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) config_error("environment must be an object");
    EnvironmentSpec spec;
    if (doc.contains("file")) {
        std::filesystem::path p = field<std::string>(doc, "file", "environment");
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (!std::filesystem::exists(p)) config_error("environment.file '" + p.string() + "' does not exist");
        spec.file = p.string();
    } else {
        spec.generator = field<std::string>(doc, "generator", "environment");
        if (spec.generator == "random") {
            spec.num_states = field<int>(doc, "num_states", "environment");
            spec.num_actions = field<int>(doc, "num_actions", "environment");
            spec.seed = field<std::uint64_t>(doc, "seed", "environment");
            spec.support = field_or<int>(doc, "support", 3, "environment");
            if (spec.num_states < 1 || spec.num_actions < 1 || spec.support < 1)
                config_error("environment sizes must be >= 1");
        } else if (spec.generator != "alternating") {
            config_error("environment.generator must be 'random' or 'alternating'");
        }
    }
    const auto mode = field_or<std::string>(doc, "reward_mode", "bernoulli", "environment");
    if (mode == "bernoulli") spec.reward_mode = RewardMode::bernoulli;
    else if (mode == "deterministic") spec.reward_mode = RewardMode::deterministic;
    else config_error("environment.reward_mode must be 'bernoulli' or 'deterministic'");
    spec.initial_state = field_or<int>(doc, "initial_state", 0, "environment");
    return spec;
}

ModelEntry parse_model(const json& doc, std::size_t i) {
    const std::string where = "models[" + std::to_string(i) + "]";
    if (!doc.is_object()) config_error(where + " must be an object");
    ModelEntry e;
    const auto kind = field<std::string>(doc, "kind", where);
    if (kind == "identity") {
        e.kind = ModelSpec::Kind::identity;
    } else if (kind == "constant") {
        e.kind = ModelSpec::Kind::constant;
    } else if (kind == "window") {
        e.kind = ModelSpec::Kind::window;
        e.window = field<int>(doc, "k", where);
        if (e.window < 1) config_error(where + ".k must be >= 1");
    } else if (kind == "aggregation") {
        e.kind = ModelSpec::Kind::aggregation;
        e.alpha = field<std::vector<int>>(doc, "alpha", where);
    } else {
        config_error(where + ".kind '" + kind + "' is not one of identity, aggregation, window, constant");
    }
    if (doc.contains("epsilon")) e.epsilon = field<double>(doc, "epsilon", where);
    return e;
}

} // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) config_error("config must be an object");
    ExperimentConfig c;
    if (!doc.contains("environment")) config_error("config.environment is missing");
    c.environment = parse_environment(doc["environment"], base_dir);

    if (!doc.contains("models") || !doc["models"].is_array() || doc["models"].empty())
        config_error("config.models must be a non-empty array");
    for (std::size_t i = 0; i < doc["models"].size(); ++i) c.models.push_back(parse_model(doc["models"][i], i));

    c.steps = field<std::int64_t>(doc, "T", "config");
    if (c.steps < 1) config_error("config.T must be >= 1");
    c.engine.delta = field_or<double>(doc, "delta", 0.1, "config");
    c.engine.eps0 = field_or<double>(doc, "eps0", 0.01, "config");
    const auto mode = field_or<std::string>(doc, "mode", "oams", "config");
    if (mode == "oams") c.engine.mode = Mode::oams;
    else if (mode == "oms") c.engine.mode = Mode::oms;
    else config_error("config.mode must be 'oams' or 'oms'");
    c.engine.precision_scale = field_or<double>(doc, "precision_scale", 1.0, "config");
    c.engine.evi_max_sweeps = field_or<long>(doc, "evi_max_sweeps", 100'000, "config");
    try {
        validate(c.engine);
    } catch (const Error& e) {
        config_error(std::string("config: ") + e.what());
    }

    c.seeds = field_or<std::vector<std::uint64_t>>(doc, "seeds", {1}, "config");
    if (c.seeds.empty()) config_error("config.seeds must not be empty");
    std::filesystem::path out = field_or<std::string>(doc, "out_dir", "out", "config");
    if (out.is_relative() && !base_dir.empty()) out = base_dir / out;
    c.out_dir = out;
    c.stride = field_or<std::int64_t>(doc, "stride", 1, "config");
    if (c.stride < 1) config_error("config.stride must be >= 1");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        config_error("'" + path.string() + "': " + e.what());
    } catch (const Error& e) {
        config_error(e.what());
    }
    return parse_config(doc, path.parent_path());
}

Mdp alternating_chain() { return Mdp(2, 1, {0.0, 1.0}, {0.0, 1.0, 1.0, 0.0}); }

Mdp build_environment(const EnvironmentSpec& spec) {
    if (!spec.file.empty()) return load_mdp(spec.file);
    if (spec.generator == "alternating") return alternating_chain();
    return random_mdp(spec.num_states, spec.num_actions, spec.seed, spec.support);
}

std::vector<ModelSpec> build_models(const std::vector<ModelEntry>& entries, const Mdp& truth) {
    const int n = truth.num_states();
    std::vector<ModelSpec> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        ModelSpec spec;
        try {
            switch (e.kind) {
            case ModelSpec::Kind::identity:
                spec = ModelSpec::identity(n);
                spec.epsilon = 0.0;
                break;
            case ModelSpec::Kind::constant:
                spec = ModelSpec::constant(n);
                spec.epsilon = model_epsilon_for_aggregation(truth, make_aggregation(std::vector<int>(n, 0)));
                break;
            case ModelSpec::Kind::window:
                spec = ModelSpec::window_of(e.window, n);
                break;
            case ModelSpec::Kind::aggregation:
                spec = ModelSpec::aggregation(e.alpha);
                if (spec.num_observations != n)
                    config_error("models[" + std::to_string(i) + "].alpha has " +
                                 std::to_string(spec.num_observations) + " entries, the environment has " +
                                 std::to_string(n) + " states");
                spec.epsilon = model_epsilon_for_aggregation(truth, make_aggregation(e.alpha));
                break;
            }
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::ConfigError) throw;
            config_error("models[" + std::to_string(i) + "]: " + err.what());
        }
        if (e.epsilon) spec.epsilon = e.epsilon;
        out.push_back(std::move(spec));
    }
    return out;
}

SeedArtifacts simulate_seed(const ExperimentConfig& config, const Mdp& truth, std::uint64_t seed) {
    if (config.environment.initial_state < 0 || config.environment.initial_state >= truth.num_states())
        config_error("environment.initial_state is out of range");
    const auto specs = build_models(config.models, truth);
    Environment env(truth, seed, config.environment.initial_state, config.environment.reward_mode);

    SeedArtifacts out;
    out.seed = seed;
    const std::int64_t stride = config.stride;
    auto sink = [&](const TraceEvent& e) {
        if (e.type == TraceEvent::Type::step && e.t % stride != 0 && e.t != config.steps) return;
        out.events_jsonl += to_json_line(e);
        out.events_jsonl += '\n';
    };
    auto run = run_oams(env, specs, config.steps, config.engine, sink);
    out.summary = std::move(run.summary);
    out.regret_csv = regret_table(downsample(run.regret, stride));
    return out;
}

std::vector<SeedArtifacts> simulate(const ExperimentConfig& config) {
    const Mdp truth = [&] {
        try {
            return build_environment(config.environment);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::IoError) throw;
            config_error(std::string("environment: ") + e.what());
        }
    }();
    if (!is_communicating(truth)) config_error("environment MDP is not communicating");

    // One engine per seed, no shared state; results are joined in seed order.
    std::vector<SeedArtifacts> results(config.seeds.size());
    std::vector<std::exception_ptr> errors(config.seeds.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t begin = 0; begin < config.seeds.size(); begin += workers) {
        const std::size_t end = std::min(config.seeds.size(), begin + workers);
        std::vector<std::thread> pool;
        for (std::size_t i = begin; i < end; ++i)
            pool.emplace_back([&, i] {
                try {
                    results[i] = simulate_seed(config, truth, config.seeds[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (const auto& r : results) {
        const auto dir = config.out_dir / ("seed_" + std::to_string(r.seed));
        write_text_file(dir / "regret.csv", r.regret_csv);
        write_text_file(dir / "events.jsonl", r.events_jsonl);
        write_text_file(dir / "summary.json", to_json_text(r.summary));
    }
    return results;
}

AnalysisReport analyze(const Mdp& m) {
    AnalysisReport rep;
    rep.communicating = is_communicating(m);
    try {
        const auto opt = optimal_gain(m, 1e-10);
        rep.gain = opt.gain;
        rep.policy = opt.policy;
        rep.bias_span = span(opt.bias);
        if (closed_class_count(m, opt.policy) == 1) rep.stationary = stationary_distribution(m, opt.policy);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::MultichainPolicy &&
            e.kind() != ErrorKind::NotCommunicating)
            throw;
    }
    if (rep.communicating) rep.diameter = diameter(m);
    return rep;
}

nlohmann::ordered_json to_json(const AnalysisReport& r) {
    nlohmann::ordered_json j;
    j["communicating"] = r.communicating;
    j["rho_star"] = r.gain ? json(*r.gain) : json(nullptr);
    j["diameter"] = r.diameter ? json(*r.diameter) : json(nullptr);
    j["bias_span"] = r.bias_span ? json(*r.bias_span) : json(nullptr);
    j["stationary"] = r.stationary;
    j["policy"] = r.policy.action;
    return j;
}

void make_lower_bound(double eps, double diameter_param, const std::filesystem::path& out_dir) {
    const auto inst = lower_bound_instance(eps, diameter_param);
    save_mdp(inst.m, out_dir / "m.json");
    save_mdp(inst.m_bar, out_dir / "m_bar.json");
    write_text_file(out_dir / "alpha.json", json(inst.alpha.alpha).dump() + "\n");
    nlohmann::ordered_json j;
    j["eps"] = eps;
    j["diameter"] = diameter_param;
    j["predicted_gap"] = inst.predicted_gap;
    j["bound"] = inst.predicted_bound();
    j["predicted_stationary"] = inst.predicted_stationary();
    write_text_file(out_dir / "instance.json", j.dump(2) + "\n");
}

} // namespace oams
