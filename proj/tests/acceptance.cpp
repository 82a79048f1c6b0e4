// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail N]...
//
// Exit status is 0 when every criterion passes, or when exactly the listed
// criteria fail.

#include "oams/approximation.hpp"
#include "oams/engine.hpp"
#include "oams/experiment.hpp"
#include "oams/mdp.hpp"
#include "oams/kernels.hpp"
#include "oams/rng.hpp"
#include "oams/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace oams;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::map<int, bool> results;

void verdict(int id, bool pass, const std::string& detail) {
    results[id] = pass;
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------- 1

void criterion1() {
    const auto t0 = Clock::now();
    const auto single = verify_thm2(0.2, 10.0);
    const double single_s = since(t0);
    // Closed forms, evaluated here: gap 1/22, bound 1/28.
    bool literal = false;
    for (const auto& c : single.checks)
        if (c.name.rfind("gap_closed_form", 0) == 0) literal = std::fabs(c.lhs - 1.0 / 22) <= 1e-9 && c.lhs > 1.0 / 28;
    const auto grid = verify_thm2_grid();
    std::size_t cells = grid.checks.size() / 5;
    verdict(1, single.passed() && literal && grid.passed() && single_s < 1.0,
            fmt("gap=%.12f (1/22=%.12f) bound=%.12f; grid %zu cells, %zu failed checks; %.4fs",
                single.checks[0].lhs, 1.0 / 22, 1.0 / 28, cells, grid.failures(), single_s));
}

// ---------------------------------------------------------------- 2

void criterion2() {
    const auto t0 = Clock::now();
    const auto rep = verify_thm1(200, 1, 6, 3);
    const double s = since(t0);
    double worst = 0.0;
    for (const auto& c : rep.checks)
        if (c.rhs > 0) worst = std::max(worst, c.lhs / c.rhs);
    const std::size_t held = rep.checks.size() - rep.failures();
    verdict(2, held == 200 && s < 30.0, fmt("%zu/200 hold, max lhs/rhs %.4f over rhs > 0, %.2fs", held, worst, s));
}

// ---------------------------------------------------------------- 3

void criterion3() {
    const auto rep = verify_evi(50, 1000, 1e-3, 1);
    double worst_gain = 0.0;
    int gain_ok = 0;
    for (const auto& c : rep.checks)
        if (c.name.rfind("evi_gain", 0) == 0) {
            worst_gain = std::max(worst_gain, c.lhs);
            gain_ok += c.pass;
        }
    const auto& inner = rep.checks.back();
    verdict(3, rep.passed() && gain_ok == 50 && rep.seconds < 30.0,
            fmt("EVI gain %d/50 within 2e-3 (max err %.2e); inner max vs LP %s, max err %.2e (%s); %.2fs", gain_ok,
                worst_gain, inner.pass ? "ok" : "bad", inner.lhs, inner.note.c_str(), rep.seconds));
}

// ---------------------------------------------------------------- 4

void criterion4() {
    const auto rep = verify_invariants(100, 1);
    int residual_ok = 0, span_ok = 0;
    double worst_res = 0.0, worst_gap = -1e9;
    for (const auto& c : rep.checks) {
        if (c.name.rfind("poisson_residual", 0) == 0) {
            residual_ok += c.pass;
            worst_res = std::max(worst_res, c.lhs);
        } else {
            span_ok += c.pass;
            worst_gap = std::max(worst_gap, c.lhs - c.rhs);
        }
    }
    verdict(4, residual_ok == 100 && span_ok == 100,
            fmt("residual <= 1e-10 on %d/100 (max %.2e); span(bias*) <= D + 1e-6 on %d/100 (max span-D %.3f)",
                residual_ok, worst_res, span_ok, worst_gap));
}

// ---------------------------------------------------------------- 5-8

struct SeedRun {
    std::string env;
    std::uint64_t seed = 0;
    TraceSummary summary;
    double regret_t = 0.0;
    double regret_t10 = 0.0;
    TraceCheck trace;
    int num_actions = 1;
};

constexpr std::int64_t horizon = 200000;
constexpr double eps0 = 0.01;

SeedRun run_seed(const std::string& name, const Mdp& m, std::vector<ModelSpec> specs, std::uint64_t seed) {
    Environment env(m, seed);
    std::vector<TraceEvent> events;
    events.reserve(static_cast<std::size_t>(horizon) + 4096);
    OamsConfig cfg;
    cfg.delta = 0.1;
    cfg.eps0 = eps0;
    const auto out = run_oams(env, specs, horizon, cfg, [&](const TraceEvent& e) { events.push_back(e); });
    SeedRun r;
    r.env = name;
    r.seed = seed;
    r.summary = out.summary;
    r.regret_t = out.regret.back().regret;
    r.regret_t10 = out.regret[horizon / 10 - 1].regret;
    r.num_actions = m.num_actions();
    r.trace = check_trace(events, out.summary, m.num_actions(), eps0);
    return r;
}

std::vector<ModelSpec> with_known_eps(std::vector<ModelSpec> specs, const Mdp& m) {
    for (auto& s : specs) {
        if (s.kind == ModelSpec::Kind::identity) s.epsilon = 0.0;
        if (s.kind == ModelSpec::Kind::constant)
            s.epsilon = model_epsilon_for_aggregation(m, make_aggregation(std::vector<int>(m.num_states(), 0)));
        if (s.kind == ModelSpec::Kind::aggregation) s.epsilon = model_epsilon_for_aggregation(m, make_aggregation(s.alpha));
    }
    return specs;
}

// Six states in near-duplicate pairs (2i, 2i+1) over a random 3-state base.
Mdp twin_environment() {
    const Mdp base = random_mdp(3, 2, 606, 3);
    CounterRng rng(607);
    std::vector<double> rewards(12), trans(72);
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 2; ++a) {
            std::vector<double> row(6);
            for (int k = 0; k < 3; ++k) {
                const double c = 0.3 + 0.4 * rng.uniform();
                row[2 * k] = base.prob(i, a, k) * c;
                row[2 * k + 1] = base.prob(i, a, k) * (1 - c);
            }
            const double r = base.reward(i, a);
            for (int twin = 0; twin < 2; ++twin) {
                const int s = 2 * i + twin;
                rewards[s * 2 + a] = twin == 0 ? r : std::clamp(r + (r < 0.5 ? 0.04 : -0.04), 0.0, 1.0);
                for (int k = 0; k < 6; ++k)
                    trans[(s * 2 + a) * 6 + k] = twin == 0 ? row[k] : 0.98 * row[k] + 0.02 / 6.0;
            }
        }
    return Mdp(6, 2, std::move(rewards), std::move(trans));
}

int allowed_violations(std::size_t seeds) { return static_cast<int>(std::floor(0.05 * static_cast<double>(seeds))); }

std::vector<SeedRun> criterion5() {
    const auto t0 = Clock::now();
    const Mdp alt = alternating_chain();
    const Mdp rnd = random_mdp(5, 2, 7, 3);
    struct Env {
        std::string name;
        Mdp m;
        std::vector<int> alpha;
    };
    const std::vector<Env> envs{{"alternating", alt, {0, 0}}, {"random5", rnd, {0, 0, 1, 1, 2}}};
    std::vector<SeedRun> runs;
    bool pass = true;
    std::string detail;
    for (const auto& e : envs) {
        const int n = e.m.num_states();
        auto specs = with_known_eps({ModelSpec::identity(n), ModelSpec::aggregation(e.alpha), ModelSpec::constant(n)}, e.m);
        int reward_ok = 0, sublinear_ok = 0;
        std::string per_seed;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto r = run_seed(e.name, e.m, specs, seed);
            const double rho = r.summary.rho_star;
            if (r.summary.mean_reward_last_half >= rho - 0.03) ++reward_ok;
            const double late = r.regret_t / horizon;
            const double early = r.regret_t10 / (horizon / 10);
            if (late <= 0.6 * early) ++sublinear_ok;
            std::string sel;
            for (const auto& m : r.summary.models) sel += fmt("%s%lld", sel.empty() ? "" : "/", (long long)m.steps);
            per_seed += fmt(" [seed %llu: last-half %.4f, R(T)/T %.4f, R(T/10)/(T/10) %.4f, steps per model %s]",
                            (unsigned long long)seed, r.summary.mean_reward_last_half, late, early, sel.c_str());
            runs.push_back(std::move(r));
        }
        const bool ok = reward_ok >= 4 && sublinear_ok >= 4;
        pass = pass && ok;
        detail += fmt("\n    %s (rho*=%.4f): reward %d/5, sublinear %d/5 -> %s;", e.name.c_str(), runs.back().summary.rho_star,
                      reward_ok, sublinear_ok, ok ? "ok" : "not met") +
                  per_seed;
    }
    const double s = since(t0);
    pass = pass && s < 300.0;
    verdict(5, pass, fmt("%.1fs", s) + detail);
    return runs;
}

std::vector<SeedRun> criterion6() {
    const auto t0 = Clock::now();
    const Mdp m = twin_environment();
    const auto alpha = make_aggregation({0, 0, 1, 1, 2, 2});
    const double tight = approximation_epsilon(m, aggregate_mdp(m, alpha), alpha).tight_epsilon;
    const double model_eps = model_epsilon_for_aggregation(m, alpha);
    const double d = diameter(m);
    const auto specs = with_known_eps({ModelSpec::aggregation(alpha.alpha)}, m);
    std::vector<SeedRun> runs;
    int ok = 0;
    std::string per_seed;
    double threshold = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto r = run_seed("twins6", m, specs, seed);
        threshold = r.summary.rho_star - 3 * tight * (d + 1) - 0.03;
        if (r.summary.mean_reward_last_half >= threshold) ++ok;
        per_seed += fmt(" %.4f", r.summary.mean_reward_last_half);
        runs.push_back(std::move(r));
    }
    verdict(6, ok >= 4 && tight <= 0.1,
            fmt("tight eps %.4f (pairwise model eps %.4f), D %.3f, rho* %.4f, threshold %.4f; last-half means%s; %d/5; %.1fs",
                tight, model_eps, d, runs.back().summary.rho_star, threshold, per_seed.c_str(), ok, since(t0)));
    return runs;
}

void criterion7(const std::vector<SeedRun>& runs) {
    int violations = 0;
    std::int64_t literal = 0, steps = 0;
    std::string detail;
    for (const auto& r : runs) {
        steps += r.trace.steps_checked;
        literal += r.trace.literal_bridge_violations;
        if (!r.trace.ok()) {
            ++violations;
            detail += fmt(" [%s seed %llu: %s]", r.env.c_str(), (unsigned long long)r.seed, r.trace.to_json().dump().c_str());
        }
    }
    double worst_ratio = 0.0;
    for (const auto& r : runs) worst_ratio = std::max(worst_ratio, r.trace.episodes / r.trace.episode_bound);
    const int allowed = allowed_violations(runs.size());
    verdict(7, violations <= allowed,
            fmt("%d/%zu seed-level violations (allowed %d); %lld steps checked; max K_T/bound %.3f; "
                "literal lob <= ell*pen misses %lld (diagnostic only)",
                violations, runs.size(), allowed, (long long)steps, worst_ratio, (long long)literal) +
                detail);
}

void criterion8() {
    // Same config and seed twice through the artifact path, byte for byte.
    bool same = true;
    std::string detail;
    for (const char* generator : {"alternating", "random"}) {
        ExperimentConfig cfg;
        cfg.environment.generator = generator;
        cfg.environment.num_states = 5;
        cfg.environment.num_actions = 2;
        cfg.environment.seed = 7;
        cfg.environment.support = 3;
        cfg.models = {{ModelSpec::Kind::identity, {}, 0, {}}, {ModelSpec::Kind::constant, {}, 0, {}}};
        if (std::string(generator) == "random") cfg.models.push_back({ModelSpec::Kind::aggregation, {0, 0, 1, 1, 2}, 0, {}});
        cfg.steps = horizon;
        cfg.seeds = {3};
        const Mdp m = build_environment(cfg.environment);
        const auto a = simulate_seed(cfg, m, 3);
        const auto b = simulate_seed(cfg, m, 3);
        const bool eq = a.regret_csv == b.regret_csv && a.events_jsonl == b.events_jsonl;
        same = same && eq;
        detail += fmt(" %s: regret %zu B, events %zu B, %s;", generator, a.regret_csv.size(), a.events_jsonl.size(),
                      eq ? "identical" : "DIFFER");
    }
    const Mdp tw = twin_environment();
    ExperimentConfig cfg;
    cfg.models = {{ModelSpec::Kind::aggregation, {0, 0, 1, 1, 2, 2}, 0, {}}};
    cfg.steps = horizon;
    const auto a = simulate_seed(cfg, tw, 2);
    const auto b = simulate_seed(cfg, tw, 2);
    const bool eq = a.regret_csv == b.regret_csv && a.events_jsonl == b.events_jsonl;
    same = same && eq;
    detail += fmt(" twins6: %s;", eq ? "identical" : "DIFFER");
    auto strip = [](nlohmann::ordered_json j) {
        j.erase("seconds");
        return j.dump();
    };
    const bool reports = strip(verify_thm2_grid().to_json()) == strip(verify_thm2_grid().to_json()) &&
                         strip(verify_thm1(200).to_json()) == strip(verify_thm1(200).to_json());
    detail += fmt(" verify reports (minus wall time) %s", reports ? "identical" : "DIFFER");
    verdict(8, same && reports, detail);
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> expected_fail;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--expect-fail") == 0 && i + 1 < argc) expected_fail.insert(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
            return 2;
        }
    }
    std::printf("kernels: %s\n", kernels::active().name);
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    auto runs = criterion5();
    auto more = criterion6();
    runs.insert(runs.end(), more.begin(), more.end());
    criterion7(runs);
    criterion8();

    int passed = 0;
    bool as_expected = true;
    for (const auto& [id, ok] : results) {
        passed += ok;
        if (ok == (expected_fail.count(id) > 0)) as_expected = false;
    }
    std::printf("summary: %d/%zu criteria pass", passed, results.size());
    if (!expected_fail.empty()) {
        std::printf("; expected failures:");
        for (int id : expected_fail) std::printf(" %d", id);
    }
    std::printf("\n");
    return as_expected ? 0 : 1;
}
