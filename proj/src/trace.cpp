#include "oams/trace.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace oams {

const char* to_string(TraceEvent::Type type) noexcept {
    switch (type) {
    case TraceEvent::Type::run_start: return "run_start";
    case TraceEvent::Type::step: return "step";
    case TraceEvent::Type::test_fail: return "test_fail";
    case TraceEvent::Type::eps_doubled: return "eps_doubled";
    case TraceEvent::Type::model_rejected: return "model_rejected";
    case TraceEvent::Type::episode_end: return "episode_end";
    case TraceEvent::Type::run_end: return "run_end";
    }
    return "unknown";
}

std::string to_json_line(const TraceEvent& e) {
    nlohmann::ordered_json j;
    j["type"] = to_string(e.type);
    j["t"] = e.t;
    switch (e.type) {
    case TraceEvent::Type::run_start:
        j["k"] = e.k;
        j["j"] = e.j;
        j["model"] = e.model;
        j["rho"] = e.rho;
        j["pen"] = e.pen;
        j["span"] = e.span;
        break;
    case TraceEvent::Type::step:
        j["s"] = e.s;
        j["a"] = e.a;
        j["r"] = e.r;
        j["ell"] = e.ell;
        j["lob"] = e.lob;
        break;
    case TraceEvent::Type::test_fail:
        j["model"] = e.model;
        j["lob"] = e.lob;
        j["threshold"] = e.threshold;
        j["run_reward"] = e.run_reward;
        break;
    case TraceEvent::Type::eps_doubled:
        j["model"] = e.model;
        j["eps"] = e.eps;
        break;
    case TraceEvent::Type::model_rejected:
        j["model"] = e.model;
        break;
    case TraceEvent::Type::episode_end:
        j["k"] = e.k;
        j["reason"] = e.reason;
        break;
    case TraceEvent::Type::run_end:
        j["k"] = e.k;
        j["j"] = e.j;
        j["reason"] = e.reason;
        break;
    }
    return j.dump();
}

std::string to_json_text(const TraceSummary& s) {
    nlohmann::ordered_json j;
    j["steps"] = s.steps;
    j["episodes"] = s.episodes;
    j["runs_per_episode"] = s.runs_per_episode;
    j["test_failures"] = s.test_failures;
    j["doubling_ends"] = s.doubling_ends;
    j["rho_star"] = s.rho_star;
    j["total_reward"] = s.total_reward;
    j["mean_reward_last_half"] = s.mean_reward_last_half;
    j["final_regret"] = s.final_regret;
    auto& models = j["models"] = nlohmann::ordered_json::array();
    for (const auto& m : s.models) {
        nlohmann::ordered_json mj;
        mj["label"] = m.label;
        mj["num_states"] = m.num_states;
        mj["final_eps_tilde"] = m.final_eps_tilde;
        mj["doublings"] = m.doublings;
        mj["rejected"] = m.rejected;
        mj["selections"] = m.selections;
        mj["steps"] = m.steps;
        if (m.known_epsilon >= 0.0) mj["epsilon"] = m.known_epsilon;
        else mj["epsilon"] = nullptr;
        models.push_back(std::move(mj));
    }
    return j.dump(2) + "\n";
}

std::string regret_table(const std::vector<RegretRecord>& rows) {
    std::string out = "t,reward,cum_reward,regret\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%.12g,%.12g,%.12g\n", static_cast<long long>(r.t), r.reward, r.cum_reward,
                      r.regret);
        out += buf;
    }
    return out;
}

std::vector<RegretRecord> downsample(const std::vector<RegretRecord>& rows, std::int64_t stride) {
    if (stride <= 1) return rows;
    std::vector<RegretRecord> out;
    for (const auto& r : rows)
        if (r.t % stride == 0) out.push_back(r);
    if (!rows.empty() && (out.empty() || out.back().t != rows.back().t)) out.push_back(rows.back());
    return out;
}

} // namespace oams
