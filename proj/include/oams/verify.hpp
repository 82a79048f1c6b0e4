#pragma once
// Verification suites (gain error bounds, lower-bound instances, EVI against
// exact oracles, Poisson residuals) and the trace invariant checker.

#include "oams/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace oams {

struct Check {
    std::string name;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string note;
};

struct VerifyReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    std::size_t failures() const;
    bool passed() const { return failures() == 0; }
    nlohmann::ordered_json to_json() const;
};

/// Lower-bound instance at (eps, D): gap against the closed form and
/// against eps D / 56, stationary distribution, diameter, and that m_bar is
/// an eps-approximation.
VerifyReport verify_thm2(double eps, double diameter);
/// Every valid (eps, D) in {0.05, 0.1, 0.2, 0.4} x {3, 5, 10, 19}.
VerifyReport verify_thm2_grid();

/// |rho*(M) - rho*(M_bar)| <= eps (D + 1) + 1e-6 on random MDPs and random
/// aggregations with the tight eps.
VerifyReport verify_thm1(int seeds = 200, std::uint64_t first_seed = 1, int max_states = 6, int max_actions = 3);

/// Zero-radius EVI against optimal_gain (within 2 precision), and the inner
/// maximization against a simplex-method LP (within 1e-9).
VerifyReport verify_evi(int mdps = 50, int triples = 1000, double precision = 1e-3, std::uint64_t seed = 1);

/// Poisson residual <= 1e-10 on random unichain policies and
/// span(optimal bias) <= D + 1e-6.
VerifyReport verify_invariants(int instances = 100, std::uint64_t seed = 1);

struct TraceCheck {
    std::int64_t steps_checked = 0;
    std::int64_t cap_violations = 0;             // ell > 2^j
    std::int64_t bridge_violations = 0;          // lob > 2^j pen
    std::int64_t literal_bridge_violations = 0;  // lob > ell pen
    std::int64_t eps_grid_violations = 0;        // eps_tilde not eps0 2^m
    std::int64_t episode_end_violations = 0;     // reason not test_fail / doubling, or count mismatch
    std::int64_t episodes = 0;
    double episode_bound = 0.0;
    int eps_bound_violations = 0;                   // final eps_tilde > max(eps0, 2 eps)

    bool episodes_ok() const { return static_cast<double>(episodes) <= episode_bound; }
    /// Everything except the literal ell * pen bridge.
    bool ok() const {
        return cap_violations == 0 && bridge_violations == 0 && eps_grid_violations == 0 &&
               episode_end_violations == 0 && episodes_ok() && eps_bound_violations == 0;
    }
    nlohmann::ordered_json to_json() const;
};

/// Needs the complete event stream (no downsampling).
TraceCheck check_trace(const std::vector<TraceEvent>& events, const TraceSummary& summary, int num_actions,
                       double eps0);

/// S A log2(2T / (S A)) + sum over models with eps > eps0 of log2(eps / eps0),
/// S the total number of model states.
double episode_bound(const TraceSummary& summary, int num_actions, double eps0);

} // namespace oams
