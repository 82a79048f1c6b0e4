// oams: run experiments, verification suites, MDP analysis and lower-bound
// instance generation.

#include "oams/errors.hpp"
#include "oams/experiment.hpp"
#include "oams/mdp_io.hpp"
#include "oams/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_config = 2;

int report(const oams::VerifyReport& rep) {
    std::cout << rep.to_json().dump(2) << "\n";
    return rep.passed() ? exit_ok : exit_failed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online selection of approximate state-representation models"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "simulate a configured experiment");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seeds, "override the config's seed list");
    run->add_option("--out", out_dir, "override the output directory");

    std::string suite;
    double eps = 0.2;
    double dia = 10.0;
    bool grid = false;
    int count = 0;
    std::uint64_t first_seed = 1;
    double precision = 1e-3;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "thm1 | thm2 | evi | invariants")
        ->required()
        ->check(CLI::IsMember({"thm1", "thm2", "evi", "invariants"}));
    verify->add_option("--eps", eps, "thm2: epsilon");
    verify->add_option("--diameter", dia, "thm2: diameter");
    verify->add_flag("--grid", grid, "thm2: sweep the (eps, D) grid");
    verify->add_option("--count", count, "thm1: seeds, evi: MDPs, invariants: instances");
    verify->add_option("--first-seed", first_seed, "first seed");
    verify->add_option("--precision", precision, "evi: EVI precision");

    std::string mdp_path;
    auto* analyze = app.add_subcommand("analyze", "gain, diameter, bias span and stationary distribution");
    analyze->add_option("--mdp", mdp_path, "MDP file (JSON)")->required();

    double lb_eps = 0.0;
    double lb_dia = 0.0;
    std::string lb_out;
    auto* lower = app.add_subcommand("lower-bound", "write the lower-bound instance bundle");
    lower->add_option("--eps", lb_eps)->required();
    lower->add_option("--diameter", lb_dia)->required();
    lower->add_option("--out", lb_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) {
            auto config = oams::load_config(config_path);
            if (!seeds.empty()) config.seeds = seeds;
            if (!out_dir.empty()) config.out_dir = out_dir;
            for (const auto& r : oams::simulate(config))
                std::printf("seed %llu: K_T=%lld mean_last_half=%.6f rho*=%.6f -> %s\n",
                            static_cast<unsigned long long>(r.seed), static_cast<long long>(r.summary.episodes),
                            r.summary.mean_reward_last_half, r.summary.rho_star,
                            (config.out_dir / ("seed_" + std::to_string(r.seed))).string().c_str());
            return exit_ok;
        }
        if (*verify) {
            if (suite == "thm2") return report(grid ? oams::verify_thm2_grid() : oams::verify_thm2(eps, dia));
            if (suite == "thm1") return report(oams::verify_thm1(count > 0 ? count : 200, first_seed));
            if (suite == "evi") return report(oams::verify_evi(count > 0 ? count : 50, 1000, precision, first_seed));
            return report(oams::verify_invariants(count > 0 ? count : 100, first_seed));
        }
        if (*analyze) {
            std::cout << oams::to_json(oams::analyze(oams::load_mdp(mdp_path))).dump(2) << "\n";
            return exit_ok;
        }
        oams::make_lower_bound(lb_eps, lb_dia, lb_out);
        std::printf("wrote %s/{m,m_bar,alpha,instance}.json\n", lb_out.c_str());
        return exit_ok;
    } catch (const oams::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.kind() == oams::ErrorKind::IoError ? exit_failed : exit_config;
    }
}
